#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "remix/error.hpp"
#include "remix/image.hpp"

namespace remix::corpus {

/// Source-transparency metadata shown next to every example.
struct AppMetadata {
  std::string app_name;
  std::string developer;
  double rating = 0.0;  // [0, 5]
  std::int64_t download_count = 0;
  std::int64_t comment_count = 0;
  std::string category;

  friend bool operator==(const AppMetadata&, const AppMetadata&) = default;
};

enum class ExampleKind { WholeScreen, ComponentCrop };

std::string_view kind_name(ExampleKind kind);
std::optional<ExampleKind> parse_kind(std::string_view name);

struct UiExample {
  std::string example_id;
  std::string image_path;  // as written in the manifest; relative paths resolve against the manifest dir
  AppMetadata metadata;
  ExampleKind kind = ExampleKind::WholeScreen;

  friend bool operator==(const UiExample&, const UiExample&) = default;
};

inline constexpr int kSchemaVersion = 1;

class CorpusManifest {
 public:
  CorpusManifest() = default;
  CorpusManifest(std::vector<UiExample> records, std::filesystem::path base_dir,
                 int schema_version = kSchemaVersion);

  int schema_version() const noexcept { return schema_version_; }
  const std::vector<UiExample>& records() const noexcept { return records_; }
  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
  std::size_t size() const noexcept { return records_.size(); }

  const UiExample* find(std::string_view example_id) const;
  std::filesystem::path image_file(const UiExample& example) const;

  /// Manifests compare by schema and records; base_dir is a location, not content.
  friend bool operator==(const CorpusManifest& a, const CorpusManifest& b) {
    return a.schema_version_ == b.schema_version_ && a.records_ == b.records_;
  }

 private:
  int schema_version_ = kSchemaVersion;
  std::vector<UiExample> records_;
  std::filesystem::path base_dir_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct FieldError {
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::vector<FieldError> errors;
  bool ok() const noexcept { return errors.empty(); }
};

/// Checks every record invariant. Never throws; decode failures become an
/// error on field "image_path".
ValidationResult validate_example(const UiExample& record, const std::filesystem::path& base_dir);

/// Lenient read used by ingestion: every line is parsed and validated and
/// failures are collected instead of thrown.
struct RecordFailure {
  std::size_t line_no = 0;
  std::string example_id;
  Error error;
};

struct ManifestScan {
  int schema_version = kSchemaVersion;
  std::vector<UiExample> ok;
  std::vector<RecordFailure> failed;
};

ManifestScan scan_manifest(const std::filesystem::path& path);

/// Strict load: the first failure is thrown (FILE_NOT_FOUND, PARSE_ERROR,
/// DUPLICATE_ID, VALIDATION_FAILED).
CorpusManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

/// Record <-> one manifest line.
std::string to_line(const UiExample& example);
UiExample parse_line(std::string_view line, std::size_t line_no);

inline constexpr int kDefaultLuminanceThreshold = 8;

/// Removes maximal edge rows/columns whose pixels all have luminance at or
/// below the threshold. Throws ALL_CONTENT_TRIMMED when nothing survives.
Image trim_borders(const Image& image, int luminance_threshold = kDefaultLuminanceThreshold);

}  // namespace remix::corpus
