#include "remix/corpus.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "remix/util.hpp"

namespace remix::corpus {

using nlohmann::json;

std::string_view kind_name(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::WholeScreen: return "WHOLE_SCREEN";
    case ExampleKind::ComponentCrop: return "COMPONENT_CROP";
  }
  return "WHOLE_SCREEN";
}

std::optional<ExampleKind> parse_kind(std::string_view name) {
  if (name == "WHOLE_SCREEN") return ExampleKind::WholeScreen;
  if (name == "COMPONENT_CROP") return ExampleKind::ComponentCrop;
  return std::nullopt;
}

CorpusManifest::CorpusManifest(std::vector<UiExample> records, std::filesystem::path base_dir,
                               int schema_version)
    : schema_version_(schema_version), records_(std::move(records)), base_dir_(std::move(base_dir)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!by_id_.emplace(records_[i].example_id, i).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate example_id " + records_[i].example_id,
                  {.subject = records_[i].example_id});
    }
  }
}

const UiExample* CorpusManifest::find(std::string_view example_id) const {
  const auto it = by_id_.find(std::string(example_id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

std::filesystem::path CorpusManifest::image_file(const UiExample& example) const {
  std::filesystem::path p(example.image_path);
  return p.is_absolute() ? p : base_dir_ / p;
}

ValidationResult validate_example(const UiExample& record, const std::filesystem::path& base_dir) {
  ValidationResult result;
  auto fail = [&](std::string field, std::string message) {
    result.errors.push_back({std::move(field), std::move(message)});
  };
  const auto& m = record.metadata;
  if (record.example_id.empty()) fail("example_id", "must be non-empty");
  if (m.app_name.empty()) fail("app_name", "must be non-empty");
  if (m.developer.empty()) fail("developer", "must be non-empty");
  if (!std::isfinite(m.rating) || m.rating < 0.0 || m.rating > 5.0) fail("rating", "must lie in [0, 5]");
  if (m.download_count < 0) fail("download_count", "must be non-negative");
  if (m.comment_count < 0) fail("comment_count", "must be non-negative");

  if (record.image_path.empty()) {
    fail("image_path", "must be non-empty");
  } else {
    std::filesystem::path p(record.image_path);
    if (!p.is_absolute()) p = base_dir / p;
    try {
      const auto image = load_image(p);
      if (image.width() < 1 || image.height() < 1) fail("image_path", "image has zero extent");
    } catch (const Error& e) {
      fail("image_path", e.what());
    }
  }
  return result;
}

std::string to_line(const UiExample& e) {
  json j = json::object();
  // nlohmann::json sorts keys; the output is canonical regardless of input order.
  j["example_id"] = e.example_id;
  j["image_path"] = e.image_path;
  j["kind"] = kind_name(e.kind);
  j["app_name"] = e.metadata.app_name;
  j["developer"] = e.metadata.developer;
  j["rating"] = e.metadata.rating;
  j["download_count"] = e.metadata.download_count;
  j["comment_count"] = e.metadata.comment_count;
  j["category"] = e.metadata.category;
  return j.dump();
}

namespace {

Error parse_error(std::size_t line_no, const std::string& what) {
  return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what,
               {.index = line_no});
}

std::string require_string(const json& j, const char* key, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw parse_error(line_no, std::string("missing or non-string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::int64_t require_integer(const json& j, const char* key, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw parse_error(line_no, std::string("missing or non-integer field '") + key + "'");
  }
  return it->get<std::int64_t>();
}

bool is_header(const json& j) { return j.contains("schema_version") && !j.contains("example_id"); }

}  // namespace

UiExample parse_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw parse_error(line_no, e.what());
  }
  if (!j.is_object()) throw parse_error(line_no, "record is not an object");

  UiExample e;
  e.example_id = require_string(j, "example_id", line_no);
  e.image_path = require_string(j, "image_path", line_no);
  const auto kind = parse_kind(require_string(j, "kind", line_no));
  if (!kind) throw parse_error(line_no, "kind must be WHOLE_SCREEN or COMPONENT_CROP");
  e.kind = *kind;
  e.metadata.app_name = require_string(j, "app_name", line_no);
  e.metadata.developer = require_string(j, "developer", line_no);
  const auto rating = j.find("rating");
  if (rating == j.end() || !rating->is_number()) throw parse_error(line_no, "missing or non-numeric field 'rating'");
  e.metadata.rating = rating->get<double>();
  e.metadata.download_count = require_integer(j, "download_count", line_no);
  e.metadata.comment_count = require_integer(j, "comment_count", line_no);
  e.metadata.category = require_string(j, "category", line_no);
  return e;
}

ManifestScan scan_manifest(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, "manifest not found: " + path.string(), {.subject = path.string()});
  }
  const auto base_dir = path.parent_path();
  std::istringstream in(read_text_file(path));

  ManifestScan scan;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (first_content) {
      first_content = false;
      json header = json::parse(line, nullptr, false);
      if (!header.is_discarded() && header.is_object() && is_header(header)) {
        if (!header["schema_version"].is_number_integer() ||
            header["schema_version"].get<int>() != kSchemaVersion) {
          throw parse_error(line_no, "unsupported schema_version");
        }
        scan.schema_version = header["schema_version"].get<int>();
        continue;
      }
    }
    UiExample record;
    try {
      record = parse_line(line, line_no);
    } catch (const Error& e) {
      scan.failed.push_back({line_no, {}, e});
      continue;
    }
    if (!seen.insert(record.example_id).second) {
      scan.failed.push_back({line_no, record.example_id,
                             Error(ErrorCode::DuplicateId, "duplicate example_id " + record.example_id,
                                   {.subject = record.example_id})});
      continue;
    }
    const auto validation = validate_example(record, base_dir);
    if (!validation.ok()) {
      const auto& first = validation.errors.front();
      scan.failed.push_back(
          {line_no, record.example_id,
           Error(ErrorCode::ValidationFailed,
                 record.example_id + ": " + first.field + " " + first.message,
                 {.index = line_no, .subject = record.example_id, .field = first.field})});
      continue;
    }
    scan.ok.push_back(std::move(record));
  }
  return scan;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  auto scan = scan_manifest(path);
  if (!scan.failed.empty()) throw scan.failed.front().error;
  return CorpusManifest(std::move(scan.ok), path.parent_path(), scan.schema_version);
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::string out = json{{"schema_version", manifest.schema_version()}}.dump() + "\n";
  for (const auto& record : manifest.records()) {
    out += to_line(record);
    out += '\n';
  }
  write_file_atomic(path, out);
}

Image trim_borders(const Image& image, int luminance_threshold) {
  if (image.empty()) throw Error(ErrorCode::InvalidRequest, "trim_borders on empty image");
  auto dark = [&](int x, int y) { return luminance(image.at(x, y)) <= luminance_threshold; };
  auto row_dark = [&](int y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!dark(x, y)) return false;
    }
    return true;
  };
  int top = 0;
  int bottom = image.height() - 1;
  while (top <= bottom && row_dark(top)) ++top;
  if (top > bottom) {
    throw Error(ErrorCode::AllContentTrimmed, "every pixel is at or below the luminance threshold");
  }
  while (row_dark(bottom)) --bottom;

  auto col_dark = [&](int x) {
    for (int y = top; y <= bottom; ++y) {
      if (!dark(x, y)) return false;
    }
    return true;
  };
  int left = 0;
  int right = image.width() - 1;
  while (col_dark(left)) ++left;
  while (col_dark(right)) --right;
  return image.crop(left, top, right - left + 1, bottom - top + 1);
}

}  // namespace remix::corpus
