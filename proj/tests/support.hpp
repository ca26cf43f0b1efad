#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "remix/corpus.hpp"
#include "remix/embedding.hpp"
#include "remix/engine.hpp"
#include "remix/image.hpp"
#include "remix/index.hpp"
#include "remix/retrieval.hpp"

namespace testing_support {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

/// Screenshot-like image: a solid background, a few random rectangles and
/// an optional black frame of `border` pixels.
remix::Image random_screen(std::mt19937_64& rng, int width, int height, int border = 0);

remix::corpus::UiExample make_example(const std::string& id, const std::string& image_path,
                                      remix::corpus::ExampleKind kind = remix::corpus::ExampleKind::WholeScreen);

/// Writes `n_screens` whole-screen and `n_components` component-crop
/// examples (images under dir/raw/) and returns the manifest path.
fs::path write_fixture_corpus(const fs::path& dir, std::size_t n_screens, std::size_t n_components,
                              std::uint64_t seed = 7, int border = 0);

/// GNU `diff -u` between two texts (empty string when identical).
std::string reference_diff(const std::string& a, const std::string& b, int context = 3);

/// Line-structured random document; every line is unique.
std::string random_document(std::mt19937_64& rng, std::size_t lines, bool final_newline = true);

/// Random insertions, deletions and replacements applied to a document.
std::string random_edit(std::mt19937_64& rng, const std::string& document);

std::vector<std::string> split_lines(const std::string& text);

/// Retrieval stack over an in-memory index whose vectors are given
/// explicitly rather than embedded from images.
struct PlantedStack {
  std::shared_ptr<remix::corpus::CorpusManifest> corpus;
  std::shared_ptr<remix::index::VectorIndex> index;
  std::shared_ptr<remix::embedding::MockEmbeddingProvider> provider;
  std::shared_ptr<remix::retrieval::Retriever> retriever;
};

struct PlantedEntry {
  std::string example_id;
  remix::embedding::EmbeddingVector vector;
  remix::corpus::ExampleKind kind = remix::corpus::ExampleKind::WholeScreen;
};

/// Writes one tiny image per entry so that the corpus validates.
PlantedStack planted_stack(const fs::path& dir, const std::vector<PlantedEntry>& entries,
                           std::size_t dimension = remix::embedding::kDefaultDimension);

/// Unit vector orthogonal to `q`, derived from a seeded Gaussian draw.
std::vector<double> orthogonal_unit(const remix::embedding::EmbeddingVector& q, std::uint64_t seed);

/// normalize(cos(theta) q + sin(theta) u).
remix::embedding::EmbeddingVector rotate_towards(const remix::embedding::EmbeddingVector& q,
                                                 const std::vector<double>& u, double theta);

/// Small hand-written unified diff that replaces one line of `document`
/// (0-based `line`) with `replacement`, with up to two context lines.
std::string replace_line_diff(const std::string& document, std::size_t line, const std::string& replacement);

/// Diff that turns an empty document into `document`.
std::string create_document_diff(const std::string& document);

/// Wraps text in a fenced code block, as a chat model would.
std::string fenced(const std::string& payload, const std::string& lang = "diff");

/// Small HTML page mixing elements, comments, void tags and raw-text
/// bodies that contain tag-like text.
std::string random_html(std::mt19937_64& rng);

}  // namespace testing_support
