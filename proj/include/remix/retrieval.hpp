#pragma once

#include <memory>
#include <string>
#include <vector>

#include "remix/corpus.hpp"
#include "remix/embedding.hpp"
#include "remix/index.hpp"

namespace remix::retrieval {

enum class Scope { WholeScreen, Component };

inline constexpr std::size_t kDefaultLimit = 10;

struct RetrievalQuery {
  std::string text;
  Scope scope = Scope::WholeScreen;
  std::size_t limit = kDefaultLimit;
};

struct RetrievalResult {
  corpus::UiExample example;
  double similarity = 0.0;
  std::size_t rank = 0;  // 1-based
};

/// Embeds the query, restricts candidates to the scope's example kind, runs
/// the exact top-k scan and joins every hit with its corpus record.
std::vector<RetrievalResult> search_examples(const RetrievalQuery& query, const index::VectorIndex& index,
                                             const corpus::CorpusManifest& corpus,
                                             const embedding::EmbeddingProvider& provider);

std::vector<RetrievalResult> search_examples(const RetrievalQuery& query, const index::VectorIndex& index,
                                             const corpus::CorpusManifest& corpus,
                                             const embedding::EmbeddingProviderConfig& embed_config);

/// Immutable snapshot of index + corpus + provider, shared by the service
/// and the evaluation harness.
class Retriever {
 public:
  Retriever(std::shared_ptr<const index::VectorIndex> index, std::shared_ptr<const corpus::CorpusManifest> corpus,
            std::shared_ptr<const embedding::EmbeddingProvider> provider);

  std::vector<RetrievalResult> search(const RetrievalQuery& query) const;

  const corpus::CorpusManifest& corpus() const noexcept { return *corpus_; }
  const index::VectorIndex& index() const noexcept { return *index_; }

 private:
  std::shared_ptr<const index::VectorIndex> index_;
  std::shared_ptr<const corpus::CorpusManifest> corpus_;
  std::shared_ptr<const embedding::EmbeddingProvider> provider_;
};

}  // namespace remix::retrieval
