#include "remix/retrieval.hpp"

#include "remix/error.hpp"
#include "remix/util.hpp"

namespace remix::retrieval {

std::vector<RetrievalResult> search_examples(const RetrievalQuery& query, const index::VectorIndex& index,
                                             const corpus::CorpusManifest& corpus,
                                             const embedding::EmbeddingProvider& provider) {
  if (trim(query.text).empty()) throw Error(ErrorCode::EmptyQuery, "query is empty");
  if (query.limit == 0) throw Error(ErrorCode::InvalidRequest, "limit must be >= 1");

  const auto wanted =
      query.scope == Scope::Component ? corpus::ExampleKind::ComponentCrop : corpus::ExampleKind::WholeScreen;
  auto accept = [&](const std::string& id) {
    const auto* example = corpus.find(id);
    if (!example) {
      throw Error(ErrorCode::UnknownExampleId, "index entry " + id + " has no corpus record", {.subject = id});
    }
    return example->kind == wanted;
  };

  const auto vector = provider.embed_text(query.text);
  const auto hits = index.search_top_k(vector, query.limit, accept);

  std::vector<RetrievalResult> results;
  results.reserve(hits.size());
  for (const auto& hit : hits) {
    results.push_back({*corpus.find(hit.example_id), hit.similarity, results.size() + 1});
  }
  return results;
}

std::vector<RetrievalResult> search_examples(const RetrievalQuery& query, const index::VectorIndex& index,
                                             const corpus::CorpusManifest& corpus,
                                             const embedding::EmbeddingProviderConfig& embed_config) {
  return search_examples(query, index, corpus, *embedding::make_provider(embed_config));
}

Retriever::Retriever(std::shared_ptr<const index::VectorIndex> index,
                     std::shared_ptr<const corpus::CorpusManifest> corpus,
                     std::shared_ptr<const embedding::EmbeddingProvider> provider)
    : index_(std::move(index)), corpus_(std::move(corpus)), provider_(std::move(provider)) {
  if (provider_->dimension() != index_->dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding provider and index disagree on dimension");
  }
}

std::vector<RetrievalResult> Retriever::search(const RetrievalQuery& query) const {
  return search_examples(query, *index_, *corpus_, *provider_);
}

}  // namespace remix::retrieval
