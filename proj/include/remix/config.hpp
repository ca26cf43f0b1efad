#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "remix/embedding.hpp"
#include "remix/engine.hpp"
#include "remix/retrieval.hpp"
#include "remix/session.hpp"

namespace remix::config {

inline constexpr std::string_view kDefaultListenAddr = "127.0.0.1:8080";

/// Resolved configuration. Relative paths in a config file are resolved
/// against the file's directory.
struct AppConfig {
  std::optional<std::filesystem::path> corpus_manifest;
  std::optional<std::filesystem::path> index_path;
  std::optional<std::filesystem::path> session_journal;
  embedding::EmbeddingProviderConfig embed;
  engine::GeneratorConfig generator;
  std::size_t fuzzy_window = diffpatch::kDefaultFuzzyWindow;
  std::string listen_addr{kDefaultListenAddr};
};

/// Throws INVALID_CONFIG on unknown keys or wrong types.
AppConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
AppConfig load_config(const std::filesystem::path& path);

/// REMIX_EMBED_ENDPOINT and REMIX_GEN_ENDPOINT.
void apply_environment(AppConfig& config);

struct ListenAddr {
  std::string host;
  int port = 0;
};

/// "host:port" or ":port". Throws INVALID_CONFIG.
ListenAddr parse_listen_addr(std::string_view addr);

/// Everything the service and the evaluator need, loaded from disk.
struct Runtime {
  std::shared_ptr<const corpus::CorpusManifest> corpus;
  std::shared_ptr<const index::VectorIndex> index;
  std::shared_ptr<const embedding::EmbeddingProvider> embedder;
  std::shared_ptr<const retrieval::Retriever> retriever;
};

/// Requires corpus_manifest and index_path.
Runtime load_runtime(const AppConfig& config);

}  // namespace remix::config
