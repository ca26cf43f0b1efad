#include "remix/config.hpp"

#include <cstdlib>
#include <set>

#include "remix/error.hpp"
#include "remix/index.hpp"
#include "remix/util.hpp"

namespace remix::config {

using nlohmann::json;

namespace {

Error invalid(const std::string& key, const std::string& message) {
  return Error(ErrorCode::InvalidConfig, key + ": " + message, {.field = key});
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw invalid(prefix + key, "unknown key");
  }
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.at(key).is_string()) throw invalid(key, "expected a string");
  return j.at(key).get<std::string>();
}

double get_positive(const json& j, const std::string& key) {
  if (!j.at(key).is_number() || j.at(key).get<double>() <= 0) throw invalid(key, "expected a positive number");
  return j.at(key).get<double>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

AppConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw invalid("<root>", "config must be a JSON object");
  reject_unknown(j,
                 {"corpus_manifest", "index_path", "embed", "generator", "fuzzy_window", "listen_addr",
                  "session_journal"},
                 "");
  AppConfig c;
  if (j.contains("corpus_manifest")) c.corpus_manifest = resolve(base_dir, get_string(j, "corpus_manifest"));
  if (j.contains("index_path")) c.index_path = resolve(base_dir, get_string(j, "index_path"));
  if (j.contains("session_journal")) c.session_journal = resolve(base_dir, get_string(j, "session_journal"));
  if (j.contains("listen_addr")) c.listen_addr = get_string(j, "listen_addr");
  if (j.contains("fuzzy_window")) {
    if (!j["fuzzy_window"].is_number_unsigned()) throw invalid("fuzzy_window", "expected a non-negative integer");
    c.fuzzy_window = j["fuzzy_window"].get<std::size_t>();
  }
  if (j.contains("embed")) {
    const auto& e = j["embed"];
    if (!e.is_object()) throw invalid("embed", "expected an object");
    reject_unknown(e, {"kind", "endpoint", "dimension", "timeout"}, "embed.");
    if (e.contains("kind")) {
      const auto kind = get_string(e, "kind");
      if (kind == "mock") {
        c.embed.kind = embedding::ProviderKind::DeterministicMock;
      } else if (kind == "remote") {
        c.embed.kind = embedding::ProviderKind::RemoteHttp;
      } else {
        throw invalid("embed.kind", "expected mock or remote");
      }
    }
    if (e.contains("endpoint")) c.embed.endpoint = get_string(e, "endpoint");
    if (e.contains("dimension")) {
      if (!e["dimension"].is_number_unsigned()) throw invalid("embed.dimension", "expected a positive integer");
      c.embed.dimension = e["dimension"].get<std::size_t>();
    }
    if (e.contains("timeout")) c.embed.timeout_seconds = get_positive(e, "timeout");
  }
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    if (!g.is_object()) throw invalid("generator", "expected an object");
    reject_unknown(g, {"kind", "endpoint", "script", "timeout"}, "generator.");
    if (g.contains("kind")) {
      const auto kind = get_string(g, "kind");
      if (kind == "scripted") {
        c.generator.kind = engine::GeneratorConfig::Kind::Scripted;
      } else if (kind == "remote") {
        c.generator.kind = engine::GeneratorConfig::Kind::RemoteHttp;
      } else {
        throw invalid("generator.kind", "expected scripted or remote");
      }
    }
    if (g.contains("endpoint")) c.generator.endpoint = get_string(g, "endpoint");
    if (g.contains("script")) c.generator.script_path = resolve(base_dir, get_string(g, "script")).string();
    if (g.contains("timeout")) c.generator.timeout_seconds = get_positive(g, "timeout");
  }
  embedding::validate(c.embed);
  parse_listen_addr(c.listen_addr);
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, "cannot read config " + path.string() + ": " + e.what());
  }
  const auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, path.string() + " is not valid JSON");
  return parse_config(j, path.parent_path());
}

void apply_environment(AppConfig& config) {
  if (const char* e = std::getenv("REMIX_EMBED_ENDPOINT"); e && *e) config.embed.endpoint = e;
  if (const char* g = std::getenv("REMIX_GEN_ENDPOINT"); g && *g) config.generator.endpoint = g;
}

ListenAddr parse_listen_addr(std::string_view addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string_view::npos) throw invalid("listen_addr", "expected host:port");
  ListenAddr out;
  out.host = std::string(addr.substr(0, colon));
  if (out.host.empty()) out.host = "0.0.0.0";
  const auto port = addr.substr(colon + 1);
  if (port.empty() || port.size() > 5) throw invalid("listen_addr", "bad port");
  int value = 0;
  for (char ch : port) {
    if (ch < '0' || ch > '9') throw invalid("listen_addr", "bad port");
    value = value * 10 + (ch - '0');
  }
  if (value > 65535) throw invalid("listen_addr", "bad port");
  out.port = value;
  return out;
}

Runtime load_runtime(const AppConfig& config) {
  if (!config.corpus_manifest) throw invalid("corpus_manifest", "required");
  if (!config.index_path) throw invalid("index_path", "required");
  Runtime rt;
  rt.corpus = std::make_shared<const corpus::CorpusManifest>(corpus::load_manifest(*config.corpus_manifest));
  rt.index = std::make_shared<const index::VectorIndex>(index::restore(*config.index_path));
  rt.embedder = embedding::make_provider(config.embed);
  rt.retriever = std::make_shared<const retrieval::Retriever>(rt.index, rt.corpus, rt.embedder);
  return rt;
}

}  // namespace remix::config
