#include "remix/cli.hpp"

#include <CLI11.hpp>
#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include "remix/config.hpp"
#include "remix/corpus.hpp"
#include "remix/error.hpp"
#include "remix/evalharness.hpp"
#include "remix/image.hpp"
#include "remix/index.hpp"
#include "remix/service.hpp"
#include "remix/util.hpp"

namespace remix::cli {

namespace fs = std::filesystem;

std::string image_file_name(const std::string& example_id) {
  std::string name;
  for (char c : example_id) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    name.push_back(keep ? c : '_');
  }
  if (name != example_id || name.empty() || name[0] == '.') {
    char suffix[24];
    std::snprintf(suffix, sizeof suffix, "-%016llx", static_cast<unsigned long long>(fnv1a64(example_id)));
    name += suffix;
  }
  return name + ".png";
}

namespace {

struct Options {
  std::string config;
  std::string manifest;
  std::string out;
  std::string queries;
  std::string relevance;
  std::string listen;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

config::AppConfig resolve_config(const Options& o) {
  config::AppConfig c = o.config.empty() ? config::AppConfig{} : config::load_config(o.config);
  config::apply_environment(c);
  if (!o.manifest.empty()) c.corpus_manifest = fs::path(o.manifest);
  if (!o.listen.empty()) {
    config::parse_listen_addr(o.listen);
    c.listen_addr = o.listen;
  }
  return c;
}

void describe(std::ostream& err, const Error& e) {
  err << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
}

// Replaces `target` with the fully written `staging` directory.
void swap_in_directory(const fs::path& staging, const fs::path& target) {
  const fs::path old = target.string() + ".old";
  fs::remove_all(old);
  if (fs::exists(target)) fs::rename(target, old);
  fs::rename(staging, target);
  fs::remove_all(old);
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.manifest.empty() || o.out.empty()) {
    err << "ingest requires --manifest and --out\n";
    return kExitFailure;
  }
  const auto scan = corpus::scan_manifest(o.manifest);
  const fs::path base = fs::path(o.manifest).parent_path();

  struct Prepared {
    corpus::UiExample record;
    std::vector<std::uint8_t> png;
  };
  std::vector<Prepared> prepared;
  std::vector<corpus::RecordFailure> failed = scan.failed;
  for (const auto& record : scan.ok) {
    try {
      const auto trimmed = corpus::trim_borders(load_image(base / record.image_path));
      auto canonical = record;
      canonical.image_path = "images/" + image_file_name(record.example_id);
      prepared.push_back({canonical, encode_png(trimmed)});
    } catch (const Error& e) {
      failed.push_back({0, record.example_id, e});
    }
  }

  for (const auto& f : failed) {
    err << "failed";
    if (f.line_no) err << " line " << f.line_no;
    if (!f.example_id.empty()) err << " " << f.example_id;
    err << ": " << code_name(f.error.code());
    if (!f.error.detail().field.empty()) err << " field " << f.error.detail().field;
    err << ": " << f.error.what() << "\n";
  }
  out << prepared.size() << " ok, " << failed.size() << " failed\n";
  if (!failed.empty()) return kExitValidation;

  const fs::path target(o.out);
  const fs::path staging = target.string() + ".staging";
  try {
    fs::remove_all(staging);
    fs::create_directories(staging / "images");
    std::vector<corpus::UiExample> records;
    for (const auto& p : prepared) {
      write_file_atomic(staging / p.record.image_path, p.png);
      records.push_back(p.record);
    }
    corpus::save_manifest(corpus::CorpusManifest(std::move(records), staging, scan.schema_version),
                          staging / "manifest.jsonl");
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    swap_in_directory(staging, target);
  } catch (const std::exception& e) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    err << "error: cannot write " << target.string() << ": " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_index(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = resolve_config(o);
  if (!c.corpus_manifest) {
    err << "index requires --manifest or corpus_manifest in --config\n";
    return kExitFailure;
  }
  const fs::path target = !o.out.empty() ? fs::path(o.out) : c.index_path.value_or(fs::path());
  if (target.empty()) {
    err << "index requires --out or index_path in --config\n";
    return kExitFailure;
  }
  const auto corpus = corpus::load_manifest(*c.corpus_manifest);
  const auto provider = embedding::make_provider(c.embed);

  const auto& records = corpus.records();
  std::vector<embedding::EmbeddingVector> vectors(records.size());
  std::vector<std::optional<Error>> errors(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < records.size(); i = next++) {
      try {
        vectors[i] = provider->embed_image(read_file_bytes(corpus.image_file(records[i])));
      } catch (const Error& e) {
        errors[i] = e;
      }
    }
  };
  const auto hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const auto n_workers = std::clamp<std::size_t>(o.workers ? o.workers : hw, 1, std::max<std::size_t>(1, records.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t n_failed = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!errors[i]) continue;
    ++n_failed;
    err << "failed " << records[i].example_id << ": " << code_name(errors[i]->code()) << ": " << errors[i]->what()
        << "\n";
  }
  if (n_failed) {
    err << n_failed << " of " << records.size() << " examples failed to embed; index not written\n";
    return kExitFailure;
  }

  index::VectorIndex idx(provider->dimension());
  for (std::size_t i = 0; i < records.size(); ++i) idx.add({records[i].example_id, std::move(vectors[i])});
  index::persist(idx, target);
  out << "indexed " << idx.size() << " examples, dimension " << idx.dimension() << "\n";
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = resolve_config(o);
  const auto rt = config::load_runtime(c);
  auto generator = engine::make_generator(c.generator);
  auto sessions = c.session_journal ? std::make_shared<session::SessionStore>(*c.session_journal)
                                    : std::make_shared<session::SessionStore>();
  service::RemixService svc(rt.retriever, generator, sessions, {c.fuzzy_window});
  service::HttpServer server(svc);
  const auto addr = config::parse_listen_addr(c.listen_addr);

  // Route SIGINT/SIGTERM to a watcher thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const int port = server.bind(addr.host, addr.port);
  out << "corpus " << rt.corpus->size() << " examples, index " << rt.index->size() << " vectors\n";
  out << "listening on " << addr.host << ":" << port << std::endl;
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.serve();
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  (void)err;
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = resolve_config(o);
  if (o.relevance.empty()) {
    err << "eval requires --relevance\n";
    return kExitFailure;
  }
  std::vector<eval::EvalQuery> queries;
  std::vector<eval::GradedRelevance> relevance;
  try {
    queries = o.queries.empty() ? eval::generate_template_queries(eval::default_templates(),
                                                                  eval::kDefaultQueriesPerType, o.seed)
                                : eval::load_queries(o.queries);
    relevance = eval::load_relevance(o.relevance);
  } catch (const Error& e) {
    describe(err, e);
    return kExitFailure;
  }
  if (queries.empty()) {
    err << "error: no queries in " << o.queries << "\n";
    return kExitFailure;
  }
  const auto rt = config::load_runtime(c);
  eval::EvalConfig ec;
  ec.seed = o.seed;
  const auto report = eval::run_eval(queries, relevance, eval::retriever_search(*rt.retriever, ec.k), ec);
  if (!o.out.empty()) write_file_atomic(o.out, eval::report_json(report).dump(2) + "\n");

  out << "seed " << o.seed << ", " << queries.size() << " queries, gain " << eval::gain_name(ec.gain) << "\n";
  out << eval::format_table(report);
  for (const auto& f : report.failures) {
    err << "failed query " << f.query.query_id << ": " << f.code << ": " << f.message << "\n";
  }
  return report.outcomes.empty() ? kExitFailure : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Example-driven UI remixing engine", "remix"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Validate, trim and normalize a corpus manifest");
  ingest->add_option("--manifest", o.manifest, "Input manifest (JSON lines)")->required();
  ingest->add_option("--out", o.out, "Output corpus directory")->required();

  auto* index = app.add_subcommand("index", "Embed every corpus image and write the vector index");
  index->add_option("--config", o.config, "Config file");
  index->add_option("--manifest", o.manifest, "Corpus manifest");
  index->add_option("--out", o.out, "Index file");
  index->add_option("--workers", o.workers, "Parallel embedding workers")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", o.config, "Config file")->required();
  serve->add_option("--manifest", o.manifest, "Corpus manifest");
  serve->add_option("--listen", o.listen, "host:port");

  auto* evaluate = app.add_subcommand("eval", "Score retrieval with Hit@5 and nDCG@5");
  evaluate->add_option("--config", o.config, "Config file")->required();
  evaluate->add_option("--manifest", o.manifest, "Corpus manifest");
  evaluate->add_option("--queries", o.queries, "Query file (JSON lines); generated from templates if omitted");
  evaluate->add_option("--relevance", o.relevance, "Relevance file (JSON lines)")->required();
  evaluate->add_option("--out", o.out, "Report file");
  evaluate->add_option("--seed", o.seed, "Template generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, out, err);
    if (index->parsed()) return cmd_index(o, out, err);
    if (serve->parsed()) return cmd_serve(o, out, err);
    if (evaluate->parsed()) return cmd_eval(o, out, err);
  } catch (const Error& e) {
    describe(err, e);
    return e.code() == ErrorCode::ValidationFailed || e.code() == ErrorCode::DuplicateId ? kExitValidation
                                                                                          : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace remix::cli
