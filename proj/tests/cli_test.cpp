#include <gtest/gtest.h>

#include <sys/wait.h>

#include <sstream>

#include "remix/cli.hpp"
#include "remix/evalharness.hpp"
#include "remix/index.hpp"
#include "support.hpp"

using namespace remix;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "remix");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(REMIX_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).string()] = testing_support::read_text(entry.path());
    }
  }
  return files;
}

void write_config(const fs::path& path, const json& j) { testing_support::write_text(path, j.dump(2)); }

}  // namespace

TEST(Ingest, AllRecordsOk) {
  testing_support::TempDir dir;
  const auto manifest = testing_support::write_fixture_corpus(dir.path(), 4, 1, 7, 3);
  const auto r = run({"ingest", "--manifest", manifest.string(), "--out", (dir / "corpus").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("5 ok, 0 failed"), std::string::npos);
  const auto loaded = corpus::load_manifest(dir / "corpus" / "manifest.jsonl");
  ASSERT_EQ(loaded.size(), 5u);
  // Frames are trimmed away.
  const auto img = load_image(loaded.image_file(loaded.records()[0]));
  EXPECT_EQ(img.width(), 30);
  EXPECT_EQ(img.height(), 58);
}

TEST(Ingest, InvalidRecordFailsWithoutOutput) {
  testing_support::TempDir dir;
  const auto manifest = testing_support::write_fixture_corpus(dir.path(), 5, 0);
  auto lines = testing_support::split_lines(testing_support::read_text(manifest));
  auto bad = json::parse(lines[2]);
  bad["rating"] = 7;
  lines[2] = bad.dump();
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  testing_support::write_text(manifest, text);
  const auto r = run({"ingest", "--manifest", manifest.string(), "--out", (dir / "corpus").string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("screen-002"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("rating"), std::string::npos) << r.err;
  EXPECT_NE(r.out.find("4 ok, 1 failed"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "corpus"));
}

TEST(Ingest, ReingestingOutputIsByteIdentical) {
  testing_support::TempDir dir;
  const auto manifest = testing_support::write_fixture_corpus(dir.path(), 4, 2, 9, 2);
  ASSERT_EQ(run({"ingest", "--manifest", manifest.string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"ingest", "--manifest", (dir / "a" / "manifest.jsonl").string(), "--out", (dir / "b").string()}).code,
            0);
  EXPECT_EQ(tree_bytes(dir / "a"), tree_bytes(dir / "b"));
  // Ingesting over an existing output replaces it.
  ASSERT_EQ(run({"ingest", "--manifest", manifest.string(), "--out", (dir / "b").string()}).code, 0);
  EXPECT_EQ(tree_bytes(dir / "a"), tree_bytes(dir / "b"));
}

TEST(Ingest, ImageFileNamesAreSafe) {
  EXPECT_EQ(cli::image_file_name("ex-1"), "ex-1.png");
  const auto odd = cli::image_file_name("../a b");
  EXPECT_EQ(odd.find('/'), std::string::npos);
  EXPECT_NE(odd, cli::image_file_name("../a_c"));
}

TEST(Index, BuildsAndAnswersLikeInMemory) {
  testing_support::TempDir dir;
  const auto manifest = testing_support::write_fixture_corpus(dir.path(), 9, 3);
  write_config(dir / "remix.json", {{"corpus_manifest", "manifest.jsonl"}, {"index_path", "index.bin"}});
  const auto r = run({"index", "--config", (dir / "remix.json").string(), "--workers", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("indexed 12 examples, dimension 512"), std::string::npos);

  const auto restored = index::restore(dir / "index.bin");
  const auto corpus = corpus::load_manifest(manifest);
  embedding::MockEmbeddingProvider mock;
  index::VectorIndex expected(mock.dimension());
  for (const auto& rec : corpus.records()) {
    expected.add({rec.example_id, mock.embed_image(read_file_bytes(corpus.image_file(rec)))});
  }
  for (int q = 0; q < 20; ++q) {
    const auto v = mock.embed_text("query number " + std::to_string(q));
    EXPECT_EQ(restored.search_top_k(v, 5), expected.search_top_k(v, 5));
  }
}

TEST(Index, UnreachableProviderWritesNothing) {
  testing_support::TempDir dir;
  testing_support::write_fixture_corpus(dir.path(), 3, 0);
  write_config(dir / "remix.json", {{"corpus_manifest", "manifest.jsonl"},
                                    {"index_path", "index.bin"},
                                    {"embed", {{"kind", "remote"}, {"endpoint", "http://127.0.0.1:9"}, {"timeout", 1}}}});
  const auto r = run({"index", "--config", (dir / "remix.json").string()});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("PROVIDER_ERROR"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "index.bin"));
}

namespace {

// Corpus whose index holds each query's own text embedding for its target.
void planted_eval_setup(const fs::path& dir, const std::vector<eval::EvalQuery>& queries) {
  std::vector<testing_support::PlantedEntry> entries;
  std::string relevance;
  embedding::MockEmbeddingProvider mock;
  for (const auto& q : queries) {
    entries.push_back({"t-" + q.query_id, mock.embed_text(q.text)});
    relevance += json{{"query_id", q.query_id}, {"example_id", "t-" + q.query_id}, {"grade", 3}}.dump() + "\n";
  }
  const auto stack = testing_support::planted_stack(dir, entries);
  corpus::save_manifest(*stack.corpus, dir / "manifest.jsonl");
  index::persist(*stack.index, dir / "index.bin");
  eval::save_queries(queries, dir / "queries.jsonl");
  testing_support::write_text(dir / "relevance.jsonl", relevance);
  write_config(dir / "remix.json", {{"corpus_manifest", "manifest.jsonl"}, {"index_path", "index.bin"}});
}

}  // namespace

TEST(Eval, PlantedCorpusScoresOne) {
  testing_support::TempDir dir;
  const auto queries = eval::generate_template_queries(eval::default_templates(), 3, 5);
  planted_eval_setup(dir.path(), queries);
  const std::vector<std::string> args = {"eval",          "--config",   (dir / "remix.json").string(),
                                         "--queries",     (dir / "queries.jsonl").string(),
                                         "--relevance",   (dir / "relevance.jsonl").string(),
                                         "--out",         (dir / "report.json").string()};
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Average (All)"), std::string::npos);
  const auto report = json::parse(testing_support::read_text(dir / "report.json"));
  EXPECT_EQ(report["overall"]["hit_at_5"], 1.0);
  EXPECT_EQ(report["overall"]["ndcg_at_5"], 1.0);
  EXPECT_EQ(report["overall"]["n_queries"], 12);

  const auto first = testing_support::read_text(dir / "report.json");
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(testing_support::read_text(dir / "report.json"), first);
}

TEST(Eval, EmptyQueryFileFails) {
  testing_support::TempDir dir;
  planted_eval_setup(dir.path(), eval::generate_template_queries(eval::default_templates(), 1, 0));
  testing_support::write_text(dir / "empty.jsonl", "");
  const auto r = run({"eval", "--config", (dir / "remix.json").string(), "--queries", (dir / "empty.jsonl").string(),
                      "--relevance", (dir / "relevance.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitFailure);
}

TEST(Binary, ExitCodes) {
  testing_support::TempDir dir;
  EXPECT_EQ(run_binary("--help"), 0);
  EXPECT_EQ(run_binary("ingest"), 1);
  EXPECT_EQ(run_binary("ingest --manifest " + (dir / "missing.jsonl").string() + " --out " + (dir / "o").string()), 1);
  const auto manifest = testing_support::write_fixture_corpus(dir.path(), 2, 0);
  EXPECT_EQ(run_binary("ingest --manifest " + manifest.string() + " --out " + (dir / "o").string()), 0);
  testing_support::write_text(dir / "dup.jsonl",
                              testing_support::read_text(manifest) + testing_support::split_lines(
                                                                          testing_support::read_text(manifest))[0] +
                                  "\n");
  EXPECT_EQ(run_binary("ingest --manifest " + (dir / "dup.jsonl").string() + " --out " + (dir / "d").string()), 2);
}
