#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "remix/error.hpp"
#include "remix/index.hpp"
#include "support.hpp"

using namespace remix;
using namespace remix::index;
using remix::embedding::EmbeddingVector;
using remix::embedding::normalize;

namespace {

EmbeddingVector vec(std::initializer_list<double> values) {
  std::vector<double> v(values);
  return normalize(std::span<const double>(v));
}

EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return normalize(std::span<const double>(v));
}

// O(n*d) scan written independently of the index implementation.
std::vector<Hit> brute_force(const std::vector<IndexRecord>& records, const EmbeddingVector& q, std::size_t k) {
  std::vector<Hit> all;
  for (const auto& r : records) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.dimension(); ++i) s += static_cast<double>(q[i]) * r.vector[i];
    all.push_back({r.example_id, s});
  }
  std::stable_sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.example_id < b.example_id;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::NotFound;
}

}  // namespace

TEST(VectorIndex, AddAndCount) {
  VectorIndex idx(2);
  EXPECT_EQ(idx.size(), 0u);
  idx.add({"a", vec({1, 0})});
  EXPECT_EQ(idx.size(), 1u);
  EXPECT_TRUE(idx.contains("a"));
  EXPECT_EQ(code_of([&] { idx.add({"a", vec({0, 1})}); }), ErrorCode::DuplicateId);
  VectorIndex wide(512);
  EXPECT_EQ(code_of([&] { wide.add({"x", vec({1, 2, 3, 4, 5, 6, 7})}); }), ErrorCode::DimensionMismatch);
}

TEST(VectorIndex, HandComputedRanking) {
  VectorIndex idx(2);
  idx.add({"a", vec({1, 0})});
  idx.add({"b", vec({0, 1})});
  idx.add({"c", vec({0.6, 0.8})});
  const auto hits = idx.search_top_k(vec({1, 0}), 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].example_id, "a");
  EXPECT_NEAR(hits[0].similarity, 1.0, 1e-9);
  EXPECT_EQ(hits[1].example_id, "c");
  EXPECT_NEAR(hits[1].similarity, 0.6, 1e-7);
  EXPECT_EQ(hits[2].example_id, "b");
  EXPECT_NEAR(hits[2].similarity, 0.0, 1e-9);
}

TEST(VectorIndex, TiesBreakByIdAscending) {
  VectorIndex idx(3);
  idx.add({"b", vec({1, 2, 3})});
  idx.add({"a", vec({1, 2, 3})});
  const auto hits = idx.search_top_k(vec({3, 1, 0}), 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].example_id, "a");
  EXPECT_EQ(hits[1].example_id, "b");
}

TEST(VectorIndex, EmptyIndexAndBadArguments) {
  VectorIndex idx(2);
  EXPECT_TRUE(idx.search_top_k(vec({1, 0}), 5).empty());
  EXPECT_EQ(code_of([&] { idx.search_top_k(vec({1, 0, 0}), 5); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { idx.search_top_k(vec({1, 0}), 0); }), ErrorCode::InvalidRequest);
}

TEST(VectorIndex, MatchesBruteForceWithTies) {
  std::mt19937_64 rng(99);
  const std::size_t dim = 16;
  VectorIndex idx(dim);
  std::vector<IndexRecord> records;
  for (int i = 0; i < 400; ++i) {
    // Every fifth record duplicates an earlier vector to force ties.
    auto v = (i % 5 == 4) ? records[rng() % records.size()].vector : random_unit(rng, dim);
    char id[16];
    std::snprintf(id, sizeof id, "r%04llu", static_cast<unsigned long long>(rng() % 100000));
    if (idx.contains(id)) continue;
    records.push_back({id, v});
    idx.add({id, v});
  }
  for (int q = 0; q < 60; ++q) {
    const auto query = q % 3 == 0 ? records[rng() % records.size()].vector : random_unit(rng, dim);
    const std::size_t k = 1 + rng() % 30;
    const auto got = idx.search_top_k(query, k);
    const auto want = brute_force(records, query, k);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].example_id, want[i].example_id) << "query " << q << " rank " << i;
      EXPECT_NEAR(got[i].similarity, want[i].similarity, 1e-9);
    }
  }
}

TEST(VectorIndex, TopKIsPrefixOfTopKPlusOne) {
  std::mt19937_64 rng(5);
  VectorIndex idx(8);
  for (int i = 0; i < 100; ++i) idx.add({"id" + std::to_string(i), random_unit(rng, 8)});
  const auto q = random_unit(rng, 8);
  auto prev = idx.search_top_k(q, 1);
  for (std::size_t k = 2; k <= 101; ++k) {
    const auto next = idx.search_top_k(q, k);
    ASSERT_TRUE(std::equal(prev.begin(), prev.end(), next.begin()));
    prev = next;
  }
  EXPECT_EQ(idx.search_top_k(q, 7), idx.search_top_k(q, 7));
}

TEST(VectorIndex, SimilarityIsSymmetricAndBounded) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_unit(rng, 32);
    const auto b = random_unit(rng, 32);
    VectorIndex ia(32), ib(32);
    ia.add({"a", a});
    ib.add({"b", b});
    const double ab = ib.search_top_k(a, 1)[0].similarity;
    const double ba = ia.search_top_k(b, 1)[0].similarity;
    EXPECT_EQ(ab, ba);
    EXPECT_LE(std::abs(ab), 1.0 + 1e-6);
  }
}

TEST(VectorIndex, FilterRestrictsCandidates) {
  VectorIndex idx(2);
  idx.add({"a", vec({1, 0})});
  idx.add({"b", vec({0.9, 0.1})});
  const auto hits = idx.search_top_k(vec({1, 0}), 5, [](const std::string& id) { return id != "a"; });
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].example_id, "b");
}

TEST(Persistence, ByteLayout) {
  VectorIndex idx(2);
  idx.add({"ab", EmbeddingVector::from_normalized({1.0f, 0.0f})});
  const auto bytes = serialize(idx);
  const std::vector<std::uint8_t> expected = {
      'R', 'M', 'X', 'I', 'D', 'X', '1', 0,  // magic
      2, 0, 0, 0,                            // u32 dimension
      1, 0, 0, 0, 0, 0, 0, 0,                // u64 count
      2, 0, 'a', 'b',                        // u16 id length + id
      0, 0, 0x80, 0x3f,                      // 1.0f
      0, 0, 0, 0,                            // 0.0f
  };
  EXPECT_EQ(bytes, expected);
}

TEST(Persistence, RoundTripAnswersIdentically) {
  testing_support::TempDir dir;
  std::mt19937_64 rng(8);
  VectorIndex idx(24);
  for (int i = 0; i < 1000; ++i) idx.add({"rec-" + std::to_string(i), random_unit(rng, 24)});
  persist(idx, dir / "idx.bin");
  const auto back = restore(dir / "idx.bin");
  EXPECT_EQ(back.size(), 1000u);
  EXPECT_EQ(back.dimension(), 24u);
  for (int q = 0; q < 50; ++q) {
    const auto query = random_unit(rng, 24);
    EXPECT_EQ(back.search_top_k(query, 10), idx.search_top_k(query, 10));
  }
}

TEST(Persistence, EmptyIndex) {
  testing_support::TempDir dir;
  persist(VectorIndex(4), dir / "e.bin");
  const auto back = restore(dir / "e.bin");
  EXPECT_EQ(back.size(), 0u);
  EXPECT_EQ(back.dimension(), 4u);
}

TEST(Persistence, CorruptFiles) {
  testing_support::TempDir dir;
  VectorIndex idx(3);
  idx.add({"x", vec({1, 2, 2})});
  idx.add({"y", vec({2, 1, 2})});
  const auto bytes = serialize(idx);
  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    EXPECT_EQ(code_of([&] { deserialize(truncated); }), ErrorCode::CorruptIndex) << "cut " << cut;
  }
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize(bad_magic); }), ErrorCode::CorruptIndex);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(code_of([&] { deserialize(trailing); }), ErrorCode::CorruptIndex);

  std::ofstream(dir / "cut.bin", std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), 20);
  EXPECT_EQ(code_of([&] { restore(dir / "cut.bin"); }), ErrorCode::CorruptIndex);
  EXPECT_EQ(code_of([&] { restore(dir / "missing.bin"); }), ErrorCode::IoError);
}
