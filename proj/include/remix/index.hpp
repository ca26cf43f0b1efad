#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "remix/embedding.hpp"

namespace remix::index {

using embedding::EmbeddingVector;

struct IndexRecord {
  std::string example_id;
  EmbeddingVector vector;
};

struct Hit {
  std::string example_id;
  double similarity = 0.0;

  friend bool operator==(const Hit&, const Hit&) = default;
};

/// Ordering used by every ranked list: similarity descending, then
/// example_id ascending.
inline bool ranks_before(const Hit& a, const Hit& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.example_id < b.example_id;
}

/// Exact brute-force cosine index over unit-norm vectors.
///
/// Not internally synchronized. Writers (add, restore) need exclusive
/// access; the service builds the index once and shares it as
/// `std::shared_ptr<const VectorIndex>`, so queries never race a write.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool contains(std::string_view example_id) const;
  const EmbeddingVector* find(std::string_view example_id) const;
  const std::vector<IndexRecord>& records() const noexcept { return records_; }

  /// Throws DIMENSION_MISMATCH or DUPLICATE_ID. Vectors whose norm strays
  /// from 1 by more than 1e-6 are re-normalized.
  void add(IndexRecord record);

  /// Top min(k, candidates) hits by dot product (cosine under unit norm),
  /// computed in double. `accept`, when set, pre-filters candidates by id.
  std::vector<Hit> search_top_k(const EmbeddingVector& query, std::size_t k,
                                const std::function<bool(const std::string&)>& accept = {}) const;

 private:
  std::size_t dimension_;
  std::vector<IndexRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Bit-exact on-disk form: "RMXIDX1\0", u32 dimension, u64 count, then per
/// record u16 id length, id bytes, dimension f32 values; all little-endian.
void persist(const VectorIndex& index, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize(const VectorIndex& index);

/// Throws IO_ERROR or CORRUPT_INDEX.
VectorIndex restore(const std::filesystem::path& path);
VectorIndex deserialize(std::span<const std::uint8_t> bytes);

}  // namespace remix::index
