#include "remix/index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "remix/error.hpp"
#include "remix/image.hpp"
#include "remix/util.hpp"

namespace remix::index {

namespace {

constexpr char kMagic[8] = {'R', 'M', 'X', 'I', 'D', 'X', '1', '\0'};

}  // namespace

VectorIndex::VectorIndex(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorCode::InvalidConfig, "index dimension must be positive");
}

bool VectorIndex::contains(std::string_view example_id) const {
  return by_id_.contains(std::string(example_id));
}

const EmbeddingVector* VectorIndex::find(std::string_view example_id) const {
  const auto it = by_id_.find(std::string(example_id));
  return it == by_id_.end() ? nullptr : &records_[it->second].vector;
}

void VectorIndex::add(IndexRecord record) {
  if (record.vector.dimension() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch,
                "record dimension " + std::to_string(record.vector.dimension()) + " != index dimension " +
                    std::to_string(dimension_),
                {.subject = record.example_id});
  }
  if (by_id_.contains(record.example_id)) {
    throw Error(ErrorCode::DuplicateId, "duplicate example_id " + record.example_id,
                {.subject = record.example_id});
  }
  if (std::abs(embedding::l2_norm(record.vector.values()) - 1.0) > 1e-6) {
    record.vector = embedding::normalize(record.vector.values());
  }
  by_id_.emplace(record.example_id, records_.size());
  records_.push_back(std::move(record));
}

std::vector<Hit> VectorIndex::search_top_k(const EmbeddingVector& query, std::size_t k,
                                           const std::function<bool(const std::string&)>& accept) const {
  if (query.dimension() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch, "query dimension " + std::to_string(query.dimension()) +
                                                  " != index dimension " + std::to_string(dimension_));
  }
  if (k == 0) throw Error(ErrorCode::InvalidRequest, "k must be >= 1");

  std::vector<Hit> hits;
  hits.reserve(records_.size());
  for (const auto& record : records_) {
    if (accept && !accept(record.example_id)) continue;
    hits.push_back({record.example_id, embedding::dot(query.values(), record.vector.values())});
  }
  const auto n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), ranks_before);
  hits.resize(n);
  return hits;
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::CorruptIndex, "index file is truncated");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint64_t uint(std::size_t width) {
    const auto b = take(width);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const VectorIndex& index) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(index.dimension()));
  put_u64(out, index.size());
  for (const auto& record : index.records()) {
    if (record.example_id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::IoError, "example_id too long for index format", {.subject = record.example_id});
    }
    put_u16(out, static_cast<std::uint16_t>(record.example_id.size()));
    out.insert(out.end(), record.example_id.begin(), record.example_id.end());
    for (float v : record.vector.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

void persist(const VectorIndex& index, const std::filesystem::path& path) {
  write_file_atomic(path, serialize(index));
}

VectorIndex deserialize(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const auto magic = in.take(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::CorruptIndex, "bad index magic or version");
  }
  const auto dimension = static_cast<std::size_t>(in.uint(4));
  const auto count = in.uint(8);
  if (dimension == 0) throw Error(ErrorCode::CorruptIndex, "index dimension is zero");
  // Each record needs at least 2 + 4*dimension bytes.
  if (count > in.remaining() / (2 + 4 * dimension)) {
    throw Error(ErrorCode::CorruptIndex, "record count exceeds file length");
  }

  VectorIndex index(dimension);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto id_len = static_cast<std::size_t>(in.uint(2));
    const auto id_bytes = in.take(id_len);
    std::string id(id_bytes.begin(), id_bytes.end());
    std::vector<float> values(dimension);
    for (auto& v : values) {
      v = std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4)));
      if (!std::isfinite(v)) throw Error(ErrorCode::CorruptIndex, "non-finite value in record " + id);
    }
    if (index.contains(id)) throw Error(ErrorCode::CorruptIndex, "duplicate id in index file: " + id);
    auto vec = EmbeddingVector::from_normalized(std::move(values));
    if (std::abs(embedding::l2_norm(vec.values()) - 1.0) > 1e-5) {
      throw Error(ErrorCode::CorruptIndex, "record " + id + " is not unit-norm");
    }
    index.add({std::move(id), std::move(vec)});
  }
  if (in.remaining() != 0) throw Error(ErrorCode::CorruptIndex, "trailing bytes after last record");
  return index;
}

VectorIndex restore(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::IoError, e.what(), {.subject = path.string()});
  }
  return deserialize(bytes);
}

}  // namespace remix::index
