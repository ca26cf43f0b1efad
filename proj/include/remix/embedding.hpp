#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remix::embedding {

inline constexpr std::size_t kDefaultDimension = 512;

/// Unit-norm vector in the shared text/image space.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  /// Wraps values that are already unit-norm (e.g. read back from an index
  /// file). No normalization is applied.
  static EmbeddingVector from_normalized(std::vector<float> values);

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}
  std::vector<float> values_;
};

/// Input whose norm is within this of 1 is returned unscaled.
inline constexpr double kUnitNormTolerance = 5e-7;

/// v / ||v||_2, with the norm accumulated in double. Throws ZERO_VECTOR when
/// the norm is below 1e-12 and INVALID_REQUEST on non-finite input.
EmbeddingVector normalize(std::span<const double> raw);
EmbeddingVector normalize(std::span<const float> raw);

double l2_norm(std::span<const float> v);
double dot(std::span<const float> a, std::span<const float> b);

enum class ProviderKind { RemoteHttp, DeterministicMock };

struct EmbeddingProviderConfig {
  ProviderKind kind = ProviderKind::DeterministicMock;
  std::optional<std::string> endpoint;
  std::size_t dimension = kDefaultDimension;
  double timeout_seconds = 30.0;
};

/// Throws INVALID_CONFIG.
void validate(const EmbeddingProviderConfig& config);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVector embed_text(std::string_view query) const = 0;
  virtual EmbeddingVector embed_image(std::span<const std::uint8_t> image_bytes) const = 0;
};

/// Offline provider. Text: lowercase, split on whitespace, hash each token
/// into a bucket, count, normalize. Images: per-channel mean and variance
/// over an 8x8 grid, each statistic hashed into a bucket.
class MockEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(std::size_t dimension = kDefaultDimension);
  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector embed_text(std::string_view query) const override;
  EmbeddingVector embed_image(std::span<const std::uint8_t> image_bytes) const override;

 private:
  std::size_t dimension_;
};

/// POST {endpoint}/embed with {"modality","payload","dimension"}; expects
/// {"vector": [...]}.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string endpoint, std::size_t dimension, double timeout_seconds);
  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector embed_text(std::string_view query) const override;
  EmbeddingVector embed_image(std::span<const std::uint8_t> image_bytes) const override;

 private:
  EmbeddingVector call(std::string_view modality, std::string payload) const;

  std::string endpoint_;
  std::size_t dimension_;
  double timeout_seconds_;
};

/// Resolves REMIX_EMBED_ENDPOINT (which overrides config.endpoint) and
/// builds the configured provider.
std::shared_ptr<EmbeddingProvider> make_provider(EmbeddingProviderConfig config);

EmbeddingVector embed_text(std::string_view query, const EmbeddingProviderConfig& config);
EmbeddingVector embed_image(std::span<const std::uint8_t> image_bytes, const EmbeddingProviderConfig& config);

}  // namespace remix::embedding
