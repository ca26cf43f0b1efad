#include "remix/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "http_client.hpp"
#include "remix/error.hpp"
#include "remix/image.hpp"
#include "remix/util.hpp"

namespace remix::embedding {

EmbeddingVector EmbeddingVector::from_normalized(std::vector<float> values) {
  return EmbeddingVector(std::move(values));
}

namespace {

template <typename T>
EmbeddingVector normalize_impl(std::span<const T> raw) {
  if (raw.empty()) throw Error(ErrorCode::InvalidRequest, "cannot normalize an empty vector");
  double sum = 0.0;
  for (T v : raw) {
    if (!std::isfinite(static_cast<double>(v))) {
      throw Error(ErrorCode::InvalidRequest, "vector contains non-finite values");
    }
    sum += static_cast<double>(v) * static_cast<double>(v);
  }
  const double norm = std::sqrt(sum);
  if (norm < 1e-12) throw Error(ErrorCode::ZeroVector, "vector norm is zero");
  std::vector<float> out(raw.size());
  // Already-unit input is kept as is so that normalizing twice is exact.
  const double scale = std::abs(norm - 1.0) <= kUnitNormTolerance ? 1.0 : norm;
  std::transform(raw.begin(), raw.end(), out.begin(),
                 [scale](T v) { return static_cast<float>(static_cast<double>(v) / scale); });
  return EmbeddingVector::from_normalized(std::move(out));
}

}  // namespace

EmbeddingVector normalize(std::span<const double> raw) { return normalize_impl(raw); }
EmbeddingVector normalize(std::span<const float> raw) { return normalize_impl(raw); }

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dot product of vectors with different dimensions");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

void validate(const EmbeddingProviderConfig& config) {
  if (config.dimension < 2) throw Error(ErrorCode::InvalidConfig, "embedding dimension must be >= 2");
  if (config.kind == ProviderKind::RemoteHttp && (!config.endpoint || config.endpoint->empty())) {
    throw Error(ErrorCode::InvalidConfig, "remote embedding provider requires an endpoint");
  }
  if (!(config.timeout_seconds > 0.0)) throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
}

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dimension) : dimension_(dimension) {
  if (dimension < 2) throw Error(ErrorCode::InvalidConfig, "embedding dimension must be >= 2");
}

EmbeddingVector MockEmbeddingProvider::embed_text(std::string_view query) const {
  if (trim(query).empty()) throw Error(ErrorCode::EmptyQuery, "query is empty");
  std::vector<double> buckets(dimension_, 0.0);
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      buckets[fnv1a64(token) % dimension_] += 1.0;
      token.clear();
    }
  };
  for (char c : query) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return normalize(buckets);
}

EmbeddingVector MockEmbeddingProvider::embed_image(std::span<const std::uint8_t> image_bytes) const {
  Image image;
  try {
    image = decode_image(image_bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::ProviderError, std::string("mock provider cannot decode image: ") + e.what());
  }
  constexpr int kGrid = 8;
  std::vector<double> buckets(dimension_, 0.0);
  buckets[fnv1a64("image:bias") % dimension_] += 1.0;
  for (int gy = 0; gy < kGrid; ++gy) {
    for (int gx = 0; gx < kGrid; ++gx) {
      const int x0 = gx * image.width() / kGrid;
      const int y0 = gy * image.height() / kGrid;
      const int x1 = std::max(x0 + 1, (gx + 1) * image.width() / kGrid);
      const int y1 = std::max(y0 + 1, (gy + 1) * image.height() / kGrid);
      double sum[3] = {0, 0, 0};
      double sq[3] = {0, 0, 0};
      double n = 0;
      for (int y = y0; y < std::min(y1, image.height()); ++y) {
        for (int x = x0; x < std::min(x1, image.width()); ++x) {
          const auto px = image.at(x, y);
          const double c[3] = {px.r / 255.0, px.g / 255.0, px.b / 255.0};
          for (int k = 0; k < 3; ++k) {
            sum[k] += c[k];
            sq[k] += c[k] * c[k];
          }
          n += 1;
        }
      }
      for (int k = 0; k < 3; ++k) {
        const double mean = sum[k] / n;
        const double var = std::max(0.0, sq[k] / n - mean * mean);
        const std::string key = "image:" + std::to_string(gy * kGrid + gx) + ":" + std::to_string(k);
        const auto h_mean = fnv1a64(key + ":mean");
        const auto h_var = fnv1a64(key + ":var");
        // Centered and signed so that unrelated images are not all close.
        buckets[h_mean % dimension_] += ((h_mean >> 63) ? -1.0 : 1.0) * (2.0 * mean - 1.0);
        buckets[h_var % dimension_] += ((h_var >> 63) ? -1.0 : 1.0) * 2.0 * std::sqrt(var);
      }
    }
  }
  return normalize(buckets);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint, std::size_t dimension,
                                             double timeout_seconds)
    : endpoint_(std::move(endpoint)), dimension_(dimension), timeout_seconds_(timeout_seconds) {}

EmbeddingVector HttpEmbeddingProvider::embed_text(std::string_view query) const {
  if (trim(query).empty()) throw Error(ErrorCode::EmptyQuery, "query is empty");
  return call("text", std::string(query));
}

EmbeddingVector HttpEmbeddingProvider::embed_image(std::span<const std::uint8_t> image_bytes) const {
  return call("image", base64_encode(image_bytes));
}

EmbeddingVector HttpEmbeddingProvider::call(std::string_view modality, std::string payload) const {
  using nlohmann::json;
  const json request = {{"modality", modality}, {"payload", std::move(payload)}, {"dimension", dimension_}};
  const auto reply = detail::post_json(endpoint_, "/embed", request.dump(), timeout_seconds_);
  if (reply.status != 200) detail::throw_provider_error(reply.status, reply.body);

  const json body = json::parse(reply.body, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("vector") || !body["vector"].is_array()) {
    detail::throw_provider_error(reply.status, reply.body);
  }
  std::vector<double> values;
  values.reserve(body["vector"].size());
  for (const auto& v : body["vector"]) {
    if (!v.is_number()) detail::throw_provider_error(reply.status, reply.body);
    values.push_back(v.get<double>());
  }
  if (values.size() != dimension_) {
    throw Error(ErrorCode::ProviderError, "provider returned " + std::to_string(values.size()) +
                                              " values, expected " + std::to_string(dimension_));
  }
  try {
    return normalize(values);
  } catch (const Error& e) {
    throw Error(ErrorCode::ProviderError, std::string("provider returned unusable vector: ") + e.what());
  }
}

std::shared_ptr<EmbeddingProvider> make_provider(EmbeddingProviderConfig config) {
  if (const char* env = std::getenv("REMIX_EMBED_ENDPOINT"); env && *env &&
                                                              config.kind == ProviderKind::RemoteHttp) {
    config.endpoint = env;
  }
  validate(config);
  if (config.kind == ProviderKind::RemoteHttp) {
    return std::make_shared<HttpEmbeddingProvider>(*config.endpoint, config.dimension, config.timeout_seconds);
  }
  return std::make_shared<MockEmbeddingProvider>(config.dimension);
}

EmbeddingVector embed_text(std::string_view query, const EmbeddingProviderConfig& config) {
  return make_provider(config)->embed_text(query);
}

EmbeddingVector embed_image(std::span<const std::uint8_t> image_bytes, const EmbeddingProviderConfig& config) {
  return make_provider(config)->embed_image(image_bytes);
}

}  // namespace remix::embedding
