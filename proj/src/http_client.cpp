#include "http_client.hpp"

#include <chrono>
#include <cmath>

#include <httplib.h>

#include "remix/error.hpp"

namespace remix::detail {

namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(std::string_view endpoint) {
  const auto scheme = endpoint.find("://");
  const auto host_begin = scheme == std::string_view::npos ? 0 : scheme + 3;
  const auto slash = endpoint.find('/', host_begin);
  if (slash == std::string_view::npos) return {std::string(endpoint), ""};
  std::string prefix(endpoint.substr(slash));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {std::string(endpoint.substr(0, slash)), prefix};
}

}  // namespace

void throw_provider_error(int status, std::string_view body) {
  const auto excerpt = std::string(body.substr(0, 200));
  throw Error(ErrorCode::ProviderError,
              "provider returned status " + std::to_string(status) + ": " + excerpt,
              {.index = static_cast<std::size_t>(status < 0 ? 0 : status), .subject = excerpt});
}

HttpReply post_json(std::string_view endpoint, std::string_view path, const std::string& body,
                    double timeout_seconds) {
  const auto [base, prefix] = split_endpoint(endpoint);
  httplib::Client client(base);
  if (!client.is_valid()) {
    throw Error(ErrorCode::ProviderError, "invalid provider endpoint: " + std::string(endpoint));
  }
  const auto secs = static_cast<time_t>(std::floor(timeout_seconds));
  const auto usecs = static_cast<time_t>((timeout_seconds - std::floor(timeout_seconds)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(prefix + std::string(path), body, "application/json");
  if (!res) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= 0.9 * timeout_seconds)) {
      throw Error(ErrorCode::ProviderTimeout,
                  "provider did not answer within " + std::to_string(timeout_seconds) + " s");
    }
    throw Error(ErrorCode::ProviderError, "provider transport error: " + httplib::to_string(err));
  }
  return {res->status, res->body};
}

}  // namespace remix::detail
