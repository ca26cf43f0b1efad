#pragma once

#include <string>
#include <string_view>

namespace remix::detail {

struct HttpReply {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body to endpoint + path. Transport failures throw
/// PROVIDER_TIMEOUT or PROVIDER_ERROR; any HTTP status is returned.
HttpReply post_json(std::string_view endpoint, std::string_view path, const std::string& body,
                    double timeout_seconds);

/// "PROVIDER_ERROR" with status and the first 200 bytes of the body.
[[noreturn]] void throw_provider_error(int status, std::string_view body);

}  // namespace remix::detail
