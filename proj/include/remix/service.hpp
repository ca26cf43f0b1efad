#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "remix/engine.hpp"
#include "remix/error.hpp"
#include "remix/retrieval.hpp"
#include "remix/session.hpp"

namespace remix::service {

/// HTTP status for an engine error. Errors raised inside a remix stage map
/// to 422 unless they are client mistakes (400) or conflicts (409).
int http_status(ErrorCode code, Stage stage = Stage::None);

/// {"code", "stage", "message", "http_status"}
nlohmann::json api_error(const Error& error);

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;

  nlohmann::json json() const { return nlohmann::json::parse(body); }
};

struct Options {
  std::size_t fuzzy_window = diffpatch::kDefaultFuzzyWindow;
};

/// Endpoint logic, independent of the HTTP transport:
///
///   POST /sessions                    GET  /sessions/{id}
///   POST /sessions/{id}/chat          POST /sessions/{id}/search
///   POST /sessions/{id}/apply         POST /sessions/{id}/undo
///   POST /sessions/{id}/redo          GET  /sessions/{id}/preview
///   GET  /sessions/{id}/code          POST /sessions/{id}/code
///   GET  /examples/{id}               GET  /examples/{id}/image
class RemixService {
 public:
  RemixService(std::shared_ptr<const retrieval::Retriever> retriever,
               std::shared_ptr<engine::GeneratorProvider> generator,
               std::shared_ptr<session::SessionStore> sessions, Options options = {});

  ApiResponse handle(const ApiRequest& request);

  session::SessionStore& sessions() noexcept { return *sessions_; }

 private:
  ApiResponse create_session();
  ApiResponse get_session(const std::string& id);
  ApiResponse search(const std::string& id, const nlohmann::json& body);
  ApiResponse chat(const std::string& id, const nlohmann::json& body);
  ApiResponse apply(const std::string& id, const nlohmann::json& body);
  ApiResponse navigate(const std::string& id, bool back);
  ApiResponse preview(const std::string& id);
  ApiResponse get_code(const std::string& id);
  ApiResponse put_code(const std::string& id, const nlohmann::json& body);
  ApiResponse get_example(const std::string& id);
  ApiResponse get_example_image(const std::string& id);

  std::shared_ptr<const retrieval::Retriever> retriever_;
  std::shared_ptr<engine::GeneratorProvider> generator_;
  std::shared_ptr<session::SessionStore> sessions_;
  Options options_;
};

/// Blocking HTTP front end for a RemixService.
class HttpServer {
 public:
  explicit HttpServer(RemixService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace remix::service
