#include "remix/service.hpp"

#include <httplib.h>

#include "remix/image.hpp"
#include "remix/preview.hpp"
#include "remix/util.hpp"

namespace remix::service {

using nlohmann::json;

int http_status(ErrorCode code, Stage stage) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::EmptyQuery:
    case ErrorCode::InvalidRequest:
    case ErrorCode::InvalidAnnotation:
      return 400;
    case ErrorCode::SessionNotFound:
    case ErrorCode::UnknownExampleId:
    case ErrorCode::NotFound:
    case ErrorCode::FileNotFound:
      return 404;
    case ErrorCode::SessionBusy:
    case ErrorCode::EmptyHistory:
      return 409;
    case ErrorCode::NoPayload:
    case ErrorCode::PayloadKindMismatch:
    case ErrorCode::MalformedHeader:
    case ErrorCode::LineCountMismatch:
    case ErrorCode::OverlappingHunks:
    case ErrorCode::MultiFileUnsupported:
    case ErrorCode::HunkRejected:
    case ErrorCode::AlreadyApplied:
      return 422;
    case ErrorCode::ProviderTimeout:
      return stage == Stage::None ? 504 : 422;
    case ErrorCode::ProviderError:
      return stage == Stage::None ? 502 : 422;
    case ErrorCode::ZeroVector:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DuplicateId:
    case ErrorCode::ValidationFailed:
    case ErrorCode::ImageDecodeFailed:
    case ErrorCode::AllContentTrimmed:
    case ErrorCode::IoError:
    case ErrorCode::CorruptIndex:
    case ErrorCode::EmptyTemplateSet:
    case ErrorCode::NegativeGrade:
    case ErrorCode::InvalidConfig:
      return stage == Stage::None ? 500 : 422;
  }
  return 500;
}

json api_error(const Error& error) {
  json j = {{"code", code_name(error.code())},
            {"stage", error.stage() == Stage::None ? json(nullptr) : json(stage_name(error.stage()))},
            {"message", error.what()},
            {"http_status", http_status(error.code(), error.stage())}};
  if (error.detail().index) j["index"] = *error.detail().index;
  if (!error.detail().field.empty()) j["reason"] = error.detail().field;
  return j;
}

namespace {

ApiResponse ok(const json& body, int status = 200) { return {status, "application/json", body.dump()}; }

ApiResponse failure(const Error& e) {
  const auto body = api_error(e);
  return {body["http_status"].get<int>(), "application/json", body.dump()};
}

Error bad_request(ErrorCode code, const std::string& message) { return Error(code, message); }

std::string require_text(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    throw bad_request(ErrorCode::InvalidRequest, std::string("field '") + key + "' must be a string");
  }
  return body[key].get<std::string>();
}

std::string require_query(const json& body) {
  if (!body.contains("query") || !body["query"].is_string() || trim(body["query"].get<std::string>()).empty()) {
    throw bad_request(ErrorCode::EmptyQuery, "query is empty");
  }
  return body["query"].get<std::string>();
}

json metadata_json(const corpus::AppMetadata& m) {
  return {{"app_name", m.app_name},         {"developer", m.developer},
          {"rating", m.rating},             {"download_count", m.download_count},
          {"comment_count", m.comment_count}, {"category", m.category}};
}

json example_json(const corpus::UiExample& e) {
  return {{"example_id", e.example_id},
          {"kind", corpus::kind_name(e.kind)},
          {"image_url", "/examples/" + e.example_id + "/image"},
          {"metadata", metadata_json(e.metadata)}};
}

json version_json(const session::DesignVersion& v) {
  return {{"version_id", v.version_id},
          {"created_by", session::created_by_name(v.created_by)},
          {"parent_id", v.parent_id ? json(*v.parent_id) : json(nullptr)},
          {"timestamp", v.timestamp_ms}};
}

std::optional<Annotation> parse_annotation(const json& body) {
  if (!body.contains("annotation") || body["annotation"].is_null()) return std::nullopt;
  const auto& a = body["annotation"];
  auto invalid = [] { return bad_request(ErrorCode::InvalidAnnotation, "annotation must be {\"strokes\": [[[x,y],...],...]}"); };
  if (!a.is_object() || !a.contains("strokes") || !a["strokes"].is_array()) throw invalid();
  Annotation out;
  for (const auto& stroke : a["strokes"]) {
    if (!stroke.is_array()) throw invalid();
    std::vector<Point> points;
    for (const auto& p : stroke) {
      if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number()) {
        points.push_back({p[0].get<double>(), p[1].get<double>()});
      } else if (p.is_object() && p.contains("x") && p.contains("y") && p["x"].is_number() && p["y"].is_number()) {
        points.push_back({p["x"].get<double>(), p["y"].get<double>()});
      } else {
        throw invalid();
      }
    }
    out.strokes.push_back(std::move(points));
  }
  out.validate();
  return out;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  const auto q = path.find('?');
  if (q != std::string_view::npos) path = path.substr(0, q);
  std::size_t pos = 0;
  while (pos < path.size()) {
    const auto slash = path.find('/', pos);
    const auto part = path.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
    if (!part.empty()) parts.emplace_back(part);
    if (slash == std::string_view::npos) break;
    pos = slash + 1;
  }
  return parts;
}

}  // namespace

RemixService::RemixService(std::shared_ptr<const retrieval::Retriever> retriever,
                           std::shared_ptr<engine::GeneratorProvider> generator,
                           std::shared_ptr<session::SessionStore> sessions, Options options)
    : retriever_(std::move(retriever)),
      generator_(std::move(generator)),
      sessions_(std::move(sessions)),
      options_(options) {
  for (const auto& record : retriever_->index().records()) {
    if (!retriever_->corpus().find(record.example_id)) {
      throw Error(ErrorCode::UnknownExampleId,
                  "index entry " + record.example_id + " has no corpus record; rebuild the index",
                  {.subject = record.example_id});
    }
  }
}

ApiResponse RemixService::handle(const ApiRequest& request) {
  try {
    const auto parts = split_path(request.path);
    json body = json::object();
    if (request.method == "POST" && !trim(request.body).empty()) {
      body = json::parse(request.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) {
        throw bad_request(ErrorCode::ParseError, "request body must be a JSON object");
      }
    }
    const auto& m = request.method;
    if (parts.size() == 1 && parts[0] == "sessions" && m == "POST") return create_session();
    if (parts.size() >= 2 && parts[0] == "sessions") {
      const auto& id = parts[1];
      if (parts.size() == 2 && m == "GET") return get_session(id);
      if (parts.size() == 3) {
        const auto& action = parts[2];
        if (m == "POST" && action == "chat") return chat(id, body);
        if (m == "POST" && action == "search") return search(id, body);
        if (m == "POST" && action == "apply") return apply(id, body);
        if (m == "POST" && action == "undo") return navigate(id, true);
        if (m == "POST" && action == "redo") return navigate(id, false);
        if (m == "GET" && action == "preview") return preview(id);
        if (m == "GET" && action == "code") return get_code(id);
        if (m == "POST" && action == "code") return put_code(id, body);
      }
    }
    if (parts.size() == 2 && parts[0] == "examples" && m == "GET") return get_example(parts[1]);
    if (parts.size() == 3 && parts[0] == "examples" && parts[2] == "image" && m == "GET") {
      return get_example_image(parts[1]);
    }
    throw Error(ErrorCode::NotFound, "no route for " + m + " " + request.path);
  } catch (const Error& e) {
    return failure(e);
  } catch (const std::exception& e) {
    return {500, "application/json",
            json{{"code", "INTERNAL"}, {"stage", nullptr}, {"message", e.what()}, {"http_status", 500}}.dump()};
  }
}

ApiResponse RemixService::create_session() { return ok({{"session_id", sessions_->create_session()}}, 201); }

ApiResponse RemixService::get_session(const std::string& id) {
  const auto s = sessions_->snapshot(id);
  json versions = json::array();
  for (const auto& v : s.versions) versions.push_back(version_json(v));
  json selection = nullptr;
  if (s.selection) {
    selection = {{"example_id", s.selection->example_id}, {"annotation", nullptr}};
    if (s.selection->annotation) {
      json strokes = json::array();
      for (const auto& stroke : s.selection->annotation->strokes) {
        json pts = json::array();
        for (const auto& p : stroke) pts.push_back({p.x, p.y});
        strokes.push_back(pts);
      }
      selection["annotation"] = {{"strokes", strokes}};
    }
  }
  return ok({{"session_id", s.session_id},
             {"mode", session::mode_name(s.mode)},
             {"history_length", s.versions.size()},
             {"cursor", s.empty() ? json(nullptr) : json(s.cursor)},
             {"current_version_id", s.empty() ? json(nullptr) : json(s.current().version_id)},
             {"can_back", s.can_back()},
             {"can_forward", s.can_forward()},
             {"versions", versions},
             {"selection", selection},
             {"target_component", s.target_component ? json(*s.target_component) : json(nullptr)},
             {"conversation", s.conversation}});
}

ApiResponse RemixService::search(const std::string& id, const json& body) {
  if (!sessions_->exists(id)) sessions_->snapshot(id);  // throws SESSION_NOT_FOUND
  retrieval::RetrievalQuery q;
  q.text = require_query(body);
  if (body.contains("scope") && !body["scope"].is_null()) {
    const auto scope = body["scope"].is_string() ? body["scope"].get<std::string>() : std::string();
    if (scope == "whole_screen" || scope == "WHOLE_SCREEN" || scope == "global") {
      q.scope = retrieval::Scope::WholeScreen;
    } else if (scope == "component" || scope == "COMPONENT" || scope == "local") {
      q.scope = retrieval::Scope::Component;
    } else {
      throw bad_request(ErrorCode::InvalidRequest, "scope must be whole_screen or component");
    }
  }
  if (body.contains("limit") && !body["limit"].is_null()) {
    if (!body["limit"].is_number_integer() || body["limit"].get<long long>() < 1) {
      throw bad_request(ErrorCode::InvalidRequest, "limit must be a positive integer");
    }
    q.limit = body["limit"].get<std::size_t>();
  }
  sessions_->set_mode(id, session::Mode::Search);
  sessions_->log_message(id, "search: " + q.text);
  const auto results = retriever_->search(q);
  json items = json::array();
  for (const auto& r : results) {
    items.push_back({{"example_id", r.example.example_id},
                     {"rank", r.rank},
                     {"similarity", r.similarity},
                     {"kind", corpus::kind_name(r.example.kind)},
                     {"image_url", "/examples/" + r.example.example_id + "/image"},
                     {"metadata", metadata_json(r.example.metadata)}});
  }
  return ok({{"results", items}});
}

ApiResponse RemixService::chat(const std::string& id, const json& body) {
  if (!sessions_->exists(id)) sessions_->snapshot(id);
  engine::RemixRequest request;
  request.mode = engine::RemixMode::Chat;
  request.query = require_query(body);
  sessions_->set_mode(id, session::Mode::Chat);
  sessions_->log_message(id, "chat: " + request.query);
  const auto v = engine::execute_remix(std::move(request), *generator_, *sessions_, id, options_.fuzzy_window);
  return ok({{"version_id", v.version_id}, {"document", v.document}});
}

ApiResponse RemixService::apply(const std::string& id, const json& body) {
  if (!sessions_->exists(id)) sessions_->snapshot(id);
  engine::RemixRequest request;
  request.query = require_query(body);
  const auto example_id = require_text(body, "example_id");
  const auto scope = body.contains("scope") && body["scope"].is_string() ? body["scope"].get<std::string>() : "";
  if (scope == "global") {
    request.mode = engine::RemixMode::ApplyGlobal;
  } else if (scope == "local") {
    request.mode = engine::RemixMode::ApplyLocal;
  } else {
    throw bad_request(ErrorCode::InvalidRequest, "scope must be global or local");
  }
  if (body.contains("target_component_id") && !body["target_component_id"].is_null()) {
    const auto& t = body["target_component_id"];
    if (t.is_string()) {
      request.target_component_id = t.get<std::string>();
    } else if (t.is_number_integer()) {
      request.target_component_id = std::to_string(t.get<long long>());
    } else {
      throw bad_request(ErrorCode::InvalidRequest, "target_component_id must be a string");
    }
  }
  if (request.mode == engine::RemixMode::ApplyLocal &&
      (!request.target_component_id || trim(*request.target_component_id).empty())) {
    throw bad_request(ErrorCode::InvalidRequest, "local apply requires target_component_id");
  }
  request.annotation = parse_annotation(body);

  const auto& corpus = retriever_->corpus();
  sessions_->select_for_apply(id, corpus, example_id, request.annotation, request.target_component_id);
  sessions_->log_message(id, "apply (" + scope + ", " + example_id + "): " + request.query);
  const auto* example = corpus.find(example_id);
  request.reference = engine::Reference{*example, load_image(corpus.image_file(*example))};
  const auto v = engine::execute_remix(std::move(request), *generator_, *sessions_, id, options_.fuzzy_window);
  return ok({{"version_id", v.version_id}, {"document", v.document}});
}

ApiResponse RemixService::navigate(const std::string& id, bool back) {
  const auto lease = sessions_->acquire(id);
  const auto r = back ? sessions_->undo(id) : sessions_->redo(id);
  const auto s = sessions_->snapshot(id);
  return ok({{"version_id", r.version.version_id},
             {"document", r.version.document},
             {"at_boundary", r.at_boundary},
             {"can_back", s.can_back()},
             {"can_forward", s.can_forward()}});
}

ApiResponse RemixService::preview(const std::string& id) {
  const auto s = sessions_->snapshot(id);
  if (s.empty()) throw Error(ErrorCode::EmptyHistory, "session has no versions to preview");
  return {200, "text/html; charset=utf-8", preview::instrument(s.current().document)};
}

ApiResponse RemixService::get_code(const std::string& id) {
  const auto s = sessions_->snapshot(id);
  if (s.empty()) return ok({{"version_id", nullptr}, {"document", ""}});
  return ok({{"version_id", s.current().version_id}, {"document", s.current().document}});
}

ApiResponse RemixService::put_code(const std::string& id, const json& body) {
  const auto document = require_text(body, "document");
  const auto lease = sessions_->acquire(id);
  const auto v = sessions_->commit_version(id, document, session::CreatedBy::ManualEdit);
  return ok({{"version_id", v.version_id}, {"document", v.document}});
}

ApiResponse RemixService::get_example(const std::string& id) {
  const auto* e = retriever_->corpus().find(id);
  if (!e) throw Error(ErrorCode::UnknownExampleId, "unknown example " + id, {.subject = id});
  return ok(example_json(*e));
}

ApiResponse RemixService::get_example_image(const std::string& id) {
  const auto& corpus = retriever_->corpus();
  const auto* e = corpus.find(id);
  if (!e) throw Error(ErrorCode::UnknownExampleId, "unknown example " + id, {.subject = id});
  const auto bytes = read_file_bytes(corpus.image_file(*e));
  return {200, content_type(sniff_format(bytes)), std::string(bytes.begin(), bytes.end())};
}

struct HttpServer::Impl {
  explicit Impl(RemixService& s) : service(s) {}
  RemixService& service;
  httplib::Server server;
};

HttpServer::HttpServer(RemixService& service) : impl_(std::make_unique<Impl>(service)) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = impl_->service.handle({req.method, req.path, req.body});
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  impl_->server.Get(R"(/.*)", route);
  impl_->server.Post(R"(/.*)", route);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace remix::service
