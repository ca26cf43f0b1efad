#include "remix/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "http_client.hpp"
#include "remix/error.hpp"
#include "remix/preview.hpp"
#include "remix/util.hpp"

namespace remix::engine {

using nlohmann::json;

std::string_view expected_name(ExpectedOutput e) {
  return e == ExpectedOutput::FullDocument ? "full" : "diff";
}

const PromptSection* StructuredPrompt::section(std::string_view label) const {
  for (const auto& s : text_sections) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

namespace {

constexpr std::string_view kChatInstructions =
    "You edit a single-file HTML/CSS user interface. Apply the change described in QUERY to the document "
    "in CURRENT_CODE. When CURRENT_CODE is empty, create a complete document from scratch. Reply with one "
    "fenced code block containing only a unified diff against CURRENT_CODE (hunk headers of the form "
    "@@ -a,b +c,d @@; use @@ -0,0 +1,N @@ for an empty document).";

constexpr std::string_view kGlobalInstructions =
    "You edit a single-file HTML/CSS user interface. Adapt the visual style and layout of the attached "
    "reference screenshot to the whole document in CURRENT_CODE, following QUERY. Reply with one fenced "
    "code block containing the complete updated document.";

constexpr std::string_view kLocalInstructions =
    "You edit a single-file HTML/CSS user interface. Change only the element identified in "
    "TARGET_COMPONENT, adapting the part of the attached reference screenshot marked in red "
    "(normalized bounds in ANNOTATION_BBOX when present) as described in QUERY. Reply with one fenced "
    "code block containing only a unified diff against CURRENT_CODE.";

Error invalid(const std::string& message) { return Error(ErrorCode::InvalidRequest, message); }

std::string format_bbox(const BoundingBox& b) {
  std::ostringstream os;
  os << std::setprecision(6) << b.x_min << ' ' << b.y_min << ' ' << b.x_max << ' ' << b.y_max;
  return os.str();
}

double distance_to_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
  const double cx = ax + t * dx - px;
  const double cy = ay + t * dy - py;
  return std::sqrt(cx * cx + cy * cy);
}

}  // namespace

void validate(const RemixRequest& r) {
  if (trim(r.query).empty()) throw Error(ErrorCode::EmptyQuery, "query is empty");
  switch (r.mode) {
    case RemixMode::Chat:
      if (r.reference) throw invalid("CHAT requests cannot carry a reference example");
      if (r.annotation) throw invalid("CHAT requests cannot carry an annotation");
      break;
    case RemixMode::ApplyGlobal:
      if (!r.reference) throw invalid("APPLY_GLOBAL requires a reference example");
      break;
    case RemixMode::ApplyLocal:
      if (!r.reference) throw invalid("APPLY_LOCAL requires a reference example");
      if (!r.target_component_id || trim(*r.target_component_id).empty()) {
        throw invalid("APPLY_LOCAL requires target_component_id");
      }
      break;
  }
  if (r.annotation) r.annotation->validate();
}

Image composite_annotation(const Image& screenshot, const Annotation& annotation) {
  annotation.validate();
  Image out = screenshot;
  const double half = kStrokeWidthPx / 2.0;
  const double sx = std::max(0, screenshot.width() - 1);
  const double sy = std::max(0, screenshot.height() - 1);
  for (const auto& stroke : annotation.strokes) {
    for (std::size_t i = 0; i < stroke.size(); ++i) {
      const auto& a = stroke[i];
      const auto& b = i + 1 < stroke.size() ? stroke[i + 1] : stroke[i];
      if (i + 1 == stroke.size() && stroke.size() > 1) break;
      const double ax = a.x * sx, ay = a.y * sy, bx = b.x * sx, by = b.y * sy;
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - half)));
      const int x1 = std::min(screenshot.width() - 1, static_cast<int>(std::ceil(std::max(ax, bx) + half)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - half)));
      const int y1 = std::min(screenshot.height() - 1, static_cast<int>(std::ceil(std::max(ay, by) + half)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if (distance_to_segment(x, y, ax, ay, bx, by) <= half) out.set(x, y, kStrokeColor);
        }
      }
    }
  }
  return out;
}

StructuredPrompt assemble_prompt(const RemixRequest& request) {
  validate(request);
  StructuredPrompt prompt;
  auto add = [&](std::string_view label, std::string text) {
    prompt.text_sections.push_back({std::string(label), std::move(text)});
  };
  switch (request.mode) {
    case RemixMode::Chat:
      prompt.expected_output = ExpectedOutput::DiffPatch;
      add(kInstructionsSection, std::string(kChatInstructions));
      add(kQuerySection, request.query);
      add(kCurrentCodeSection, request.current_code);
      break;
    case RemixMode::ApplyGlobal:
      prompt.expected_output = ExpectedOutput::FullDocument;
      add(kInstructionsSection, std::string(kGlobalInstructions));
      add(kQuerySection, request.query);
      add(kCurrentCodeSection, request.current_code);
      prompt.image_attachments.push_back({std::string(kReferenceImage), request.reference->screenshot});
      break;
    case RemixMode::ApplyLocal: {
      prompt.expected_output = ExpectedOutput::DiffPatch;
      add(kInstructionsSection, std::string(kLocalInstructions));
      add(kQuerySection, request.query);
      add(kCurrentCodeSection, request.current_code);
      std::string target = "data-remix-id=" + *request.target_component_id;
      if (const auto tag = preview::element_start_tag(request.current_code, *request.target_component_id)) {
        target += "\nelement: " + *tag;
      }
      add(kTargetComponentSection, std::move(target));
      if (request.annotation) {
        add(kAnnotationBBoxSection, format_bbox(request.annotation->bbox()));
        prompt.image_attachments.push_back(
            {std::string(kReferenceImage), composite_annotation(request.reference->screenshot, *request.annotation)});
      } else {
        prompt.image_attachments.push_back({std::string(kReferenceImage), request.reference->screenshot});
      }
      break;
    }
  }
  return prompt;
}

std::string prompt_fingerprint(const StructuredPrompt& prompt) {
  std::uint64_t h = fnv1a64("prompt:v");
  h = fnv1a64(kPromptVersion, h);
  auto mix = [&h](std::string_view part) {
    h = fnv1a64(std::to_string(part.size()), h);
    h = fnv1a64(":", h);
    h = fnv1a64(part, h);
  };
  for (const auto& s : prompt.text_sections) {
    mix(s.label);
    mix(s.text);
  }
  for (const auto& img : prompt.image_attachments) {
    mix(img.label);
    mix(std::to_string(img.image.width()) + "x" + std::to_string(img.image.height()));
    const auto bytes = img.image.bytes();
    mix(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  mix(expected_name(prompt.expected_output));
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

GeneratorResponse parse_generator_response(std::string_view raw, ExpectedOutput expected) {
  GeneratorResponse response;
  response.raw_text = std::string(raw);
  response.payload_kind = expected;

  std::optional<std::string> fenced;
  {
    std::size_t pos = 0;
    bool inside = false;
    std::string block;
    while (pos <= raw.size()) {
      const auto nl = raw.find('\n', pos);
      const auto line = raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      const auto lead = line.find_first_not_of(" \t");
      const bool fence = lead != std::string_view::npos && line.substr(lead, 3) == "```";
      if (!inside && fence) {
        inside = true;
      } else if (inside && fence) {
        fenced = block;
        break;
      } else if (inside) {
        block.append(line);
        block.push_back('\n');
      }
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (inside && !fenced) fenced = block;  // unterminated fence: take the rest
  }

  response.extracted_payload = fenced ? *fenced : std::string(trim(raw));
  if (trim(response.extracted_payload).empty()) {
    throw Error(ErrorCode::NoPayload, "generator response contains no payload");
  }
  if (expected == ExpectedOutput::DiffPatch) {
    try {
      response.diff = diffpatch::parse_unified_diff(response.extracted_payload);
    } catch (const Error& e) {
      throw Error(ErrorCode::PayloadKindMismatch, std::string("expected a unified diff: ") + e.what());
    }
    if (response.diff->hunks.empty()) {
      throw Error(ErrorCode::PayloadKindMismatch, "expected a unified diff but the response has no hunks");
    }
  }
  return response;
}

void ScriptedGenerator::script(std::string fingerprint, std::string response) {
  std::lock_guard lock(mutex_);
  scripted_[std::move(fingerprint)] = std::move(response);
}

std::shared_ptr<ScriptedGenerator> ScriptedGenerator::from_file(const std::filesystem::path& path) {
  auto gen = std::make_shared<ScriptedGenerator>();
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("fingerprint") || !j.contains("text") ||
        !j["fingerprint"].is_string() || !j["text"].is_string()) {
      throw Error(ErrorCode::ParseError, "generator script line " + std::to_string(line_no), {.index = line_no});
    }
    gen->script(j["fingerprint"].get<std::string>(), j["text"].get<std::string>());
  }
  return gen;
}

std::string ScriptedGenerator::generate(const StructuredPrompt& prompt) {
  const auto fp = prompt_fingerprint(prompt);
  Fallback fallback;
  {
    std::lock_guard lock(mutex_);
    ++calls_;
    if (const auto it = scripted_.find(fp); it != scripted_.end()) return it->second;
    fallback = fallback_;
  }
  if (fallback) return fallback(prompt);
  throw Error(ErrorCode::ProviderError, "no scripted response for prompt " + fp, {.subject = fp});
}

std::size_t ScriptedGenerator::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::string generator_request_body(const StructuredPrompt& prompt) {
  json sections = json::array();
  for (const auto& s : prompt.text_sections) sections.push_back({{"label", s.label}, {"text", s.text}});
  json images = json::array();
  for (const auto& img : prompt.image_attachments) {
    images.push_back({{"label", img.label}, {"base64", base64_encode(encode_png(img.image))}});
  }
  return json{{"sections", sections}, {"images", images}, {"expected", expected_name(prompt.expected_output)}}
      .dump();
}

HttpGenerator::HttpGenerator(std::string endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

std::string HttpGenerator::generate(const StructuredPrompt& prompt) {
  const auto reply = detail::post_json(endpoint_, "/generate", generator_request_body(prompt), timeout_seconds_);
  if (reply.status != 200) detail::throw_provider_error(reply.status, reply.body);
  const json body = json::parse(reply.body, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("text") || !body["text"].is_string()) {
    detail::throw_provider_error(reply.status, reply.body);
  }
  return body["text"].get<std::string>();
}

std::shared_ptr<GeneratorProvider> make_generator(GeneratorConfig config) {
  if (config.kind == GeneratorConfig::Kind::RemoteHttp) {
    if (const char* env = std::getenv("REMIX_GEN_ENDPOINT"); env && *env) config.endpoint = env;
    if (!config.endpoint || config.endpoint->empty()) {
      throw Error(ErrorCode::InvalidConfig, "remote generator requires an endpoint");
    }
    if (!(config.timeout_seconds > 0.0)) throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
    return std::make_shared<HttpGenerator>(*config.endpoint, config.timeout_seconds);
  }
  if (config.script_path) return ScriptedGenerator::from_file(*config.script_path);
  return std::make_shared<ScriptedGenerator>();
}

session::CreatedBy created_by(RemixMode mode) {
  switch (mode) {
    case RemixMode::Chat: return session::CreatedBy::Chat;
    case RemixMode::ApplyGlobal: return session::CreatedBy::ApplyGlobal;
    case RemixMode::ApplyLocal: return session::CreatedBy::ApplyLocal;
  }
  return session::CreatedBy::Chat;
}

session::DesignVersion execute_remix(RemixRequest request, GeneratorProvider& generator,
                                     session::SessionStore& sessions, std::string_view session_id,
                                     std::size_t fuzzy_window) {
  const auto lease = sessions.acquire(session_id);
  const auto before = sessions.snapshot(session_id);
  request.current_code = before.current_document();

  auto staged = [](Stage stage, auto&& fn) {
    try {
      return fn();
    } catch (Error& e) {
      if (e.stage() == Stage::None) e.with_stage(stage);
      throw;
    }
  };

  const auto prompt = staged(Stage::Prompt, [&] { return assemble_prompt(request); });
  const auto raw = staged(Stage::Generate, [&] { return generator.generate(prompt); });
  const auto parsed = staged(Stage::Parse, [&] { return parse_generator_response(raw, prompt.expected_output); });

  std::string document;
  if (parsed.payload_kind == ExpectedOutput::FullDocument) {
    document = parsed.extracted_payload;
  } else {
    document = staged(Stage::Patch, [&] {
      return diffpatch::apply_patch(request.current_code, *parsed.diff, fuzzy_window).new_document;
    });
  }
  return sessions.commit_version(session_id, std::move(document), created_by(request.mode));
}

}  // namespace remix::engine
