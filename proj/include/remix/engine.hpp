#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "remix/annotation.hpp"
#include "remix/corpus.hpp"
#include "remix/diffpatch.hpp"
#include "remix/image.hpp"
#include "remix/session.hpp"

namespace remix::engine {

enum class RemixMode { Chat, ApplyGlobal, ApplyLocal };
enum class ExpectedOutput { FullDocument, DiffPatch };

std::string_view expected_name(ExpectedOutput e);  // "full" | "diff"

/// Fixed section labels. Prompt wording is versioned with kPromptVersion.
inline constexpr std::string_view kQuerySection = "QUERY";
inline constexpr std::string_view kCurrentCodeSection = "CURRENT_CODE";
inline constexpr std::string_view kTargetComponentSection = "TARGET_COMPONENT";
inline constexpr std::string_view kAnnotationBBoxSection = "ANNOTATION_BBOX";
inline constexpr std::string_view kInstructionsSection = "INSTRUCTIONS";
inline constexpr std::string_view kReferenceImage = "reference";
inline constexpr std::string_view kPromptVersion = "1";

inline constexpr int kStrokeWidthPx = 3;
inline constexpr Rgb kStrokeColor{255, 0, 0};

struct Reference {
  corpus::UiExample example;
  Image screenshot;
};

struct RemixRequest {
  RemixMode mode = RemixMode::Chat;
  std::string query;
  std::string current_code;
  std::optional<Reference> reference;
  std::optional<Annotation> annotation;
  std::optional<std::string> target_component_id;
};

struct PromptSection {
  std::string label;
  std::string text;

  friend bool operator==(const PromptSection&, const PromptSection&) = default;
};

struct PromptImage {
  std::string label;
  Image image;

  friend bool operator==(const PromptImage&, const PromptImage&) = default;
};

struct StructuredPrompt {
  std::vector<PromptSection> text_sections;
  std::vector<PromptImage> image_attachments;
  ExpectedOutput expected_output = ExpectedOutput::DiffPatch;

  const PromptSection* section(std::string_view label) const;
};

/// Throws INVALID_REQUEST when the mode's requirements are not met (CHAT
/// with a reference, APPLY without one, APPLY_LOCAL without a target
/// component) and EMPTY_QUERY for a blank query.
void validate(const RemixRequest& request);

StructuredPrompt assemble_prompt(const RemixRequest& request);

/// Copy of `screenshot` with every stroke drawn as a kStrokeWidthPx-wide
/// opaque red polyline. Normalized (x, y) maps to pixel (x*(w-1), y*(h-1)).
Image composite_annotation(const Image& screenshot, const Annotation& annotation);

/// Stable 64-bit fingerprint of a prompt (sections, images, expected
/// output), rendered as 16 hex digits.
std::string prompt_fingerprint(const StructuredPrompt& prompt);

struct GeneratorResponse {
  std::string raw_text;
  std::string extracted_payload;
  ExpectedOutput payload_kind = ExpectedOutput::DiffPatch;
  std::optional<diffpatch::UnifiedDiff> diff;
};

/// First fenced code block if present, else the trimmed text. Throws
/// NO_PAYLOAD or PAYLOAD_KIND_MISMATCH.
GeneratorResponse parse_generator_response(std::string_view raw, ExpectedOutput expected);

class GeneratorProvider {
 public:
  virtual ~GeneratorProvider() = default;
  virtual std::string generate(const StructuredPrompt& prompt) = 0;
};

/// Offline generator: responses keyed by prompt_fingerprint(), with an
/// optional fallback callable for prompts that have no scripted entry.
class ScriptedGenerator final : public GeneratorProvider {
 public:
  using Fallback = std::function<std::string(const StructuredPrompt&)>;

  ScriptedGenerator() = default;
  explicit ScriptedGenerator(Fallback fallback) : fallback_(std::move(fallback)) {}

  void script(std::string fingerprint, std::string response);
  /// Line-delimited {"fingerprint": "...", "text": "..."} records.
  static std::shared_ptr<ScriptedGenerator> from_file(const std::filesystem::path& path);

  std::string generate(const StructuredPrompt& prompt) override;
  std::size_t calls() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> scripted_;
  Fallback fallback_;
  std::size_t calls_ = 0;
};

/// POST {endpoint}/generate with {"sections","images","expected"};
/// expects {"text": "..."}.
class HttpGenerator final : public GeneratorProvider {
 public:
  HttpGenerator(std::string endpoint, double timeout_seconds);
  std::string generate(const StructuredPrompt& prompt) override;

 private:
  std::string endpoint_;
  double timeout_seconds_;
};

inline constexpr double kDefaultGeneratorTimeoutSeconds = 120.0;

struct GeneratorConfig {
  enum class Kind { RemoteHttp, Scripted } kind = Kind::Scripted;
  std::optional<std::string> endpoint;
  std::optional<std::string> script_path;
  double timeout_seconds = kDefaultGeneratorTimeoutSeconds;
};

/// REMIX_GEN_ENDPOINT overrides config.endpoint for the remote kind.
std::shared_ptr<GeneratorProvider> make_generator(GeneratorConfig config);

/// Request body sent by HttpGenerator, exposed for wire-contract tests.
std::string generator_request_body(const StructuredPrompt& prompt);

session::CreatedBy created_by(RemixMode mode);

/// One remix turn against a session: prompt, generate, parse, then either
/// replace the document (APPLY_GLOBAL) or patch it (CHAT, APPLY_LOCAL).
/// Commits exactly one version on success and nothing on failure. The
/// request's current_code is taken from the session. Errors carry the
/// stage at which they occurred.
session::DesignVersion execute_remix(RemixRequest request, GeneratorProvider& generator,
                                     session::SessionStore& sessions, std::string_view session_id,
                                     std::size_t fuzzy_window = diffpatch::kDefaultFuzzyWindow);

}  // namespace remix::engine
