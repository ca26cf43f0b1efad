#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace remix::preview {

inline constexpr std::string_view kIdAttribute = "data-remix-id";

/// Style + script block that highlights hovered elements and posts the
/// clicked element's data-remix-id to the parent frame. Injected verbatim
/// before </head>, else before </body>, else appended.
std::string_view selection_block();

/// Adds data-remix-id="N" right after the tag name of every start tag, in
/// document order (depth-first, zero-based), and injects selection_block().
/// Comments, doctypes, end tags and raw-text element bodies (script, style,
/// textarea, title) are skipped. Instrumenting an instrumented document is a
/// no-op.
std::string instrument(std::string_view document);

/// Exact inverse of instrument() for documents that carried no
/// instrumentation before.
std::string strip(std::string_view document);

/// Number of elements instrument() would tag.
std::size_t element_count(std::string_view document);

/// Source text of the start tag of the element instrument() would tag with
/// `id`, e.g. `<button class="cta">`.
std::optional<std::string> element_start_tag(std::string_view document, std::string_view id);

}  // namespace remix::preview
