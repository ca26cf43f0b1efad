#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace remix::diffpatch {

enum class LineTag { Context, Remove, Add };

struct HunkLine {
  LineTag tag = LineTag::Context;
  std::string text;
  /// Set when the line was followed by "\ No newline at end of file".
  bool no_newline = false;

  friend bool operator==(const HunkLine&, const HunkLine&) = default;
};

struct Hunk {
  std::size_t old_start = 0;
  std::size_t old_len = 0;
  std::size_t new_start = 0;
  std::size_t new_len = 0;
  std::vector<HunkLine> lines;

  /// Context + Remove lines, in order.
  std::vector<std::string> old_side() const;
  /// Context + Add lines, in order.
  std::vector<std::string> new_side() const;

  friend bool operator==(const Hunk&, const Hunk&) = default;
};

struct UnifiedDiff {
  std::vector<std::string> preamble;
  std::vector<Hunk> hunks;

  friend bool operator==(const UnifiedDiff&, const UnifiedDiff&) = default;
};

/// Parses single-document unified diff text. File headers are optional;
/// text with no hunk headers yields a diff with zero hunks.
///
/// Throws MALFORMED_HEADER (1-based line number), LINE_COUNT_MISMATCH
/// (0-based hunk index), OVERLAPPING_HUNKS or MULTI_FILE_UNSUPPORTED.
UnifiedDiff parse_unified_diff(std::string_view text);

/// Canonical text form; parse_unified_diff(render_unified_diff(d)) == d.
std::string render_unified_diff(const UnifiedDiff& diff);

inline constexpr std::size_t kDefaultFuzzyWindow = 20;

struct PatchOutcome {
  std::string new_document;
  std::size_t applied_hunks = 0;
  std::vector<long> offsets;
};

/// Applies every hunk or none. A hunk's old side is matched exactly at its
/// expected line, else at the nearest offset within +-window; a match at
/// both +d and -d for the smallest d is AMBIGUOUS_MATCH. Throws
/// HUNK_REJECTED (reason in detail.field: NO_MATCH | AMBIGUOUS_MATCH) or
/// ALREADY_APPLIED; the caller's document is untouched either way.
PatchOutcome apply_patch(std::string_view document, const UnifiedDiff& diff,
                         std::size_t window = kDefaultFuzzyWindow);

}  // namespace remix::diffpatch
