#include "remix/diffpatch.hpp"

#include <charconv>
#include <optional>

#include "remix/error.hpp"

namespace remix::diffpatch {

std::vector<std::string> Hunk::old_side() const {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    if (l.tag != LineTag::Add) out.push_back(l.text);
  }
  return out;
}

std::vector<std::string> Hunk::new_side() const {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    if (l.tag != LineTag::Remove) out.push_back(l.text);
  }
  return out;
}

namespace {

constexpr std::string_view kNoNewline = "\\ No newline at end of file";

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (begin < text.size()) {
    const auto nl = text.find('\n', begin);
    if (nl == std::string_view::npos) {
      out.push_back(text.substr(begin));
      break;
    }
    out.push_back(text.substr(begin, nl - begin));
    begin = nl + 1;
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::optional<std::size_t> read_number(std::string_view s, std::size_t& pos) {
  std::size_t value = 0;
  const auto* first = s.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == first) return std::nullopt;
  pos += static_cast<std::size_t>(ptr - first);
  return value;
}

bool expect(std::string_view s, std::size_t& pos, std::string_view token) {
  if (s.substr(pos, token.size()) != token) return false;
  pos += token.size();
  return true;
}

// "@@ -a[,b] +c[,d] @@[ heading]"; an omitted length means 1.
std::optional<Hunk> parse_hunk_header(std::string_view line) {
  Hunk h;
  std::size_t pos = 0;
  if (!expect(line, pos, "@@ -")) return std::nullopt;
  const auto a = read_number(line, pos);
  if (!a) return std::nullopt;
  h.old_start = *a;
  h.old_len = 1;
  if (expect(line, pos, ",")) {
    const auto b = read_number(line, pos);
    if (!b) return std::nullopt;
    h.old_len = *b;
  }
  if (!expect(line, pos, " +")) return std::nullopt;
  const auto c = read_number(line, pos);
  if (!c) return std::nullopt;
  h.new_start = *c;
  h.new_len = 1;
  if (expect(line, pos, ",")) {
    const auto d = read_number(line, pos);
    if (!d) return std::nullopt;
    h.new_len = *d;
  }
  if (!expect(line, pos, " @@")) return std::nullopt;
  if (pos < line.size() && line[pos] != ' ') return std::nullopt;
  if (h.old_start == 0 && h.old_len != 0) return std::nullopt;
  if (h.new_start == 0 && h.new_len != 0) return std::nullopt;
  return h;
}

bool is_file_header(const std::vector<std::string_view>& lines, std::size_t i) {
  return starts_with(lines[i], "--- ") && i + 1 < lines.size() && starts_with(lines[i + 1], "+++ ");
}

// 0-based index of the first old-side line (or the insertion point).
std::size_t block_start(const Hunk& h) { return h.old_len == 0 ? h.old_start : h.old_start - 1; }

}  // namespace

UnifiedDiff parse_unified_diff(std::string_view text) {
  const auto lines = split_lines(text);
  UnifiedDiff diff;
  std::size_t file_headers = 0;
  std::size_t git_headers = 0;

  std::size_t i = 0;
  while (i < lines.size()) {
    const auto line = lines[i];
    if (starts_with(line, "diff --git ") && ++git_headers > 1) {
      throw Error(ErrorCode::MultiFileUnsupported, "diff touches more than one file");
    }
    if (is_file_header(lines, i)) {
      if (++file_headers > 1) throw Error(ErrorCode::MultiFileUnsupported, "diff touches more than one file");
      if (diff.hunks.empty()) {
        diff.preamble.emplace_back(lines[i]);
        diff.preamble.emplace_back(lines[i + 1]);
      }
      i += 2;
      continue;
    }
    if (!starts_with(line, "@@")) {
      // Text before the first hunk is preamble; stray text after hunks is ignored.
      if (diff.hunks.empty()) diff.preamble.emplace_back(line);
      ++i;
      continue;
    }

    auto header = parse_hunk_header(line);
    if (!header) {
      throw Error(ErrorCode::MalformedHeader, "malformed hunk header at line " + std::to_string(i + 1),
                  {.index = i + 1});
    }
    Hunk hunk = std::move(*header);
    const auto hunk_index = diff.hunks.size();
    std::size_t old_seen = 0;
    std::size_t new_seen = 0;
    std::size_t j = i + 1;
    while (j < lines.size()) {
      const auto body = lines[j];
      if (starts_with(body, "\\")) {
        if (!hunk.lines.empty()) hunk.lines.back().no_newline = true;
        ++j;
        continue;
      }
      const bool satisfied = old_seen == hunk.old_len && new_seen == hunk.new_len;
      if (starts_with(body, "@@")) break;
      if (satisfied) {
        if (is_file_header(lines, j)) break;
        if (body.empty()) {
          // Blank lines trailing a complete hunk are padding, not context.
          std::size_t k = j;
          while (k < lines.size() && lines[k].empty()) ++k;
          if (k == lines.size() || starts_with(lines[k], "@@") || is_file_header(lines, k)) break;
        } else if (body[0] != ' ' && body[0] != '+' && body[0] != '-') {
          break;
        }
      }
      HunkLine hl;
      if (body.empty()) {
        hl = {LineTag::Context, "", false};
      } else if (body[0] == ' ') {
        hl = {LineTag::Context, std::string(body.substr(1)), false};
      } else if (body[0] == '-') {
        hl = {LineTag::Remove, std::string(body.substr(1)), false};
      } else if (body[0] == '+') {
        hl = {LineTag::Add, std::string(body.substr(1)), false};
      } else {
        break;
      }
      if (hl.tag != LineTag::Add) ++old_seen;
      if (hl.tag != LineTag::Remove) ++new_seen;
      hunk.lines.push_back(std::move(hl));
      ++j;
    }
    if (hunk.lines.empty() || old_seen != hunk.old_len || new_seen != hunk.new_len) {
      throw Error(ErrorCode::LineCountMismatch,
                  "hunk " + std::to_string(hunk_index) + " header declares -" + std::to_string(hunk.old_len) +
                      " +" + std::to_string(hunk.new_len) + " but body has -" + std::to_string(old_seen) + " +" +
                      std::to_string(new_seen),
                  {.index = hunk_index});
    }
    if (!diff.hunks.empty()) {
      const auto& prev = diff.hunks.back();
      if (block_start(hunk) < block_start(prev) + prev.old_len) {
        throw Error(ErrorCode::OverlappingHunks,
                    "hunk " + std::to_string(hunk_index) + " overlaps or precedes hunk " +
                        std::to_string(hunk_index - 1),
                    {.index = hunk_index});
      }
    }
    diff.hunks.push_back(std::move(hunk));
    i = j;
  }
  return diff;
}

std::string render_unified_diff(const UnifiedDiff& diff) {
  std::string out;
  for (const auto& line : diff.preamble) {
    out += line;
    out += '\n';
  }
  for (const auto& h : diff.hunks) {
    out += "@@ -" + std::to_string(h.old_start) + "," + std::to_string(h.old_len) + " +" +
           std::to_string(h.new_start) + "," + std::to_string(h.new_len) + " @@\n";
    for (const auto& l : h.lines) {
      out += l.tag == LineTag::Context ? ' ' : (l.tag == LineTag::Remove ? '-' : '+');
      out += l.text;
      out += '\n';
      if (l.no_newline) {
        out += kNoNewline;
        out += '\n';
      }
    }
  }
  return out;
}

namespace {

struct Document {
  std::vector<std::string> lines;
  bool final_newline = true;

  static Document split(std::string_view text) {
    Document doc;
    for (auto l : split_lines(text)) doc.lines.emplace_back(l);
    doc.final_newline = text.empty() || text.back() == '\n';
    return doc;
  }

  std::string join() const {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      out += lines[i];
      if (i + 1 < lines.size() || final_newline) out += '\n';
    }
    return out;
  }
};

bool block_equals(const std::vector<std::string>& doc, long pos, const std::vector<std::string>& block) {
  for (std::size_t k = 0; k < block.size(); ++k) {
    if (doc[static_cast<std::size_t>(pos) + k] != block[k]) return false;
  }
  return true;
}

// Newline flag of the last line on the side described by `keep`.
std::optional<bool> last_line_no_newline(const Hunk& h, LineTag excluded) {
  for (auto it = h.lines.rbegin(); it != h.lines.rend(); ++it) {
    if (it->tag != excluded) return it->no_newline;
  }
  return std::nullopt;
}

Error rejected(std::size_t hunk_index, std::string_view reason) {
  return Error(ErrorCode::HunkRejected,
               "hunk " + std::to_string(hunk_index) + " rejected: " + std::string(reason),
               {.index = hunk_index, .field = std::string(reason)});
}

}  // namespace

PatchOutcome apply_patch(std::string_view document, const UnifiedDiff& diff, std::size_t window) {
  Document work = Document::split(document);
  PatchOutcome outcome;
  long delta = 0;
  long floor = 0;

  for (std::size_t hi = 0; hi < diff.hunks.size(); ++hi) {
    const auto& hunk = diff.hunks[hi];
    const auto old_side = hunk.old_side();
    const auto new_side = hunk.new_side();
    const bool old_ends_without_newline = last_line_no_newline(hunk, LineTag::Add).value_or(false);
    const long size = static_cast<long>(work.lines.size());
    const long len = static_cast<long>(old_side.size());
    const long expected = static_cast<long>(block_start(hunk)) + delta;

    auto matches = [&](long pos) {
      if (pos < floor || pos + len > size) return false;
      if (old_ends_without_newline && (pos + len != size || work.final_newline)) return false;
      return block_equals(work.lines, pos, old_side);
    };

    std::optional<long> found;
    if (matches(expected)) {
      found = expected;
    } else {
      for (long d = 1; d <= static_cast<long>(window) && !found; ++d) {
        const bool below = matches(expected - d);
        const bool above = matches(expected + d);
        if (below && above) throw rejected(hi, "AMBIGUOUS_MATCH");
        if (below) found = expected - d;
        if (above) found = expected + d;
      }
    }
    if (!found) {
      const long new_len = static_cast<long>(new_side.size());
      if (new_len > 0 && new_side != old_side && expected >= 0 && expected + new_len <= size &&
          block_equals(work.lines, expected, new_side)) {
        throw Error(ErrorCode::AlreadyApplied, "hunk " + std::to_string(hi) + " is already applied",
                    {.index = hi});
      }
      throw rejected(hi, "NO_MATCH");
    }

    const long pos = *found;
    const bool touches_end = pos + len == size;
    auto first = work.lines.begin() + pos;
    work.lines.erase(first, first + len);
    work.lines.insert(work.lines.begin() + pos, new_side.begin(), new_side.end());
    if (touches_end) {
      if (const auto flag = last_line_no_newline(hunk, LineTag::Remove); flag && !new_side.empty()) {
        work.final_newline = !*flag;
      } else if (new_side.empty() && pos > 0) {
        work.final_newline = true;
      }
    }

    outcome.offsets.push_back(pos - expected);
    floor = pos + static_cast<long>(new_side.size());
    delta += static_cast<long>(new_side.size()) - len;
    ++outcome.applied_hunks;
  }
  outcome.new_document = work.join();
  return outcome;
}

}  // namespace remix::diffpatch
