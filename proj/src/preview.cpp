#include "remix/preview.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace remix::preview {

namespace {

constexpr std::string_view kBlock =
    "<style data-remix-instrumentation>"
    "[data-remix-id]:hover{outline:1px dashed #1e88e5;cursor:pointer}"
    ".remix-selected{outline:2px solid #e53935 !important}"
    "</style>"
    "<script data-remix-instrumentation>"
    "(function(){var sel=null;"
    "document.addEventListener('click',function(ev){"
    "var el=ev.target&&ev.target.closest?ev.target.closest('[data-remix-id]'):null;"
    "if(sel){sel.classList.remove('remix-selected');}"
    "sel=(el&&el!==document.documentElement&&el!==document.body)?el:null;"
    "if(sel){sel.classList.add('remix-selected');ev.preventDefault();ev.stopPropagation();}"
    "window.parent.postMessage({type:'remix-select',id:sel?sel.getAttribute('data-remix-id'):null},'*');"
    "},true);})();"
    "</script>";

constexpr std::array<std::string_view, 4> kRawText = {"script", "style", "textarea", "title"};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.';
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool eq = true;
    for (std::size_t k = 0; k < needle.size() && eq; ++k) {
      eq = std::tolower(static_cast<unsigned char>(hay[i + k])) ==
           std::tolower(static_cast<unsigned char>(needle[k]));
    }
    if (eq) return i;
  }
  return std::string_view::npos;
}

struct StartTag {
  std::size_t begin;     // '<'
  std::size_t name_end;  // first byte after the tag name
  std::size_t end;       // one past '>'
};

// Calls on_tag(StartTag) for every start tag in document order.
template <typename F>
void scan_start_tags(std::string_view doc, F&& on_tag) {
  const std::size_t n = doc.size();
  auto skip_past = [&](std::string_view token, std::size_t from) {
    const auto j = doc.find(token, from);
    return j == std::string_view::npos ? n : j + token.size();
  };
  std::size_t i = 0;
  while (i < n) {
    if (doc[i] != '<' || i + 1 >= n) {
      ++i;
      continue;
    }
    const char next = doc[i + 1];
    if (doc.substr(i, 4) == "<!--") {
      i = skip_past("-->", i + 4);
      continue;
    }
    if (next == '!' || next == '?' || next == '/') {
      i = skip_past(">", i + 1);
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(next))) {
      ++i;
      continue;
    }

    std::size_t name_end = i + 1;
    while (name_end < n && is_name_char(doc[name_end])) ++name_end;
    // Quotes only open attribute values, i.e. right after '='.
    std::size_t k = name_end;
    char quote = 0;
    char prev = 0;
    while (k < n) {
      const char c = doc[k];
      if (quote) {
        if (c == quote) quote = 0;
      } else if ((c == '"' || c == '\'') && prev == '=') {
        quote = c;
      } else if (c == '>') {
        break;
      }
      if (!std::isspace(static_cast<unsigned char>(c))) prev = c;
      ++k;
    }
    const std::size_t end = k < n ? k + 1 : n;
    on_tag(StartTag{i, name_end, end});

    const auto name = lower(doc.substr(i + 1, name_end - i - 1));
    const bool self_closing = end >= 2 && doc[end - 2] == '/';
    i = end;
    if (!self_closing && std::find(kRawText.begin(), kRawText.end(), name) != kRawText.end()) {
      const auto close = find_ci(doc, "</" + name, i);
      i = close == std::string_view::npos ? n : close;
    }
  }
}

// Length of a ` data-remix-id="digits"` run starting at pos, or 0.
std::size_t id_attribute_length(std::string_view doc, std::size_t pos) {
  constexpr std::string_view kPrefix = " data-remix-id=\"";
  if (doc.substr(pos, kPrefix.size()) != kPrefix) return 0;
  std::size_t k = pos + kPrefix.size();
  const auto digits_begin = k;
  while (k < doc.size() && std::isdigit(static_cast<unsigned char>(doc[k]))) ++k;
  if (k == digits_begin || k >= doc.size() || doc[k] != '"') return 0;
  return k + 1 - pos;
}

std::string tag_elements(std::string_view doc) {
  std::string out;
  out.reserve(doc.size() + doc.size() / 4);
  std::size_t copied = 0;
  std::size_t next_id = 0;
  scan_start_tags(doc, [&](const StartTag& t) {
    out.append(doc.substr(copied, t.name_end - copied));
    out.append(" ");
    out.append(kIdAttribute);
    out.append("=\"" + std::to_string(next_id++) + "\"");
    copied = t.name_end;
  });
  out.append(doc.substr(copied));
  return out;
}

}  // namespace

std::string_view selection_block() { return kBlock; }

std::string strip(std::string_view document) {
  std::string doc(document);
  if (const auto at = doc.find(kBlock); at != std::string::npos) doc.erase(at, kBlock.size());

  std::string out;
  out.reserve(doc.size());
  std::size_t copied = 0;
  scan_start_tags(doc, [&](const StartTag& t) {
    const auto len = id_attribute_length(doc, t.name_end);
    if (len == 0) return;
    out.append(doc, copied, t.name_end - copied);
    copied = t.name_end + len;
  });
  out.append(doc, copied, std::string::npos);
  return out;
}

std::string instrument(std::string_view document) {
  auto out = tag_elements(strip(document));
  auto at = find_ci(out, "</head", 0);
  if (at == std::string::npos) at = find_ci(out, "</body", 0);
  if (at == std::string::npos) at = out.size();
  out.insert(at, kBlock);
  return out;
}

std::size_t element_count(std::string_view document) {
  std::size_t count = 0;
  scan_start_tags(strip(document), [&](const StartTag&) { ++count; });
  return count;
}

std::optional<std::string> element_start_tag(std::string_view document, std::string_view id) {
  std::size_t wanted = 0;
  for (char c : id) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    wanted = wanted * 10 + static_cast<std::size_t>(c - '0');
  }
  if (id.empty()) return std::nullopt;
  const auto doc = strip(document);
  std::optional<std::string> found;
  std::size_t seen = 0;
  scan_start_tags(doc, [&](const StartTag& t) {
    if (seen++ == wanted) found = doc.substr(t.begin, t.end - t.begin);
  });
  return found;
}

}  // namespace remix::preview
