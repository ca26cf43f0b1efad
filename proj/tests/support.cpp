#include "support.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "remix/util.hpp"

namespace testing_support {

using remix::Image;
using remix::Rgb;

TempDir::TempDir() {
  static std::mt19937_64 rng(std::random_device{}());
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = fs::temp_directory_path() / ("remix-test-" + std::to_string(rng() % 1000000000ULL));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Image random_screen(std::mt19937_64& rng, int width, int height, int border) {
  auto channel = [&] { return static_cast<std::uint8_t>(60 + rng() % 196); };
  Image img(width, height, Rgb{channel(), channel(), channel()});
  const int inner_w = width - 2 * border;
  const int inner_h = height - 2 * border;
  for (int r = 0; r < 4; ++r) {
    const int w = 1 + static_cast<int>(rng() % std::max(1, inner_w / 2));
    const int h = 1 + static_cast<int>(rng() % std::max(1, inner_h / 2));
    const int x0 = border + static_cast<int>(rng() % std::max(1, inner_w - w + 1));
    const int y0 = border + static_cast<int>(rng() % std::max(1, inner_h - h + 1));
    const Rgb c{channel(), channel(), channel()};
    for (int y = y0; y < y0 + h; ++y) {
      for (int x = x0; x < x0 + w; ++x) img.set(x, y, c);
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x < border || y < border || x >= width - border || y >= height - border) img.set(x, y, Rgb{0, 0, 0});
    }
  }
  return img;
}

remix::corpus::UiExample make_example(const std::string& id, const std::string& image_path,
                                      remix::corpus::ExampleKind kind) {
  remix::corpus::UiExample e;
  e.example_id = id;
  e.image_path = image_path;
  e.kind = kind;
  e.metadata.app_name = "App " + id;
  e.metadata.developer = "Dev " + id.substr(0, 3);
  e.metadata.rating = 4.5;
  e.metadata.download_count = 1000;
  e.metadata.comment_count = 12;
  e.metadata.category = "Food";
  return e;
}

fs::path write_fixture_corpus(const fs::path& dir, std::size_t n_screens, std::size_t n_components,
                              std::uint64_t seed, int border) {
  std::mt19937_64 rng(seed);
  std::string manifest;
  auto add = [&](const std::string& id, remix::corpus::ExampleKind kind, int w, int h) {
    const std::string rel = "raw/" + id + ".png";
    fs::create_directories(dir / "raw");
    remix::save_png(random_screen(rng, w, h, border), dir / rel);
    manifest += remix::corpus::to_line(make_example(id, rel, kind)) + "\n";
  };
  char id[32];
  for (std::size_t i = 0; i < n_screens; ++i) {
    std::snprintf(id, sizeof id, "screen-%03zu", i);
    add(id, remix::corpus::ExampleKind::WholeScreen, 36, 64);
  }
  for (std::size_t i = 0; i < n_components; ++i) {
    std::snprintf(id, sizeof id, "comp-%03zu", i);
    add(id, remix::corpus::ExampleKind::ComponentCrop, 32, 12);
  }
  write_text(dir / "manifest.jsonl", manifest);
  return dir / "manifest.jsonl";
}

std::string reference_diff(const std::string& a, const std::string& b, int context) {
  TempDir tmp;
  write_text(tmp / "a", a);
  write_text(tmp / "b", b);
  const std::string cmd = "/usr/bin/diff -U" + std::to_string(context) + " '" + (tmp / "a").string() + "' '" +
                          (tmp / "b").string() + "'";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot run diff");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  if (status == -1 || WEXITSTATUS(status) > 1) throw std::runtime_error("diff failed");
  return out;
}

namespace {

std::string token(std::mt19937_64& rng) {
  static const char* words[] = {"div", "span", "button", "card", "nav", "header", "item", "label", "icon", "row"};
  char hex[20];
  std::snprintf(hex, sizeof hex, "%08llx", static_cast<unsigned long long>(rng() & 0xffffffffULL));
  return std::string(words[rng() % 10]) + "-" + hex;
}

}  // namespace

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::string random_document(std::mt19937_64& rng, std::size_t lines, bool final_newline) {
  std::string out;
  for (std::size_t i = 0; i < lines; ++i) {
    out += "  <p class=\"" + token(rng) + "\">line " + std::to_string(i) + "</p>";
    if (i + 1 < lines || final_newline) out += "\n";
  }
  return out;
}

std::string random_edit(std::mt19937_64& rng, const std::string& document) {
  auto lines = split_lines(document);
  bool final_newline = document.empty() || document.back() == '\n';
  const int ops = 1 + static_cast<int>(rng() % 4);
  for (int op = 0; op < ops; ++op) {
    const auto pos = lines.empty() ? 0 : rng() % (lines.size() + 1);
    switch (rng() % 3) {
      case 0: {
        const auto count = 1 + rng() % 3;
        for (std::size_t k = 0; k < count; ++k) {
          lines.insert(lines.begin() + static_cast<long>(std::min(pos, lines.size())), "  <b>" + token(rng) + "</b>");
        }
        break;
      }
      case 1: {
        const auto count = std::min<std::size_t>(1 + rng() % 3, lines.size() - std::min(pos, lines.size()));
        lines.erase(lines.begin() + static_cast<long>(pos), lines.begin() + static_cast<long>(pos + count));
        break;
      }
      default:
        if (pos < lines.size()) lines[pos] = "  <i>" + token(rng) + "</i>";
        break;
    }
  }
  if (rng() % 10 == 0) final_newline = !final_newline;
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size() || final_newline) out += "\n";
  }
  return out;
}

PlantedStack planted_stack(const fs::path& dir, const std::vector<PlantedEntry>& entries, std::size_t dimension) {
  PlantedStack s;
  std::vector<remix::corpus::UiExample> records;
  s.index = std::make_shared<remix::index::VectorIndex>(dimension);
  fs::create_directories(dir / "img");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string rel = "img/" + std::to_string(i) + ".png";
    const auto shade = static_cast<std::uint8_t>(40 + (i * 37) % 200);
    remix::save_png(Image(4, 4, Rgb{shade, 128, 200}), dir / rel);
    records.push_back(make_example(e.example_id, rel, e.kind));
    s.index->add({e.example_id, e.vector});
  }
  s.corpus = std::make_shared<remix::corpus::CorpusManifest>(std::move(records), dir);
  s.provider = std::make_shared<remix::embedding::MockEmbeddingProvider>(dimension);
  s.retriever = std::make_shared<remix::retrieval::Retriever>(s.index, s.corpus, s.provider);
  return s;
}

std::vector<double> orthogonal_unit(const remix::embedding::EmbeddingVector& q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(q.dimension());
  for (auto& x : v) x = normal(rng);
  double along = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) along += v[i] * q[i];
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= along * q[i];
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

remix::embedding::EmbeddingVector rotate_towards(const remix::embedding::EmbeddingVector& q,
                                                 const std::vector<double>& u, double theta) {
  std::vector<double> v(q.dimension());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(theta) * q[i] + std::sin(theta) * u[i];
  return remix::embedding::normalize(std::span<const double>(v));
}

std::string replace_line_diff(const std::string& document, std::size_t line, const std::string& replacement) {
  const auto lines = split_lines(document);
  const std::size_t c0 = line >= 2 ? line - 2 : 0;
  const std::size_t c1 = std::min(lines.size() - 1, line + 2);
  const std::size_t len = c1 - c0 + 1;
  std::string out = "--- a/index.html\n+++ b/index.html\n";
  out += "@@ -" + std::to_string(c0 + 1) + "," + std::to_string(len) + " +" + std::to_string(c0 + 1) + "," +
         std::to_string(len) + " @@\n";
  for (std::size_t i = c0; i <= c1; ++i) {
    if (i == line) {
      out += "-" + lines[i] + "\n";
      out += "+" + replacement + "\n";
    } else {
      out += " " + lines[i] + "\n";
    }
  }
  return out;
}

std::string create_document_diff(const std::string& document) {
  const auto lines = split_lines(document);
  std::string out = "@@ -0,0 +1," + std::to_string(lines.size()) + " @@\n";
  for (const auto& l : lines) out += "+" + l + "\n";
  return out;
}

std::string fenced(const std::string& payload, const std::string& lang) {
  return "Here is the change.\n```" + lang + "\n" + payload + (payload.empty() || payload.back() == '\n' ? "" : "\n") +
         "```\nLet me know if you need anything else.\n";
}

std::string random_html(std::mt19937_64& rng) {
  static const char* tags[] = {"div", "p", "span", "button", "section", "img", "input", "ul", "li", "a"};
  std::string out = "<!DOCTYPE html>\n<html>\n<head><title>t <b>x</b></title>\n";
  if (rng() % 2) out += "<style>div > p { color: red; }</style>\n";
  out += "</head>\n<body>\n";
  const int n = 1 + static_cast<int>(rng() % 25);
  for (int i = 0; i < n; ++i) {
    const std::string tag = tags[rng() % 10];
    switch (rng() % 5) {
      case 0:
        out += "<!-- <" + tag + "> hidden -->\n";
        break;
      case 1:
        out += "<" + tag + " class=\"c" + std::to_string(i) + "\" title='a > b'/>\n";
        break;
      case 2:
        out += "<script>if (a < b) { document.write('<div>'); }</script>\n";
        break;
      default:
        out += "<" + tag + (rng() % 2 ? " id=\"e" + std::to_string(i) + "\"" : "") + ">text " +
               std::to_string(i) + "</" + tag + ">\n";
    }
  }
  out += "</body>\n</html>";
  if (rng() % 2) out += "\n";
  return out;
}

}  // namespace testing_support
