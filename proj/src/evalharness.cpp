#include "remix/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "remix/error.hpp"
#include "remix/util.hpp"

namespace remix::eval {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view intent_name(IntentType type) {
  switch (type) {
    case IntentType::ColorTheme: return "color_theme";
    case IntentType::Layout: return "layout";
    case IntentType::UiCategory: return "ui_category";
    case IntentType::UiComponent: return "ui_component";
  }
  return "";
}

std::optional<IntentType> parse_intent(std::string_view name) {
  for (auto t : kIntentTypes) {
    if (intent_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view intent_label(IntentType type) {
  switch (type) {
    case IntentType::ColorTheme: return "Color Theme";
    case IntentType::Layout: return "Layout";
    case IntentType::UiCategory: return "UI Category";
    case IntentType::UiComponent: return "UI Component";
  }
  return "";
}

std::string_view gain_name(Gain gain) { return gain == Gain::Linear ? "linear" : "exponential"; }

int hit_at_k(std::span<const int> grades, std::size_t k, int threshold) {
  if (k == 0) throw Error(ErrorCode::InvalidRequest, "k must be at least 1");
  const auto n = std::min(k, grades.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (grades[i] >= threshold) return 1;
  }
  return 0;
}

namespace {

double gain_of(int grade, Gain gain) {
  return gain == Gain::Linear ? static_cast<double>(grade) : std::exp2(static_cast<double>(grade)) - 1.0;
}

double dcg(std::span<const int> grades, std::size_t n, Gain gain) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += gain_of(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);
  return sum;
}

}  // namespace

double ndcg_at_k(std::span<const int> grades, std::size_t k, Gain gain) {
  if (k == 0) throw Error(ErrorCode::InvalidRequest, "k must be at least 1");
  for (std::size_t i = 0; i < grades.size(); ++i) {
    if (grades[i] < 0) {
      throw Error(ErrorCode::NegativeGrade, "grade at rank " + std::to_string(i + 1) + " is negative", {.index = i});
    }
  }
  const auto n = std::min(k, grades.size());
  std::vector<int> ideal(grades.begin(), grades.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg(ideal, n, gain);
  if (idcg == 0.0) return 0.0;
  return dcg(grades, n, gain) / idcg;
}

const TemplateSet& default_templates() {
  static const TemplateSet set = [] {
    TemplateSet s;
    s.templates[IntentType::ColorTheme] = {
        "{color} themed {category} app screen",
        "{category} app with a {color} color scheme",
    };
    s.templates[IntentType::Layout] = {
        "{layout} layout for a {category} app",
        "{screen} screen arranged as a {layout}",
    };
    s.templates[IntentType::UiCategory] = {
        "{screen} screen of a {category} app",
        "{category} app home page",
    };
    s.templates[IntentType::UiComponent] = {
        "{style} {component}",
        "{component} in a {category} app",
    };
    s.slots["color"] = {"dark", "light", "blue", "green", "red", "orange", "purple", "pastel", "monochrome"};
    s.slots["category"] = {"food", "travel", "news", "finance", "fitness", "music", "shopping", "education"};
    s.slots["layout"] = {"grid", "list", "card stack", "tabbed", "carousel", "split view", "masonry"};
    s.slots["screen"] = {"login", "settings", "profile", "checkout", "search", "onboarding", "cart"};
    s.slots["component"] = {"search bar", "bottom navigation bar", "floating action button", "toggle switch",
                            "date picker", "product card", "progress bar"};
    s.slots["style"] = {"rounded", "flat", "outlined", "minimal", "colorful"};
    return s;
  }();
  return set;
}

std::vector<std::string> expand_templates(const TemplateSet& set, IntentType type) {
  std::vector<std::string> out;
  const auto it = set.templates.find(type);
  if (it == set.templates.end()) return out;
  for (const auto& tmpl : it->second) {
    // Split into literal pieces and slot names.
    std::vector<std::string> literals{""};
    std::vector<std::string> slot_names;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
      const auto close = tmpl[i] == '{' ? tmpl.find('}', i) : std::string::npos;
      if (close == std::string::npos) {
        literals.back().push_back(tmpl[i]);
        continue;
      }
      const auto name = tmpl.substr(i + 1, close - i - 1);
      const auto values = set.slots.find(name);
      if (values == set.slots.end() || values->second.empty()) {
        throw Error(ErrorCode::EmptyTemplateSet,
                    "template slot {" + name + "} has no values for " + std::string(intent_name(type)),
                    {.subject = std::string(intent_name(type)), .field = name});
      }
      slot_names.push_back(name);
      literals.emplace_back();
      i = close;
    }
    std::vector<std::size_t> pos(slot_names.size(), 0);
    while (true) {
      std::string text = literals[0];
      for (std::size_t s = 0; s < slot_names.size(); ++s) {
        text += set.slots.at(slot_names[s])[pos[s]];
        text += literals[s + 1];
      }
      out.push_back(std::move(text));
      // Odometer with the last slot varying fastest.
      bool wrapped = true;
      for (std::size_t s = slot_names.size(); s-- > 0;) {
        if (++pos[s] < set.slots.at(slot_names[s]).size()) {
          wrapped = false;
          break;
        }
        pos[s] = 0;
      }
      if (wrapped) break;
    }
  }
  return out;
}

std::vector<EvalQuery> generate_template_queries(const TemplateSet& set, std::size_t count_per_type,
                                                 std::uint64_t seed) {
  std::vector<EvalQuery> out;
  std::mt19937_64 rng(seed);
  for (auto type : kIntentTypes) {
    auto fillings = expand_templates(set, type);
    if (fillings.empty()) {
      throw Error(ErrorCode::EmptyTemplateSet, "no templates for " + std::string(intent_name(type)),
                  {.subject = std::string(intent_name(type))});
    }
    // Fisher-Yates with a plain modulo draw so the order does not depend on
    // the standard library's distribution implementation.
    for (std::size_t i = fillings.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng() % i);
      std::swap(fillings[i - 1], fillings[j]);
    }
    for (std::size_t n = 0; n < count_per_type; ++n) {
      char id[64];
      std::snprintf(id, sizeof id, "%s-%03zu", std::string(intent_name(type)).c_str(), n + 1);
      out.push_back({id, fillings[n % fillings.size()], type});
    }
  }
  return out;
}

EvalReport run_eval(const std::vector<EvalQuery>& queries, const std::vector<GradedRelevance>& relevance,
                    const SearchFn& search, const EvalConfig& config) {
  std::map<std::pair<std::string, std::string>, int> grades;
  for (const auto& r : relevance) {
    if (r.grade < 0) {
      throw Error(ErrorCode::NegativeGrade, "negative grade for " + r.query_id + "/" + r.example_id,
                  {.subject = r.query_id});
    }
    grades[{r.query_id, r.example_id}] = r.grade;
  }

  EvalReport report;
  report.config = config;
  std::map<IntentType, std::pair<double, double>> sums;
  double hit_sum = 0.0;
  double ndcg_sum = 0.0;
  for (const auto& q : queries) {
    QueryOutcome outcome{q, {}, {}, 0, 0.0};
    try {
      outcome.retrieved = search(q);
    } catch (const Error& e) {
      report.failures.push_back({q, std::string(code_name(e.code())), e.what()});
      continue;
    }
    if (outcome.retrieved.size() > config.k) outcome.retrieved.resize(config.k);
    for (const auto& id : outcome.retrieved) {
      const auto g = grades.find({q.query_id, id});
      outcome.grades.push_back(g == grades.end() ? 0 : g->second);
    }
    outcome.hit = hit_at_k(outcome.grades, config.k, config.threshold);
    outcome.ndcg = ndcg_at_k(outcome.grades, config.k, config.gain);
    auto& agg = report.per_type[q.intent_type];
    ++agg.n_queries;
    sums[q.intent_type].first += outcome.hit;
    sums[q.intent_type].second += outcome.ndcg;
    hit_sum += outcome.hit;
    ndcg_sum += outcome.ndcg;
    ++report.overall.n_queries;
    report.outcomes.push_back(std::move(outcome));
  }
  for (auto& [type, agg] : report.per_type) {
    agg.hit_at_k = sums[type].first / static_cast<double>(agg.n_queries);
    agg.ndcg_at_k = sums[type].second / static_cast<double>(agg.n_queries);
  }
  if (report.overall.n_queries > 0) {
    report.overall.hit_at_k = hit_sum / static_cast<double>(report.overall.n_queries);
    report.overall.ndcg_at_k = ndcg_sum / static_cast<double>(report.overall.n_queries);
  }
  return report;
}

SearchFn retriever_search(const retrieval::Retriever& retriever, std::size_t k) {
  return [&retriever, k](const EvalQuery& q) {
    retrieval::RetrievalQuery rq{q.text, retrieval::Scope::WholeScreen, k};
    std::vector<std::string> ids;
    for (const auto& r : retriever.search(rq)) ids.push_back(r.example.example_id);
    return ids;
  };
}

ordered_json report_json(const EvalReport& report) {
  const auto k = std::to_string(report.config.k);
  auto block = [&](const Aggregate& a) {
    ordered_json j;
    j["hit_at_" + k] = a.hit_at_k;
    j["ndcg_at_" + k] = a.ndcg_at_k;
    j["n_queries"] = a.n_queries;
    return j;
  };
  ordered_json out;
  out["config"] = {{"seed", report.config.seed},
                   {"gain", gain_name(report.config.gain)},
                   {"k", report.config.k},
                   {"threshold", report.config.threshold}};
  ordered_json per_type = ordered_json::object();
  for (auto type : kIntentTypes) {
    const auto it = report.per_type.find(type);
    per_type[std::string(intent_name(type))] = block(it == report.per_type.end() ? Aggregate{} : it->second);
  }
  out["per_type"] = per_type;
  out["overall"] = block(report.overall);
  ordered_json queries = ordered_json::array();
  for (const auto& o : report.outcomes) {
    queries.push_back({{"query_id", o.query.query_id},
                       {"intent_type", intent_name(o.query.intent_type)},
                       {"retrieved", o.retrieved},
                       {"grades", o.grades},
                       {"hit", o.hit},
                       {"ndcg", o.ndcg}});
  }
  out["queries"] = queries;
  ordered_json failed = ordered_json::array();
  for (const auto& f : report.failures) {
    failed.push_back({{"query_id", f.query.query_id}, {"code", f.code}, {"message", f.message}});
  }
  out["failed"] = failed;
  return out;
}

std::string format_table(const EvalReport& report) {
  const auto k = std::to_string(report.config.k);
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-16s %8s %8s %6s\n", "Query Type", ("Hit@" + k).c_str(),
                ("nDCG@" + k).c_str(), "N");
  os << line;
  auto row = [&](std::string_view label, const Aggregate& a) {
    std::snprintf(line, sizeof line, "%-16s %8.2f %8.2f %6zu\n", std::string(label).c_str(), a.hit_at_k,
                  a.ndcg_at_k, a.n_queries);
    os << line;
  };
  for (auto type : kIntentTypes) {
    const auto it = report.per_type.find(type);
    row(intent_label(type), it == report.per_type.end() ? Aggregate{} : it->second);
  }
  row("Average (All)", report.overall);
  return os.str();
}

namespace {

template <typename F>
void for_each_record(const std::filesystem::path& path, F&& on_record) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot read " + path.string(), {.subject = path.string()});
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": not a JSON object",
                  {.index = line_no});
    }
    try {
      on_record(j, line_no);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what(),
                  {.index = line_no});
    }
  }
}

}  // namespace

std::vector<EvalQuery> load_queries(const std::filesystem::path& path) {
  std::vector<EvalQuery> out;
  for_each_record(path, [&](const json& j, std::size_t line_no) {
    const auto type = parse_intent(j.at("intent_type").get<std::string>());
    if (!type) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": unknown intent_type",
                  {.index = line_no, .field = "intent_type"});
    }
    out.push_back({j.at("query_id").get<std::string>(), j.at("text").get<std::string>(), *type});
  });
  return out;
}

std::vector<GradedRelevance> load_relevance(const std::filesystem::path& path) {
  std::vector<GradedRelevance> out;
  for_each_record(path, [&](const json& j, std::size_t line_no) {
    const int grade = j.at("grade").get<int>();
    if (grade < 0 || grade > 3) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": grade outside 0..3",
                  {.index = line_no, .field = "grade"});
    }
    out.push_back({j.at("query_id").get<std::string>(), j.at("example_id").get<std::string>(), grade});
  });
  return out;
}

void save_queries(const std::vector<EvalQuery>& queries, const std::filesystem::path& path) {
  std::string text;
  for (const auto& q : queries) {
    ordered_json j;
    j["query_id"] = q.query_id;
    j["text"] = q.text;
    j["intent_type"] = intent_name(q.intent_type);
    text += j.dump() + "\n";
  }
  write_file_atomic(path, text);
}

}  // namespace remix::eval
