#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "remix/retrieval.hpp"

namespace remix::eval {

enum class IntentType { ColorTheme, Layout, UiCategory, UiComponent };

inline constexpr std::array kIntentTypes = {IntentType::ColorTheme, IntentType::Layout, IntentType::UiCategory,
                                            IntentType::UiComponent};

/// "color_theme", "layout", "ui_category", "ui_component"
std::string_view intent_name(IntentType type);
std::optional<IntentType> parse_intent(std::string_view name);
/// Row label used in the console table, e.g. "Color Theme".
std::string_view intent_label(IntentType type);

enum class Gain { Linear, Exponential };

std::string_view gain_name(Gain gain);

inline constexpr std::size_t kDefaultK = 5;
inline constexpr int kDefaultThreshold = 2;
inline constexpr std::size_t kDefaultQueriesPerType = 25;

/// 1 iff one of the first min(k, len) grades reaches the threshold.
int hit_at_k(std::span<const int> grades, std::size_t k = kDefaultK, int threshold = kDefaultThreshold);

/// DCG/IDCG over the first min(k, len) grades with a log2(rank + 1)
/// discount; 0 when IDCG is 0. Throws NEGATIVE_GRADE.
double ndcg_at_k(std::span<const int> grades, std::size_t k = kDefaultK, Gain gain = Gain::Linear);

struct EvalQuery {
  std::string query_id;
  std::string text;
  IntentType intent_type = IntentType::ColorTheme;

  friend bool operator==(const EvalQuery&, const EvalQuery&) = default;
};

struct GradedRelevance {
  std::string query_id;
  std::string example_id;
  int grade = 0;
};

/// Templates use {slot} placeholders filled from `slots`.
struct TemplateSet {
  std::map<IntentType, std::vector<std::string>> templates;
  std::map<std::string, std::vector<std::string>> slots;
};

const TemplateSet& default_templates();

/// Every filling of every template for one type, in template order and then
/// slot-value order (leftmost slot varies slowest).
std::vector<std::string> expand_templates(const TemplateSet& set, IntentType type);

/// `count_per_type` queries per type drawn from a seeded shuffle of all
/// fillings, cycling when there are fewer fillings than requested. Throws
/// EMPTY_TEMPLATE_SET.
std::vector<EvalQuery> generate_template_queries(const TemplateSet& set,
                                                 std::size_t count_per_type = kDefaultQueriesPerType,
                                                 std::uint64_t seed = 0);

struct EvalConfig {
  std::size_t k = kDefaultK;
  int threshold = kDefaultThreshold;
  Gain gain = Gain::Linear;
  std::uint64_t seed = 0;
};

struct QueryOutcome {
  EvalQuery query;
  std::vector<std::string> retrieved;
  std::vector<int> grades;
  int hit = 0;
  double ndcg = 0.0;
};

struct QueryFailure {
  EvalQuery query;
  std::string code;
  std::string message;
};

struct Aggregate {
  double hit_at_k = 0.0;
  double ndcg_at_k = 0.0;
  std::size_t n_queries = 0;
};

struct EvalReport {
  EvalConfig config;
  std::map<IntentType, Aggregate> per_type;
  Aggregate overall;
  std::vector<QueryOutcome> outcomes;
  std::vector<QueryFailure> failures;
};

/// Returns example ids in rank order for one query.
using SearchFn = std::function<std::vector<std::string>(const EvalQuery&)>;

/// Aggregates are means over successful queries; failed queries are listed
/// in the report and excluded from the means.
EvalReport run_eval(const std::vector<EvalQuery>& queries, const std::vector<GradedRelevance>& relevance,
                    const SearchFn& search, const EvalConfig& config = {});

/// Whole-screen top-k through the retriever.
SearchFn retriever_search(const retrieval::Retriever& retriever, std::size_t k = kDefaultK);

nlohmann::ordered_json report_json(const EvalReport& report);
std::string format_table(const EvalReport& report);

std::vector<EvalQuery> load_queries(const std::filesystem::path& path);
std::vector<GradedRelevance> load_relevance(const std::filesystem::path& path);
void save_queries(const std::vector<EvalQuery>& queries, const std::filesystem::path& path);

}  // namespace remix::eval
