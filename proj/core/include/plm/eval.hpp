#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plm/dataset.hpp"
#include "plm/learn.hpp"

namespace plm {

enum class SplitPolicy { random, by_frame };

const char* to_string(SplitPolicy policy);
SplitPolicy parse_split_policy(std::string_view text);

struct SplitSpec {
  double ratio = 0.8;  ///< training share, 0 < ratio < 1
  SplitPolicy policy = SplitPolicy::by_frame;
  std::uint64_t seed = 0;
};

struct Split {
  Dataset train;
  Dataset test;
};

/// Disjoint, exhaustive split. `random` shuffles instances; `by_frame`
/// shuffles frame ids so every frame lands entirely on one side. The training
/// side gets round(ratio * n) instances (or frames). Both sides keep the
/// input order.
Split split(const Dataset& dataset, const SplitSpec& spec);

/// Accuracy of predicting the outcome from a single evidence node.
struct EvalRow {
  std::string evidence;
  std::uint64_t correct = 0;
  std::uint64_t incorrect = 0;
  std::uint64_t null_queries = 0;     ///< excluded from accuracy
  std::uint64_t outside_grid = 0;     ///< test instances with no cell
  std::vector<std::uint64_t> predicted;  ///< per outcome state

  std::uint64_t decided() const { return correct + incorrect; }
  /// correct / (correct + incorrect); nullopt when nothing was decided.
  std::optional<double> accuracy() const;
};

struct EvalReport {
  std::string outcome;
  std::vector<std::string> outcome_states;
  std::vector<EvalRow> rows;
  EvalRow overall;  ///< pooled over all rows
};

/// For each test instance, predicts argmax_s Pr(outcome = s | node = the
/// instance's state) in the instance's cell and compares with its labeled
/// outcome. Ties go to the outcome's "no" state when it is among the maxima,
/// otherwise to the lowest state index.
EvalRow evaluate(const LearnedModel& model, const Dataset& test, std::string_view evidence_node);

EvalReport evaluate_all(const LearnedModel& model, const Dataset& test,
                        const std::vector<std::string>& evidence_nodes);

/// `evidence,accuracy,correct,incorrect,null_queries,outside_grid,
/// predicted_<state>...` with one line per evidence node and an `overall`
/// line. Accuracy is empty when undefined.
std::string report_csv(const EvalReport& report);

}  // namespace plm
