#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "plm/dataset.hpp"
#include "plm/network.hpp"

namespace plm {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Mean squared error over the two coordinate components:
/// ((x - x')^2 + (y - y')^2) / 2, in square meters.
double mse(Point detection, Point ground_truth);

struct MatchedPair {
  std::int64_t detection_id = 0;
  std::int64_t ground_truth_id = 0;
  double mse = 0.0;

  bool operator==(const MatchedPair&) const = default;
};

/// One-to-one association of a frame. Pairs are sorted by ground-truth id,
/// unmatched id lists ascending.
struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<std::int64_t> unmatched_ground_truth;
  std::vector<std::int64_t> unmatched_detections;
};

enum class MatchPolicy {
  /// Maximum number of pairs with mse <= tau; among those, minimum total mse.
  optimal,
  /// Ascending mse, ties by (ground-truth id, detection id). Can leave a
  /// ground truth unmatched that an optimal assignment would have paired.
  greedy,
};

/// Matches the detections and ground truths of one frame. Pairs with
/// mse > tau are never formed. The result depends only on the record ids and
/// positions, not on input order.
MatchResult match_frame(std::span<const DataInstance> detections,
                        std::span<const DataInstance> ground_truths, double tau,
                        MatchPolicy policy = MatchPolicy::optimal);

/// Which outcome state a matched ("hit") and an unmatched ("miss") ground
/// truth receive. The outcome must be named FN or TP and have states yes/no:
/// FN: hit -> no, miss -> yes. TP: hit -> yes, miss -> no.
struct OutcomeStates {
  std::size_t variable = 0;
  StateIndex hit = 0;
  StateIndex miss = 0;
};
OutcomeStates outcome_states(const SceneSchema& schema, std::string_view outcome);

struct LabelStats {
  std::size_t frames = 0;
  std::size_t ground_truths = 0;
  std::size_t matched = 0;
  std::size_t missed = 0;
  std::size_t unmatched_detections = 0;
  /// Frames in which some detection had more than one ground truth within tau.
  std::size_t ambiguous_frames = 0;
};

struct LabelResult {
  Dataset labeled;
  LabelStats stats;
};

/// Emits one instance per ground-truth record of `records` with the outcome
/// set, factor states and coordinates copied from the ground truth, and
/// matched_id holding the paired detection (empty when missed). Detections
/// produce no instances. Output is ordered by frame id, then input order.
LabelResult label_outcomes(const Dataset& records, const SceneSchema& schema, double tau,
                           std::string_view outcome, MatchPolicy policy = MatchPolicy::optimal);

}  // namespace plm
