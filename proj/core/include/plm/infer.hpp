#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plm/learn.hpp"
#include "plm/network.hpp"

namespace plm {

/// "Variable=state" as written on the command line.
struct StateRef {
  std::string variable;
  std::string state;

  bool operator==(const StateRef&) const = default;
};

StateRef parse_state_ref(std::string_view text);
/// Comma-separated list of StateRef; empty text gives an empty list.
std::vector<StateRef> parse_evidence(std::string_view text);
std::string to_string(const StateRef& ref);
std::string to_string(std::span<const StateRef> evidence);

struct Query {
  StateRef target;
  std::vector<StateRef> evidence;
};

enum class NullReason { none, insufficient_data, inconsistent_evidence };

const char* to_string(NullReason reason);

/// A probability, or null with the reason it could not be computed.
/// `detail` names the offending CBT row for insufficient_data, e.g.
/// "Reflection | Illumination=night,Road=wet".
struct InferenceResult {
  std::optional<double> value;
  NullReason reason = NullReason::none;
  std::string detail;

  bool has_value() const { return value.has_value(); }
};

/// Query resolved against a network; evidence sorted by variable index.
struct ResolvedQuery {
  std::size_t target = 0;
  StateIndex target_state = 0;
  std::vector<std::pair<std::size_t, StateIndex>> evidence;
};

/// Throws ValidationError for unknown variables or states, the target
/// appearing in the evidence, or conflicting evidence.
ResolvedQuery resolve(const Network& network, const Query& query);

/// Product of CBT entries along the factorization. An unsupported row makes
/// the result null (insufficient_data) unless some other factor is zero, in
/// which case the product is zero whatever the missing row would hold.
InferenceResult joint_probability(const Network& network, const CellModel& model,
                                  std::span<const StateIndex> assignment);

/// Pr(target | evidence) by exhaustive enumeration of the assignments
/// consistent with the evidence. Null with inconsistent_evidence when the
/// evidence has probability zero, with insufficient_data when a term needs an
/// unsupported CBT row.
InferenceResult posterior(const Network& network, const CellModel& model, const Query& query);
InferenceResult posterior(const Network& network, const CellModel& model,
                          const ResolvedQuery& query);

/// Full posterior distribution of `variable` given the evidence, or the null
/// reason. Values sum to one.
struct Distribution {
  std::vector<double> values;
  NullReason reason = NullReason::none;
  std::string detail;
};
Distribution posterior_distribution(const Network& network, const CellModel& model,
                                    std::size_t variable,
                                    std::span<const std::pair<std::size_t, StateIndex>> evidence);

}  // namespace plm
