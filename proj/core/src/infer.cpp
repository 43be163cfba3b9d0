#include "plm/infer.hpp"

#include <algorithm>
#include <utility>

#include "plm/error.hpp"
#include "plm/text.hpp"

namespace plm {

StateRef parse_state_ref(std::string_view text) {
  auto t = text::trim(text);
  auto eq = t.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == t.size()) {
    throw ValidationError("expected Variable=state, got '" + std::string(text) + "'");
  }
  return {std::string(text::trim(t.substr(0, eq))), std::string(text::trim(t.substr(eq + 1)))};
}

std::vector<StateRef> parse_evidence(std::string_view text) {
  std::vector<StateRef> out;
  if (text::trim(text).empty()) return out;
  for (auto part : text::split(text, ',')) out.push_back(parse_state_ref(part));
  return out;
}

std::string to_string(const StateRef& ref) { return ref.variable + "=" + ref.state; }

std::string to_string(std::span<const StateRef> evidence) {
  std::string out;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (i) out += ',';
    out += to_string(evidence[i]);
  }
  return out;
}

const char* to_string(NullReason reason) {
  switch (reason) {
    case NullReason::none: return "none";
    case NullReason::insufficient_data: return "insufficient_data";
    case NullReason::inconsistent_evidence: return "inconsistent_evidence";
  }
  return "unknown";
}

ResolvedQuery resolve(const Network& network, const Query& query) {
  ResolvedQuery r;
  r.target = network.index_of(query.target.variable);
  r.target_state = network.state_of(r.target, query.target.state);
  for (const auto& e : query.evidence) {
    const auto v = network.index_of(e.variable);
    const auto s = network.state_of(v, e.state);
    if (v == r.target) {
      throw ValidationError("target variable '" + e.variable + "' also appears in the evidence");
    }
    auto it = std::find_if(r.evidence.begin(), r.evidence.end(),
                           [v](const auto& p) { return p.first == v; });
    if (it != r.evidence.end()) {
      if (it->second != s) throw ValidationError("conflicting evidence for '" + e.variable + "'");
      continue;
    }
    r.evidence.emplace_back(v, s);
  }
  std::sort(r.evidence.begin(), r.evidence.end());
  return r;
}

namespace {

struct Term {
  double value = 0.0;
  bool unsupported = false;
  std::size_t variable = 0;
  std::size_t config = 0;
};

// An unsupported row leaves the term undetermined unless another factor is
// already zero, in which case the term is zero whatever the row holds.
Term evaluate_joint(const Network& net, const CellModel& model,
                    std::span<const StateIndex> assignment) {
  Term t;
  t.value = 1.0;
  for (auto v : net.topological_order()) {
    const auto& cbt = model.cbts[v];
    const auto u = net.parent_config(v, assignment);
    if (!cbt.supported[u]) {
      if (!t.unsupported) {
        t.unsupported = true;
        t.variable = v;
        t.config = u;
      }
      continue;
    }
    t.value *= cbt.probabilities[u * cbt.cardinality + static_cast<std::size_t>(assignment[v])];
    if (t.value == 0.0) {
      t.unsupported = false;
      return t;
    }
  }
  return t;
}

std::string describe_row(const Network& net, std::size_t v, std::size_t u) {
  auto parents = net.describe_parent_config(v, u);
  return net.variable(v).name + (parents.empty() ? "" : " | " + parents);
}

// Calls visit(assignment) for every full assignment agreeing with `fixed`.
template <class Visit>
bool enumerate(const Network& net, std::span<const std::pair<std::size_t, StateIndex>> fixed,
               Visit&& visit) {
  Assignment a(net.size(), 0);
  std::vector<bool> is_fixed(net.size(), false);
  for (auto [v, s] : fixed) {
    a[v] = s;
    is_fixed[v] = true;
  }
  while (true) {
    if (!visit(std::as_const(a))) return false;
    std::size_t v = net.size();
    while (v-- > 0) {
      if (is_fixed[v]) continue;
      if (static_cast<std::size_t>(++a[v]) < net.cardinality(v)) break;
      a[v] = 0;
    }
    if (v == static_cast<std::size_t>(-1)) return true;
  }
}

}  // namespace

InferenceResult joint_probability(const Network& network, const CellModel& model,
                                  std::span<const StateIndex> assignment) {
  if (assignment.size() != network.size()) {
    throw ValidationError("joint probability needs a full assignment");
  }
  for (std::size_t v = 0; v < network.size(); ++v) {
    if (assignment[v] < 0 || static_cast<std::size_t>(assignment[v]) >= network.cardinality(v)) {
      throw ValidationError("assignment for '" + network.variable(v).name + "' is out of range");
    }
  }
  auto t = evaluate_joint(network, model, assignment);
  if (t.unsupported) {
    return {std::nullopt, NullReason::insufficient_data, describe_row(network, t.variable, t.config)};
  }
  return {t.value, NullReason::none, {}};
}

Distribution posterior_distribution(const Network& network, const CellModel& model,
                                    std::size_t variable,
                                    std::span<const std::pair<std::size_t, StateIndex>> evidence) {
  Distribution d;
  d.values.assign(network.cardinality(variable), 0.0);
  double total = 0.0;
  bool complete = enumerate(network, evidence, [&](const Assignment& a) {
    auto t = evaluate_joint(network, model, a);
    if (t.unsupported) {
      d.reason = NullReason::insufficient_data;
      d.detail = describe_row(network, t.variable, t.config);
      return false;
    }
    d.values[static_cast<std::size_t>(a[variable])] += t.value;
    total += t.value;
    return true;
  });
  if (!complete) {
    d.values.clear();
    return d;
  }
  if (total == 0.0) {
    d.values.clear();
    d.reason = NullReason::inconsistent_evidence;
    d.detail = "evidence has probability zero";
    return d;
  }
  for (auto& p : d.values) p /= total;
  return d;
}

InferenceResult posterior(const Network& network, const CellModel& model,
                          const ResolvedQuery& query) {
  double numerator = 0.0;
  double denominator = 0.0;
  InferenceResult result;
  bool complete = enumerate(network, query.evidence, [&](const Assignment& a) {
    auto t = evaluate_joint(network, model, a);
    if (t.unsupported) {
      result.reason = NullReason::insufficient_data;
      result.detail = describe_row(network, t.variable, t.config);
      return false;
    }
    denominator += t.value;
    if (a[query.target] == query.target_state) numerator += t.value;
    return true;
  });
  if (!complete) return result;
  if (denominator == 0.0) {
    return {std::nullopt, NullReason::inconsistent_evidence, "evidence has probability zero"};
  }
  return {numerator / denominator, NullReason::none, {}};
}

InferenceResult posterior(const Network& network, const CellModel& model, const Query& query) {
  return posterior(network, model, resolve(network, query));
}

}  // namespace plm
