#include "plm/association.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "plm/error.hpp"
#include "plm/text.hpp"

namespace plm {

double mse(Point detection, Point ground_truth) {
  const double dx = ground_truth.x - detection.x;
  const double dy = ground_truth.y - detection.y;
  return (dx * dx + dy * dy) / 2.0;
}

namespace {

struct Candidate {
  std::size_t gt;   // index into sorted ground truths
  std::size_t det;  // index into sorted detections
  double mse;
};

std::vector<std::size_t> sorted_by_id(std::span<const DataInstance> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    if (ra.id != rb.id) return ra.id < rb.id;
    if (ra.x != rb.x) return ra.x < rb.x;
    return ra.y < rb.y;
  });
  return order;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Minimum-cost perfect assignment on a square matrix (Hungarian method with
// potentials). Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

// Optimal matching restricted to one connected component of the candidate
// graph. Infeasible entries cost more than any feasible improvement can
// recover, so the assignment maximizes pair count first, then minimizes mse.
void match_component(const std::vector<std::size_t>& gts, const std::vector<std::size_t>& dets,
                     const std::vector<Candidate>& candidates, double tau,
                     std::vector<std::pair<std::size_t, std::size_t>>& chosen) {
  const std::size_t n = std::max(gts.size(), dets.size());
  const double infeasible = (static_cast<double>(n) + 1.0) * (tau + 1.0);
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, infeasible));
  std::map<std::size_t, std::size_t> gt_row, det_col;
  for (std::size_t i = 0; i < gts.size(); ++i) gt_row[gts[i]] = i;
  for (std::size_t j = 0; j < dets.size(); ++j) det_col[dets[j]] = j;
  std::vector<std::vector<bool>> feasible(n, std::vector<bool>(n, false));
  for (const auto& c : candidates) {
    auto r = gt_row.find(c.gt);
    auto col = det_col.find(c.det);
    if (r == gt_row.end() || col == det_col.end()) continue;
    cost[r->second][col->second] = c.mse;
    feasible[r->second][col->second] = true;
  }
  auto assignment = hungarian(cost);
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const std::size_t j = assignment[i];
    if (j < dets.size() && feasible[i][j]) chosen.emplace_back(gts[i], dets[j]);
  }
}

}  // namespace

MatchResult match_frame(std::span<const DataInstance> detections,
                        std::span<const DataInstance> ground_truths, double tau,
                        MatchPolicy policy) {
  const auto det_order = sorted_by_id(detections);
  const auto gt_order = sorted_by_id(ground_truths);
  auto det_at = [&](std::size_t i) -> const DataInstance& { return detections[det_order[i]]; };
  auto gt_at = [&](std::size_t i) -> const DataInstance& { return ground_truths[gt_order[i]]; };

  std::vector<Candidate> candidates;
  for (std::size_t g = 0; g < gt_order.size(); ++g) {
    for (std::size_t d = 0; d < det_order.size(); ++d) {
      const double e = mse({det_at(d).x, det_at(d).y}, {gt_at(g).x, gt_at(g).y});
      if (e <= tau) candidates.push_back({g, d, e});
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  if (policy == MatchPolicy::greedy) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.mse != b.mse) return a.mse < b.mse;
      if (a.gt != b.gt) return a.gt < b.gt;
      return a.det < b.det;
    });
    std::vector<bool> gt_used(gt_order.size(), false), det_used(det_order.size(), false);
    for (const auto& c : candidates) {
      if (gt_used[c.gt] || det_used[c.det]) continue;
      gt_used[c.gt] = det_used[c.det] = true;
      chosen.emplace_back(c.gt, c.det);
    }
  } else {
    // Ground truths occupy [0, G), detections [G, G + D) in the union-find.
    const std::size_t G = gt_order.size();
    DisjointSets sets(G + det_order.size());
    for (const auto& c : candidates) sets.unite(c.gt, G + c.det);
    std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> comps;
    for (const auto& c : candidates) {
      auto& comp = comps[sets.find(c.gt)];
      comp.first.push_back(c.gt);
      comp.second.push_back(c.det);
    }
    for (auto& [_, comp] : comps) {
      for (auto* v : {&comp.first, &comp.second}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
      }
      match_component(comp.first, comp.second, candidates, tau, chosen);
    }
  }

  MatchResult result;
  std::vector<bool> gt_used(gt_order.size(), false), det_used(det_order.size(), false);
  std::sort(chosen.begin(), chosen.end());
  for (const auto& [g, d] : chosen) {
    gt_used[g] = det_used[d] = true;
    result.pairs.push_back(
        {det_at(d).id, gt_at(g).id, mse({det_at(d).x, det_at(d).y}, {gt_at(g).x, gt_at(g).y})});
  }
  for (std::size_t g = 0; g < gt_order.size(); ++g) {
    if (!gt_used[g]) result.unmatched_ground_truth.push_back(gt_at(g).id);
  }
  for (std::size_t d = 0; d < det_order.size(); ++d) {
    if (!det_used[d]) result.unmatched_detections.push_back(det_at(d).id);
  }
  return result;
}

OutcomeStates outcome_states(const SceneSchema& schema, std::string_view outcome) {
  auto idx = schema.index_of(outcome);
  if (!idx) throw ValidationError("outcome variable '" + std::string(outcome) + "' is not in the schema");
  const auto& var = schema.variables[*idx];
  auto yes = var.state_index("yes");
  auto no = var.state_index("no");
  if (!yes || !no) {
    throw ValidationError("outcome variable '" + var.name + "' must have states 'yes' and 'no'");
  }
  OutcomeStates s;
  s.variable = *idx;
  if (outcome == "FN") {
    s.hit = static_cast<StateIndex>(*no);
    s.miss = static_cast<StateIndex>(*yes);
  } else if (outcome == "TP") {
    s.hit = static_cast<StateIndex>(*yes);
    s.miss = static_cast<StateIndex>(*no);
  } else {
    throw ValidationError("outcome variable must be named FN or TP, got '" + var.name + "'");
  }
  return s;
}

LabelResult label_outcomes(const Dataset& records, const SceneSchema& schema, double tau,
                           std::string_view outcome, MatchPolicy policy) {
  if (!(tau >= 0.0)) throw ValidationError("tau must be non-negative");
  const auto states = outcome_states(schema, outcome);

  struct Frame {
    std::vector<DataInstance> detections;
    std::vector<DataInstance> ground_truths;
  };
  std::map<std::int64_t, Frame> frames;
  for (const auto& r : records.instances) {
    auto& f = frames[r.frame_id];
    (r.role == RecordRole::detection ? f.detections : f.ground_truths).push_back(r);
  }

  LabelResult out;
  out.labeled.metadata = records.metadata;
  out.labeled.metadata["tau"] = text::format_double(tau);
  out.labeled.metadata["outcome"] = std::string(outcome);

  for (const auto& [frame_id, f] : frames) {
    ++out.stats.frames;
    auto match = match_frame(f.detections, f.ground_truths, tau, policy);
    std::map<std::int64_t, std::int64_t> det_for_gt;
    for (const auto& p : match.pairs) det_for_gt[p.ground_truth_id] = p.detection_id;

    bool ambiguous = false;
    for (const auto& d : f.detections) {
      int near = 0;
      for (const auto& g : f.ground_truths) near += mse({d.x, d.y}, {g.x, g.y}) <= tau;
      ambiguous |= near > 1;
    }
    out.stats.ambiguous_frames += ambiguous;
    out.stats.unmatched_detections += match.unmatched_detections.size();

    for (const auto& g : f.ground_truths) {
      DataInstance inst = g;
      inst.assignment.resize(schema.size(), kMissingState);
      auto it = det_for_gt.find(g.id);
      if (it != det_for_gt.end()) {
        inst.assignment[states.variable] = states.hit;
        inst.matched_id = it->second;
        ++out.stats.matched;
      } else {
        inst.assignment[states.variable] = states.miss;
        inst.matched_id.reset();
        ++out.stats.missed;
      }
      ++out.stats.ground_truths;
      out.labeled.instances.push_back(std::move(inst));
    }
  }
  return out;
}

}  // namespace plm
