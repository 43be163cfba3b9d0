#include "plm/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "plm/error.hpp"
#include "plm/infer.hpp"
#include "plm/text.hpp"
#include "random.hpp"

namespace plm {

const char* to_string(SplitPolicy policy) {
  return policy == SplitPolicy::random ? "random" : "by_frame";
}

SplitPolicy parse_split_policy(std::string_view text) {
  if (text == "random") return SplitPolicy::random;
  if (text == "by_frame") return SplitPolicy::by_frame;
  throw ValidationError("split policy must be 'random' or 'by_frame'");
}

namespace {

template <class T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[detail::uniform_below(rng, i)]);
  }
}

std::size_t train_share(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

}  // namespace

Split split(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) {
    throw ValidationError("split ratio must lie strictly between 0 and 1");
  }
  std::mt19937_64 rng(detail::splitmix64(spec.seed));
  std::vector<bool> in_train(dataset.size(), false);

  if (spec.policy == SplitPolicy::random) {
    std::vector<std::size_t> idx(dataset.size());
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    const auto n_train = train_share(spec.ratio, idx.size());
    for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;
  } else {
    std::set<std::int64_t> unique;
    for (const auto& inst : dataset.instances) unique.insert(inst.frame_id);
    std::vector<std::int64_t> frames(unique.begin(), unique.end());
    shuffle(frames, rng);
    const auto n_train = train_share(spec.ratio, frames.size());
    std::set<std::int64_t> train_frames(frames.begin(), frames.begin() + static_cast<long>(n_train));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      in_train[i] = train_frames.count(dataset.instances[i].frame_id) > 0;
    }
  }

  Split out;
  out.train.metadata = out.test.metadata = dataset.metadata;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (in_train[i] ? out.train : out.test).instances.push_back(dataset.instances[i]);
  }
  return out;
}

std::optional<double> EvalRow::accuracy() const {
  if (decided() == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(decided());
}

EvalRow evaluate(const LearnedModel& model, const Dataset& test, std::string_view evidence_node) {
  const auto& net = model.network;
  const auto outcome = net.outcome();
  const auto node = net.index_of(evidence_node);
  if (node == outcome) throw ValidationError("the outcome cannot be its own evidence node");
  const auto no_state = net.variable(outcome).state_index("no");

  EvalRow row;
  row.evidence = std::string(evidence_node);
  row.predicted.assign(net.cardinality(outcome), 0);

  // Prediction per (cell, evidence state); nullopt marks a null query.
  std::map<std::pair<std::size_t, StateIndex>, std::optional<std::size_t>> cache;

  for (const auto& inst : test.instances) {
    if (inst.assignment.size() != net.size() || inst.assignment[outcome] == kMissingState ||
        inst.assignment[node] == kMissingState) {
      throw ValidationError("test instance (frame " + std::to_string(inst.frame_id) + ", id " +
                            std::to_string(inst.id) + ") lacks the outcome or '" +
                            std::string(evidence_node) + "'");
    }
    auto cell = model.grid.locate(inst.x, inst.y);
    if (!cell) {
      ++row.outside_grid;
      continue;
    }
    const auto key = std::make_pair(model.grid.linear(*cell), inst.assignment[node]);
    auto it = cache.find(key);
    if (it == cache.end()) {
      const std::pair<std::size_t, StateIndex> ev[] = {{node, inst.assignment[node]}};
      auto d = posterior_distribution(net, model.cells[key.first], outcome, ev);
      std::optional<std::size_t> pred;
      if (d.reason == NullReason::none) {
        const double best = *std::max_element(d.values.begin(), d.values.end());
        if (no_state && d.values[*no_state] == best) {
          pred = *no_state;
        } else {
          pred = static_cast<std::size_t>(
              std::find(d.values.begin(), d.values.end(), best) - d.values.begin());
        }
      }
      it = cache.emplace(key, pred).first;
    }
    if (!it->second) {
      ++row.null_queries;
      continue;
    }
    ++row.predicted[*it->second];
    if (static_cast<StateIndex>(*it->second) == inst.assignment[outcome]) {
      ++row.correct;
    } else {
      ++row.incorrect;
    }
  }
  return row;
}

EvalReport evaluate_all(const LearnedModel& model, const Dataset& test,
                        const std::vector<std::string>& evidence_nodes) {
  const auto& out_var = model.network.variable(model.network.outcome());
  EvalReport report;
  report.outcome = out_var.name;
  report.outcome_states = out_var.states;
  report.overall.evidence = "overall";
  report.overall.predicted.assign(out_var.cardinality(), 0);
  for (const auto& node : evidence_nodes) {
    auto row = evaluate(model, test, node);
    report.overall.correct += row.correct;
    report.overall.incorrect += row.incorrect;
    report.overall.null_queries += row.null_queries;
    report.overall.outside_grid += row.outside_grid;
    for (std::size_t s = 0; s < row.predicted.size(); ++s) report.overall.predicted[s] += row.predicted[s];
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "evidence,accuracy,correct,incorrect,null_queries,outside_grid";
  for (const auto& s : report.outcome_states) os << ",predicted_" << s;
  os << '\n';
  auto line = [&](const EvalRow& r) {
    os << r.evidence << ',';
    if (auto a = r.accuracy()) os << text::format_double(*a);
    os << ',' << r.correct << ',' << r.incorrect << ',' << r.null_queries << ',' << r.outside_grid;
    for (auto p : r.predicted) os << ',' << p;
    os << '\n';
  };
  for (const auto& r : report.rows) line(r);
  line(report.overall);
  return os.str();
}

}  // namespace plm
