#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "plm/error.hpp"
#include "plm/eval.hpp"

using namespace plm;

namespace {

Dataset frames_dataset(std::size_t frames, std::size_t per_frame) {
  Dataset d;
  std::int64_t id = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < per_frame; ++i) {
      DataInstance inst;
      inst.frame_id = static_cast<std::int64_t>(f);
      inst.id = id++;
      d.instances.push_back(inst);
    }
  }
  return d;
}

std::set<std::int64_t> ids(const Dataset& d) {
  std::set<std::int64_t> out;
  for (const auto& i : d.instances) out.insert(i.id);
  return out;
}

std::set<std::int64_t> frames(const Dataset& d) {
  std::set<std::int64_t> out;
  for (const auto& i : d.instances) out.insert(i.frame_id);
  return out;
}

DataInstance chain_instance(StateIndex a, StateIndex b, double x = 0.0) {
  DataInstance d;
  d.x = x;
  d.assignment = {a, b};
  return d;
}

LearnedModel chain_layer(CellModel cell) {
  LearnedModel m;
  m.grid = GridSpec(280.0, 100.0, -140.0, 140.0, -50.0, 50.0);
  m.network = plm::testing::chain_network();
  m.cells = {std::move(cell)};
  return m;
}

// Learns a model on the split's training side and evaluates Weather.
double split_accuracy(const GeneratorSpec& spec, SplitPolicy policy) {
  const auto data = sample(spec).truth;
  const auto parts = split(data, {0.8, policy, spec.seed});
  LearnedModel m;
  m.grid = spec.grid;
  m.network = spec.network;
  m.cells = learn_all(partition(parts.train, spec.grid), spec.network, 0.0);
  return evaluate(m, parts.test, "Weather").accuracy().value_or(0.0);
}

}  // namespace

TEST(Split, ByFrameKeepsFramesWhole) {
  const auto data = frames_dataset(100, 3);
  const auto s = split(data, {0.8, SplitPolicy::by_frame, 7});
  EXPECT_EQ(frames(s.train).size(), 80u);
  EXPECT_EQ(frames(s.test).size(), 20u);
  for (auto f : frames(s.test)) EXPECT_FALSE(frames(s.train).count(f));
  EXPECT_EQ(s.train.size() + s.test.size(), 300u);
}

TEST(Split, DisjointExhaustiveAndSeeded) {
  const auto data = frames_dataset(37, 5);
  for (auto policy : {SplitPolicy::random, SplitPolicy::by_frame}) {
    const auto a = split(data, {0.7, policy, 3});
    const auto b = split(data, {0.7, policy, 3});
    EXPECT_EQ(ids(a.train), ids(b.train));
    auto all = ids(a.train);
    for (auto id : ids(a.test)) EXPECT_TRUE(all.insert(id).second);
    EXPECT_EQ(all, ids(data));
  }
  const auto r = split(data, {0.7, SplitPolicy::random, 3});
  EXPECT_EQ(r.train.size(), 130u);  // round(0.7 * 185)
  EXPECT_NE(ids(split(data, {0.7, SplitPolicy::random, 4}).train), ids(r.train));
  EXPECT_THROW(split(data, {1.0, SplitPolicy::random, 0}), ValidationError);
  EXPECT_THROW(parse_split_policy("by_scene"), ValidationError);
  EXPECT_EQ(parse_split_policy("by_frame"), SplitPolicy::by_frame);
}

TEST(Evaluate, DeterministicOutcomeIsPredictedPerfectly) {
  auto spec = plm::testing::uniform_generator(200, 20, 11);
  spec.grid = GridSpec(140.0, 50.0, -140.0, 140.0, -50.0, 50.0);
  const auto out = spec.network.outcome();
  // FN = yes exactly when largely occluded; rows u = occlusion * 4 + reflection * 2 + truncation.
  for (std::size_t u = 0; u < 12; ++u) {
    const bool miss = u / 4 == 2;
    spec.cbts[out][2 * u] = miss ? 0.0 : 1.0;
    spec.cbts[out][2 * u + 1] = miss ? 1.0 : 0.0;
  }
  const auto data = sample(spec).truth;
  const auto parts = split(data, {0.8, SplitPolicy::by_frame, 1});
  LearnedModel m;
  m.grid = spec.grid;
  m.network = spec.network;
  m.cells = learn_all(partition(parts.train, spec.grid), spec.network, 0.0);
  const auto row = evaluate(m, parts.test, "Occlusion");
  EXPECT_EQ(row.accuracy(), 1.0);
  EXPECT_EQ(row.null_queries, 0u);
  EXPECT_EQ(row.decided(), parts.test.size());
}

TEST(Evaluate, IndependentBalancedOutcomeIsChance) {
  const auto spec = plm::testing::uniform_generator(1000, 100, 5);
  const auto data = sample(spec).truth;
  const auto parts = split(data, {0.8, SplitPolicy::by_frame, 2});
  LearnedModel m;
  m.grid = spec.grid;
  m.network = spec.network;
  m.cells = learn_all(partition(parts.train, spec.grid), spec.network, 0.0);
  const auto row = evaluate(m, parts.test, "Weather");
  EXPECT_NEAR(*row.accuracy(), 0.5, 0.02);
}

TEST(Evaluate, TiesPredictNo) {
  auto cell = plm::testing::chain_model();
  cell.cbts[1].probabilities = {0.5, 0.5, 0.5, 0.5};
  Dataset test;
  test.instances = {chain_instance(0, 0), chain_instance(1, 1)};
  const auto row = evaluate(chain_layer(cell), test, "A");
  EXPECT_EQ(row.correct, 1u);
  EXPECT_EQ(row.incorrect, 1u);
  EXPECT_EQ(row.predicted, (std::vector<std::uint64_t>{2, 0}));
}

TEST(Evaluate, NullQueriesAndOutsideGridAreExcluded) {
  auto cell = plm::testing::chain_model();
  cell.cbts[1].supported[1] = false;
  Dataset test;
  test.instances = {chain_instance(0, 0), chain_instance(1, 1), chain_instance(1, 0), chain_instance(0, 0, 500.0)};
  const auto row = evaluate(chain_layer(cell), test, "A");
  EXPECT_EQ(row.correct, 1u);
  EXPECT_EQ(row.incorrect, 0u);
  EXPECT_EQ(row.null_queries, 2u);
  EXPECT_EQ(row.outside_grid, 1u);
  EXPECT_EQ(row.accuracy(), 1.0);

  Dataset only_null;
  only_null.instances = {chain_instance(1, 1)};
  EXPECT_FALSE(evaluate(chain_layer(cell), only_null, "A").accuracy());
  EXPECT_THROW(evaluate(chain_layer(cell), test, "B"), ValidationError);
}

TEST(Evaluate, ReportCsv) {
  const auto m = chain_layer(plm::testing::chain_model());
  Dataset test;
  test.instances = {chain_instance(0, 0), chain_instance(1, 1), chain_instance(1, 0), chain_instance(0, 1)};
  const auto report = evaluate_all(m, test, {"A"});
  EXPECT_EQ(report_csv(report),
            "evidence,accuracy,correct,incorrect,null_queries,outside_grid,predicted_no,predicted_yes\n"
            "A,0.5,2,2,0,0,2,2\n"
            "overall,0.5,2,2,0,0,2,2\n");
}

TEST(Evaluate, ByFrameSplitDoesNotOverstateAccuracy) {
  // Scene-level correlation: every variable is shared within a frame and
  // frames are clustered in space, so a random split leaks test frames.
  int by_frame_not_higher = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = plm::testing::uniform_generator(300, 20, seed);
    spec.placement = {PlacementKind::clustered, 5.0};
    for (const auto& v : spec.network.schema().variables) spec.frame_shared.push_back(v.name);
    const double random = split_accuracy(spec, SplitPolicy::random);
    const double by_frame = split_accuracy(spec, SplitPolicy::by_frame);
    by_frame_not_higher += by_frame <= random;
  }
  EXPECT_GT(by_frame_not_higher, 10);
}
