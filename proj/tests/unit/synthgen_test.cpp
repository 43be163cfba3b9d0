#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "plm/association.hpp"
#include "plm/error.hpp"
#include "plm/hash.hpp"
#include "plm/synthgen.hpp"

using namespace plm;

namespace {

std::string csv(const Dataset& d, const SceneSchema& s) {
  std::ostringstream out;
  write_dataset(out, d, s, false);
  return out.str();
}

GridSpec one_cell() { return GridSpec(280.0, 100.0, -140.0, 140.0, -50.0, 50.0); }

}  // namespace

TEST(Generator, DemoSpecIsValidAndMatchesShippedFile) {
  const auto demo = demo_generator_spec();
  EXPECT_TRUE(validate_generator(demo).ok()) << validate_generator(demo).to_string();
  const auto shipped = read_generator_spec(std::string(PLM_DATA_DIR) + "/demo_generator.json");
  EXPECT_EQ(shipped.cbts, demo.cbts);
  EXPECT_EQ(shipped.grid, demo.grid);
  EXPECT_EQ(shipped.frames, demo.frames);
  EXPECT_EQ(shipped.objects_per_frame, demo.objects_per_frame);
  EXPECT_EQ(shipped.seed, demo.seed);
  EXPECT_EQ(shipped.range_gain, demo.range_gain);
  EXPECT_EQ(shipped.network.schema(), demo.network.schema());
  EXPECT_EQ(shipped.network.structure(), demo.network.structure());
}

TEST(Generator, ValidationCatchesBadSpecs) {
  auto spec = demo_generator_spec();
  spec.cbts[0] = {0.5, 0.25, 0.2};
  EXPECT_FALSE(validate_generator(spec).ok());

  spec = demo_generator_spec();
  spec.frame_shared = {"Road"};  // parent Weather is not shared
  EXPECT_FALSE(validate_generator(spec).ok());
  spec.frame_shared = {"Weather", "Road"};
  EXPECT_TRUE(validate_generator(spec).ok());

  spec = demo_generator_spec();
  spec.cbts.pop_back();
  EXPECT_THROW(sample(spec), ValidationError);

  EXPECT_THROW(parse_generator_spec(R"({"cbts": {}, "colour": 1})", "."), ValidationError);
  EXPECT_THROW(parse_generator_spec(R"({"cbts": {"Weather": [[1, 0, 0]]}})", "."), ValidationError);
  EXPECT_THROW(parse_generator_spec("[1,2", "."), ValidationError);
  EXPECT_THROW(read_generator_spec("/nonexistent/gen.json"), IoError);
}

TEST(Generator, ZeroDensityGivesEmptyFilesWithHeaders) {
  auto spec = demo_generator_spec();
  spec.frames = 10;
  spec.objects_per_frame = 0;
  const auto data = sample(spec);
  EXPECT_EQ(data.detections.size(), 0u);
  EXPECT_EQ(data.ground_truth.size(), 0u);
  const auto text = csv(data.ground_truth, spec.network.schema());
  EXPECT_NE(text.find("frame_id,x,y,role,Weather"), std::string::npos);
  std::istringstream in(text);
  EXPECT_EQ(load_dataset(in, spec.network.schema()).dataset.size(), 0u);
}

TEST(Generator, CertainMissGivesNoDetections) {
  auto spec = demo_generator_spec();
  spec.frames = 50;
  spec.objects_per_frame = 10;
  spec.range_gain = 0.0;
  const auto out = spec.network.outcome();
  for (std::size_t i = 0; i < spec.cbts[out].size(); ++i) spec.cbts[out][i] = i % 2 ? 1.0 : 0.0;
  const auto data = sample(spec);
  EXPECT_EQ(data.detections.size(), 0u);
  EXPECT_EQ(data.ground_truth.size(), 500u);
}

TEST(Generator, RootFrequenciesWithinBinomialBands) {
  auto spec = demo_generator_spec();
  spec.frames = 1000;
  spec.objects_per_frame = 100;
  const auto data = sample(spec).truth.instances;
  ASSERT_EQ(data.size(), 100000u);
  const double n = static_cast<double>(data.size());
  for (const std::string root : {"Weather", "Occlusion", "Truncation"}) {
    const auto v = spec.network.index_of(root);
    std::vector<double> freq(spec.network.cardinality(v), 0.0);
    for (const auto& inst : data) freq[static_cast<std::size_t>(inst.assignment[v])] += 1.0;
    for (std::size_t s = 0; s < freq.size(); ++s) {
      const double p = spec.cbts[v][s];
      EXPECT_NEAR(freq[s] / n, p, 3.0 * std::sqrt(p * (1 - p) / n)) << root << " state " << s;
    }
  }
}

TEST(Generator, DetectionsStayWithinHalfTau) {
  auto spec = demo_generator_spec();
  spec.frames = 40;
  spec.objects_per_frame = 20;
  spec.tau = 0.8;
  const auto data = sample(spec);
  const auto states = outcome_states(spec.network.schema(), "FN");
  std::size_t hits = 0;
  for (const auto& t : data.truth.instances) hits += t.assignment[6] == states.hit;
  EXPECT_EQ(data.detections.size(), hits);
  for (const auto& d : data.detections.instances) {
    double best = 1e9;
    for (const auto& g : data.ground_truth.instances) {
      if (g.frame_id == d.frame_id) best = std::min(best, mse({d.x, d.y}, {g.x, g.y}));
    }
    EXPECT_LE(best, spec.tau / 2 + 1e-12);
    EXPECT_TRUE(spec.grid.contains(d.x, d.y) || best <= spec.tau / 2);
  }
  for (const auto& g : data.ground_truth.instances) EXPECT_EQ(g.assignment[6], kMissingState);
}

TEST(Generator, FrameSharedVariablesAreConstantWithinFrames) {
  auto spec = demo_generator_spec();
  spec.frames = 30;
  spec.objects_per_frame = 15;
  spec.frame_shared = {"Weather", "Road", "Illumination"};
  spec.placement = {PlacementKind::clustered, 4.0};
  const auto data = sample(spec).truth.instances;
  for (std::size_t i = 1; i < data.size(); ++i) {
    if (data[i].frame_id != data[i - 1].frame_id) continue;
    for (std::size_t v = 0; v < 3; ++v) EXPECT_EQ(data[i].assignment[v], data[i - 1].assignment[v]);
    EXPECT_LE(std::hypot(data[i].x - data[i - 1].x, data[i].y - data[i - 1].y), 8.0 + 1e-9);
  }
}

TEST(Generator, SeedDeterminesOutput) {
  auto spec = demo_generator_spec();
  spec.frames = 100;
  spec.objects_per_frame = 10;
  const auto& schema = spec.network.schema();
  const auto a = csv(sample(spec).detections, schema);
  EXPECT_EQ(csv(sample(spec).detections, schema), a);
  EXPECT_EQ(truth_manifest(spec), truth_manifest(spec));
  spec.seed = 43;
  EXPECT_NE(fnv1a64(csv(sample(spec).detections, schema)), fnv1a64(a));
}

TEST(Analytic, UniformOutcomeIsItsOwnMarginal) {
  auto spec = plm::testing::uniform_generator(0, 0, 0);
  const auto out = spec.network.outcome();
  for (std::size_t u = 0; u < spec.network.parent_configurations(out); ++u) {
    spec.cbts[out][2 * u] = 0.65;
    spec.cbts[out][2 * u + 1] = 0.35;
  }
  EXPECT_NEAR(*analytic_marginal(spec, {3, 3}, {{"FN", "yes"}, {}}), 0.35, 1e-12);
}

TEST(Analytic, ChainByHand) {
  SceneSchema s{{{"A", {"0", "1"}, VariableRole::factor}, {"FN", {"no", "yes"}, VariableRole::outcome}}};
  GeneratorSpec spec;
  spec.network = Network::compile(s, structure_over(s, {{"A", "FN"}}));
  spec.cbts = {{0.3, 0.7}, {0.9, 0.1, 0.4, 0.6}};
  EXPECT_NEAR(*analytic_marginal(spec, {0, 0}, {{"FN", "yes"}, {}}), 0.3 * 0.1 + 0.7 * 0.6, 1e-15);
  EXPECT_NEAR(*analytic_marginal(spec, {0, 0}, {{"A", "1"}, {{"FN", "yes"}}}), 0.42 / 0.45, 1e-15);
}

TEST(Analytic, AgreesWithInferenceOnTruthModel) {
  const auto spec = demo_generator_spec();
  for (std::size_t k = 0; k < spec.grid.cell_count(); k += 7) {
    const auto c = spec.grid.cell_at(k);
    const auto m = truth_model(spec, c);
    for (const auto& query : {Query{{"FN", "yes"}, {}}, Query{{"FN", "yes"}, {{"Occlusion", "largely_occluded"}}},
                              Query{{"Weather", "fog"}, {{"FN", "yes"}, {"Truncation", "none"}}}}) {
      EXPECT_NEAR(*analytic_marginal(spec, c, query), *posterior(spec.network, m, query).value, 1e-12);
    }
  }
}

TEST(Analytic, RangeRaisesMissProbability) {
  const auto spec = demo_generator_spec();
  const Query q{{"FN", "yes"}, {}};
  const auto& g = spec.grid;
  // Along the row closest to the ego vehicle, going outwards.
  double prev = 0.0;
  for (int col = g.cols() / 2; col < g.cols(); ++col) {
    const double p = *analytic_marginal(spec, {col, g.rows() / 2}, q);
    EXPECT_GT(p, prev);
    prev = p;
  }
  EXPECT_LT(normalized_range(g, {7, 5}), normalized_range(g, {13, 9}));
  EXPECT_LE(normalized_range(g, {13, 9}), 1.0);
}

TEST(Analytic, ManifestCarriesPerCellMissProbability) {
  auto spec = demo_generator_spec();
  spec.frames = 1;
  const auto doc = truth_manifest(spec);
  EXPECT_NE(doc.find("\"miss_probability\""), std::string::npos);
  EXPECT_NE(doc.find("\"cbts\""), std::string::npos);
}

TEST(Generator, LearnedTablesConvergeToTruth) {
  auto spec = demo_generator_spec();
  spec.grid = one_cell();
  spec.range_gain = 0.0;
  spec.frames = 2000;
  spec.objects_per_frame = 100;
  const auto data = sample(spec).truth.instances;
  const auto m = learn_cell(data, spec.network, {0, 0}, 0.0);
  std::size_t entries = 0, within = 0;
  for (std::size_t v = 0; v < spec.cbts.size(); ++v) {
    const auto& cbt = m.cbts[v];
    for (std::size_t u = 0; u < cbt.rows(); ++u) {
      if (!cbt.supported[u]) continue;
      const double n = static_cast<double>(cbt.support(u));
      for (std::size_t x = 0; x < cbt.cardinality; ++x) {
        const double truth = spec.cbts[v][u * cbt.cardinality + x];
        ++entries;
        within += std::abs(*cbt.probability(u, x) - truth) <= 3.0 * std::sqrt(truth * (1 - truth) / n);
      }
    }
  }
  EXPECT_GE(static_cast<double>(within), 0.99 * static_cast<double>(entries));
}
