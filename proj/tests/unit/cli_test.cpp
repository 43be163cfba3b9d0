#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"

using plm::testing::read_file;
using plm::testing::TempDir;
using plm::testing::write_file;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome plm_run(std::vector<std::string> args) {
  args.insert(args.begin(), "plm");
  std::ostringstream out, err;
  const int code = plm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& text, const std::string& what) {
  return text.find(what) != std::string::npos;
}

}  // namespace

TEST(Cli, HelpAndBadArguments) {
  EXPECT_EQ(plm_run({"--help"}).code, 0);
  EXPECT_TRUE(contains(plm_run({"--help"}).out, "generate"));
  EXPECT_EQ(plm_run({}).code, 1);
  EXPECT_EQ(plm_run({"frobnicate"}).code, 1);
  EXPECT_EQ(plm_run({"label", "--tau", "abc"}).code, 1);
}

TEST(Cli, CyclicStructureIsRejectedWithTheCycle) {
  TempDir dir("cli_cycle");
  write_file(dir / "structure.json",
             R"({"edges": [{"parent": "Weather", "child": "Road"}, {"parent": "Road", "child": "Weather"}]})");
  const auto r = plm_run({"--structure", (dir / "structure.json").string(), "generate", "--frames", "1",
                          "--out", (dir / "gen").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.err, "Weather -> Road -> Weather") || contains(r.err, "Road -> Weather -> Road"))
      << r.err;
}

TEST(Cli, MissingFileIsAnIoError) {
  TempDir dir("cli_missing");
  const auto missing = (dir / "nope.csv").string();
  const auto r = plm_run({"label", "--detections", missing, "--ground-truth", missing, "--out",
                          (dir / "l.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, missing)) << r.err;
  const auto m = plm_run({"query", "--model", (dir / "model.json").string(), "--target", "FN=yes",
                          "--cell", "0,0"});
  EXPECT_EQ(m.code, 2);
}

TEST(Cli, PipelineProducesStampedArtifacts) {
  TempDir dir("cli_pipeline");
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  ASSERT_EQ(plm_run({"--seed", "5", "generate", "--frames", "60", "--objects", "30", "--out", p("gen")}).code, 0);
  for (const auto* f : {"detections.csv", "ground_truth.csv", "truth.json", "schema.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "gen" / f)) << f;
  }
  EXPECT_TRUE(contains(read_file(dir / "gen" / "detections.csv"), "# config="));

  auto r = plm_run({"label", "--detections", p("gen/detections.csv"), "--ground-truth",
                    p("gen/ground_truth.csv"), "--out", p("labeled.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(read_file(dir / "labeled.csv"), "# tau=1"));

  ASSERT_EQ(plm_run({"partition", "--in", p("labeled.csv"), "--out", p("cells")}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "cells" / "manifest.json"));
  r = plm_run({"learn", "--cells", p("cells"), "--out", p("model.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(read_file(dir / "model.json"), "\"config_hash\""));

  r = plm_run({"query", "--model", p("model.json"), "--cell", "7,5", "--target", "FN=yes"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(r.out.empty());
  r = plm_run({"query", "--model", p("model.json"), "--all-cells", "--target", "FN=yes"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "col,row,value"));

  r = plm_run({"map", "--model", p("model.json"), "--kind", "cplm", "--target", "FN=yes", "--evidence",
               "Occlusion=largely_occluded", "--csv", p("cplm.csv"), "--image", p("cplm.ppm")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(read_file(dir / "cplm.csv.meta.json"), "\"config_hash\""));
  EXPECT_TRUE(contains(read_file(dir / "cplm.ppm"), "config="));
  EXPECT_EQ(plm_run({"map", "--model", p("model.json"), "--kind", "plm", "--target", "FN=yes", "--evidence",
                     "Weather=rain"})
                .code,
            1);
  EXPECT_EQ(plm_run({"query", "--model", p("model.json"), "--cell", "99,0", "--target", "FN=yes"}).code, 1);
  EXPECT_EQ(plm_run({"query", "--model", p("model.json"), "--cell", "1,1", "--target", "FN=perhaps"}).code, 1);

  r = plm_run({"--seed", "3", "split", "--in", p("labeled.csv"), "--train", p("train.csv"), "--test",
               p("test.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = plm_run({"eval", "--model", p("model.json"), "--test", p("test.csv"), "--out", p("eval.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(read_file(dir / "eval.csv"), "overall,"));
  r = plm_run({"diagnose", "--model", p("model.json"), "--out", p("diag.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(read_file(dir / "diag.txt"), "sparse_"));
}

TEST(Cli, ConfigHashIgnoresPaths) {
  TempDir a("cli_hash_a"), b("cli_hash_b");
  ASSERT_EQ(plm_run({"--seed", "9", "generate", "--frames", "5", "--objects", "4", "--out", (a / "g").string()}).code, 0);
  ASSERT_EQ(plm_run({"--seed", "9", "generate", "--frames", "5", "--objects", "4", "--out", (b / "g").string()}).code, 0);
  EXPECT_EQ(read_file(a / "g" / "detections.csv"), read_file(b / "g" / "detections.csv"));
  ASSERT_EQ(plm_run({"--seed", "10", "generate", "--frames", "5", "--objects", "4", "--out", (b / "h").string()}).code, 0);
  EXPECT_NE(read_file(a / "g" / "detections.csv"), read_file(b / "h" / "detections.csv"));
}
