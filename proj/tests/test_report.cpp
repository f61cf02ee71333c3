#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coarse/experiment.hpp"
#include "coarse/report.hpp"

using namespace coarse;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("coarse_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_tree_config(const fs::path& out) {
  ExperimentConfig c;
  c.name = "tree-embed";
  c.params = {{"depth", 6}, {"S", {2, 4}}, {"p", {2}}};
  c.output = out;
  return c;
}

}  // namespace

TEST(Format, Doubles) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_cell(Cell{Rational(3, 4)}), "3/4");
  EXPECT_EQ(format_cell(Cell{true}), "true");
  EXPECT_EQ(format_cell(Cell{}), "");
}

TEST(Csv, HeaderOnlyAndEscaping) {
  Table t{"t", {"a", "b"}, {}};
  std::ostringstream out;
  write_csv(t, out);
  EXPECT_EQ(out.str(), "a,b\n");
  t.add({std::string("x,y"), std::string("say \"hi\"")});
  std::ostringstream out2;
  write_csv(t, out2);
  EXPECT_EQ(out2.str(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
  EXPECT_THROW(t.add({std::int64_t{1}}), std::logic_error);
}

TEST(Json, TableRoundTrip) {
  Table t{"t", {"n", "x", "q", "s", "b", "e"}, {}};
  t.add({std::int64_t{3}, 0.25, Rational(1, 3), std::string("hi"), false, Cell{}});
  auto j = to_json(t);
  EXPECT_EQ(j["rows"][0]["q"], "1/3");
  auto back = table_from_json("t", j);
  EXPECT_EQ(back.columns, t.columns);
  std::ostringstream a, b;
  write_csv(t, a);
  write_csv(back, b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Emit, WritesJsonAndOneCsvPerTable) {
  auto dir = fresh_dir("emit");
  Report r;
  r.experiment = "demo";
  r.table("first", {"a"}).add({std::int64_t{1}});
  r.table("second", {"b"});
  auto written = emit_report(r, dir / "out");
  ASSERT_EQ(written.size(), 3u);
  EXPECT_EQ(slurp(dir / "out.second.csv"), "b\n");
  auto j = nlohmann::json::parse(slurp(dir / "out.json"));
  EXPECT_EQ(j["experiment"], "demo");
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Emit, UnwritableDirectoryThrowsAndLeavesNothing) {
  auto dir = fresh_dir("unwritable");
  Report r;
  r.table("t", {"a"});
  EXPECT_THROW(emit_report(r, dir / "missing" / "out"), std::runtime_error);
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Runs, SameConfigGivesIdenticalBytes) {
  auto dir = fresh_dir("determinism");
  std::ostringstream log;
  ASSERT_EQ(run_and_emit(small_tree_config(dir / "a"), log), kExitOk) << log.str();
  ASSERT_EQ(run_and_emit(small_tree_config(dir / "b"), log), kExitOk) << log.str();
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("a.", 0) != 0) continue;
    EXPECT_EQ(slurp(e.path()), slurp(dir / ("b." + name.substr(2)))) << name;
  }
}

TEST(Runs, EffectiveParametersAreRecorded) {
  auto r = run_experiment(small_tree_config({}));
  EXPECT_EQ(r.parameters["seed"], 1);
  EXPECT_EQ(r.parameters["params"]["depth"], 6);
  EXPECT_TRUE(r.parameters["params"].contains("valence"));
}

TEST(ExitCodes, ConfigErrorWritesNothing) {
  auto dir = fresh_dir("config_error");
  auto c = small_tree_config(dir / "out");
  c.params["dpeth"] = 3;
  std::ostringstream log;
  EXPECT_EQ(run_and_emit(c, log), kExitConfig);
  EXPECT_NE(log.str().find("dpeth"), std::string::npos);
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(ExitCodes, CapExceededWritesNothing) {
  auto dir = fresh_dir("cap");
  auto c = small_tree_config(dir / "out");
  c.cap = 20;
  std::ostringstream log;
  EXPECT_EQ(run_and_emit(c, log), kExitCap);
  EXPECT_TRUE(fs::is_empty(dir));
  // The cap applies to that run only.
  c.cap.reset();
  EXPECT_EQ(run_and_emit(c, log), kExitOk);
}

TEST(ExitCodes, UnwritableOutputIsAFailure) {
  auto dir = fresh_dir("io");
  std::ostringstream log;
  EXPECT_EQ(run_and_emit(small_tree_config(dir / "missing" / "out"), log), kExitAssertion);
}

TEST(Config, ParsesAndRejectsUnknownKeys) {
  auto c = config_from_json({{"experiment", "cp-check"}, {"seed", 4}, {"params", {{"p", 2}}}});
  EXPECT_EQ(c.name, "cp-check");
  EXPECT_EQ(c.seed, 4u);
  EXPECT_THROW(config_from_json({{"experiment", "cp-check"}, {"sede", 4}}), ConfigError);
  EXPECT_THROW(config_from_json({{"params", {}}}), ConfigError);
  ExperimentConfig bad;
  bad.name = "no-such-experiment";
  EXPECT_THROW(run_experiment(bad), ConfigError);
}
