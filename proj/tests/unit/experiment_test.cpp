#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "drillsim/experiment.hpp"
#include "json.hpp"

using namespace drillsim;

namespace fs = std::filesystem;

TEST_CASE("empty config gives the egg defaults") {
  const auto c = config_from_json("{}");
  CHECK(c.profile == Profile::Egg);
  CHECK(c.arm == Arm::Full);
  CHECK(c.image.target_mape == 15.05);
  CHECK(c.force.accuracy.intercept == 81.43);
  CHECK(c.control.points == 320);
}

TEST_CASE("profiles and overrides") {
  const auto c = config_from_json(R"({
    "profile": "mouse", "arm": "plane", "trials": 7, "seed": 42,
    "control": {"descent_speed": -1e-5, "points": 160},
    "image": {"target_mape": 10.0, "shape": "symmetric", "samples": 16},
    "force": {"slope": -5.0},
    "surface": {"tilt_min_deg": 5, "tilt_max_deg": 5}
  })");
  CHECK(c.profile == Profile::Mouse);
  CHECK(c.arm == Arm::Plane);
  CHECK(c.trials == 7);
  CHECK(c.base_seed == 42);
  CHECK(c.control.descent_speed == -1e-5);
  CHECK(c.control.points == 160);
  CHECK(c.image.target_mape == 10.0);
  CHECK(c.image.shape == ImageNoiseShape::Symmetric);
  CHECK(c.force.accuracy.slope == -5.0);
  CHECK(c.force.accuracy.intercept == 74.01);
  CHECK(c.surface.tilt_min_deg == 5.0);
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_AS(config_from_json("{"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[]"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"colour": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"control": {"sped": 1}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"trials": 0})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"trials": "ten"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"profile": "rat"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"arm": "laser"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"control": {"descent_speed": 1e-6}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"image": {"samples": 7}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"image": {"shape": "wobbly"}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("perfect-sensor override") {
  ExperimentConfig c;
  c.perfect_sensors = true;
  const auto t = trial_config(c, Arm::Full);
  CHECK(t.image.target_mape == 0.0);
  CHECK(t.force.exact_hits);
}

TEST_CASE("summary statistics") {
  std::vector<TrialRecord> recs{
      {0, Arm::Full, Classification::Success, 4.0, 1, true, 3.0, 5.0},
      {1, Arm::Full, Classification::Success, 6.0, 2, true, 5.0, 5.0},
      {2, Arm::Full, Classification::OverDrillModel, 3.0, 3, true, 2.0, 5.0},
      {3, Arm::Full, Classification::OverDrillIntervened, 1.0, 4, false, 0.0, 5.0},
  };
  const auto s = summarize(Arm::Full, recs);
  CHECK(s.success_pct == 50.0);
  CHECK(s.over_drill_model_pct == 25.0);
  CHECK(s.over_drill_intervened_pct == 25.0);
  CHECK(s.under_drill_pct == 0.0);
  CHECK(*s.mean_time_success_min == 5.0);
  CHECK(*s.median_time_to_criterion_min == 3.0);

  const auto none = summarize(Arm::Full, {recs[3]});
  CHECK_FALSE(none.mean_time_success_min.has_value());
  CHECK_FALSE(none.median_time_to_criterion_min.has_value());
}

TEST_CASE("batch runs are ordered and thread-count independent") {
  ExperimentConfig c;
  c.trials = 3;
  c.perfect_sensors = true;
  c.threads = 1;
  const auto one = run_batch(c, Arm::Baseline);
  c.threads = 3;
  const auto three = run_batch(c, Arm::Baseline);
  REQUIRE(one.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one.records[i].trial == i);
    CHECK(one.records[i].seed == c.base_seed + i);
    CHECK(one.records[i].classification == three.records[i].classification);
    CHECK(one.records[i].time_min == three.records[i].time_min);
  }
  CHECK(one.summary.success_pct == 100.0);
}

TEST_CASE("output files") {
  const fs::path dir = fs::temp_directory_path() / "drillsim_experiment_test";
  fs::remove_all(dir);
  ExperimentConfig c;
  c.trials = 1;
  c.perfect_sensors = true;
  c.write_traces = true;
  c.output_dir = dir / "nested";
  const std::vector<BatchResult> results{run_batch(c, Arm::Full)};
  write_outputs(c, results);

  std::ifstream csv(dir / "nested" / "trials.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "trial,arm,classification,time_min,seed");
  CHECK(row.rfind("0,full,success,", 0) == 0);

  std::ifstream js(dir / "nested" / "summary.json");
  const auto doc = nlohmann::json::parse(js);
  CHECK(doc["arms"][0]["arm"] == "full");
  CHECK(doc["arms"][0]["success_pct"] == 100.0);
  CHECK(fs::exists(dir / "nested" / "trace_full_0.csv"));

  c.dump_surface = true;
  dump_surface(c);
  CHECK(fs::exists(dir / "nested" / "surface.csv"));

  // A regular file where the output directory should be.
  std::ofstream(dir / "blocker") << "x";
  c.output_dir = dir / "blocker" / "out";
  CHECK_THROWS_AS(write_outputs(c, results), IoError);
  fs::remove_all(dir);
}
