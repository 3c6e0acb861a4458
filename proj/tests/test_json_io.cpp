#include <fstream>
#include <stdexcept>

#include "bmrl/json_io.hpp"
#include "doctest.h"

using bmrl::json;

TEST_CASE("chain parameters round-trip through JSON") {
  bmrl::ChainworldParams p;
  p.r_g = 12.5;
  p.gamma = 0.42;
  p.p_d = 0.17;
  const json j = p;
  const auto q = j.get<bmrl::ChainworldParams>();
  CHECK(q.r_g == p.r_g);
  CHECK(q.gamma == p.gamma);
  CHECK(q.p_d == p.p_d);
  CHECK(q.n_states == p.n_states);
}

TEST_CASE("missing fields keep their defaults") {
  const json j = json::parse(R"({"gamma": 0.25})");
  const auto p = j.get<bmrl::ChainworldParams>();
  CHECK(p.gamma == 0.25);
  CHECK(p.r_g == bmrl::ChainworldParams{}.r_g);
  CHECK(p.n_states == 10);
}

TEST_CASE("ranges serialize as [lo, hi] pairs") {
  const bmrl::Range r{-1.5, 2.5};
  const json j = r;
  REQUIRE(j.is_array());
  CHECK(j[0] == -1.5);
  CHECK(j[1] == 2.5);
  const auto back = j.get<bmrl::Range>();
  CHECK(back.lo == r.lo);
  CHECK(back.hi == r.hi);

  CHECK_THROWS(json::parse("[1, 2, 3]").get<bmrl::Range>());
}

TEST_CASE("suite configs round-trip including conditions") {
  bmrl::SuiteConfig cfg;
  cfg.seed = 99;
  cfg.n_trials = 42;
  cfg.estimators = {"oracle", "random"};
  bmrl::Condition c;
  c.name = "noisy";
  c.noise = bmrl::NoiseSpec{"r_g", 0.5};
  c.mode.softmax = true;
  c.mode.tau = 0.05;
  c.chain.gamma = {0.2, 0.8};
  cfg.conditions = {c};

  const json j = cfg;
  const auto back = j.get<bmrl::SuiteConfig>();
  CHECK(back.seed == 99);
  CHECK(back.n_trials == 42);
  REQUIRE(back.estimators.size() == 2);
  REQUIRE(back.conditions.size() == 1);
  CHECK(back.conditions[0].name == "noisy");
  REQUIRE(back.conditions[0].noise.has_value());
  CHECK(back.conditions[0].noise->param == "r_g");
  CHECK(back.conditions[0].noise->epsilon == 0.5);
  CHECK(back.conditions[0].mode.softmax);
  CHECK(back.conditions[0].mode.tau == 0.05);
  CHECK(back.conditions[0].chain.gamma.lo == 0.2);
  CHECK(back.conditions[0].chain.gamma.hi == 0.8);
}

TEST_CASE("grid conditions carry their population, not a chain one") {
  bmrl::Condition c;
  c.name = "grid-wide";
  c.world = "grid";
  c.grid.width = 10;
  c.grid.height = 7;
  c.grid.goal_dy = 2;
  const json j = c;
  const auto back = j.get<bmrl::Condition>();
  CHECK(back.world == "grid");
  CHECK(back.grid.width == 10);
  CHECK(back.grid.height == 7);
  CHECK(back.grid.goal_dy == 2);
  CHECK_FALSE(back.noise.has_value());
}

TEST_CASE("worlds build from tagged JSON blobs") {
  const json chain = json::parse(R"({
    "type": "chainworld",
    "params": {"gamma": 0.5, "r_b": -0.7},
    "mode": {"softmax": true, "tau": 0.1}
  })");
  const auto w = bmrl::world_from_json(chain);
  CHECK(w->n_states() == 12);
  CHECK(w->gamma() == 0.5);
  CHECK(w->mode().softmax);

  const json grid = json::parse(R"({
    "type": "grid",
    "params": {"width": 6, "height": 3}
  })");
  const auto g = bmrl::world_from_json(grid);
  CHECK(g->n_states() == 18);

  const json mca = json::parse(R"({
    "type": "multichain_a",
    "params": {"n0": 5, "p_branch": [0.1, 0.2]}
  })");
  CHECK(bmrl::world_from_json(mca)->n_states() == 7);

  const json mcb = json::parse(R"({
    "type": "multichain_b",
    "params": {"n0": 3, "n1": 2}
  })");
  CHECK(bmrl::world_from_json(mcb)->n_states() == 8);

  const json mono = json::parse(R"({
    "type": "monotonic",
    "params": {"n_states": 4, "p_d": [0.4, 0.3, 0.2, 0.1]}
  })");
  CHECK(bmrl::world_from_json(mono)->n_states() == 6);
}

TEST_CASE("noise is a chainworld-only world option") {
  const json noisy_chain = json::parse(R"({
    "type": "chainworld",
    "params": {},
    "noise": {"param": "r_g", "epsilon": 0.5}
  })");
  CHECK_FALSE(bmrl::world_from_json(noisy_chain)->stationary());

  const json noisy_grid = json::parse(R"({
    "type": "grid",
    "params": {},
    "noise": {"param": "r_g", "epsilon": 0.5}
  })");
  CHECK_THROWS_AS(bmrl::world_from_json(noisy_grid), std::invalid_argument);

  const json unknown = json::parse(R"({"type": "cube", "params": {}})");
  CHECK_THROWS_AS(bmrl::world_from_json(unknown), std::invalid_argument);
}

TEST_CASE("file loading reports the offending path") {
  CHECK_THROWS_WITH_AS(bmrl::load_json_file("/nonexistent/config.json"),
                       doctest::Contains("/nonexistent/config.json"),
                       std::invalid_argument);

  const std::string path = "bad_config_test.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(bmrl::load_json_file(path), std::invalid_argument);
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << R"({"n_trials": 7})";
  }
  const json j = bmrl::load_json_file(path);
  CHECK(j["n_trials"] == 7);
  std::remove(path.c_str());
}

TEST_CASE("manifests hash the config and omit timestamps") {
  const json cfg = json::parse(R"({"seed": 5, "n_trials": 10})");
  const json m1 = bmrl::make_manifest(cfg, 5, "suite");
  const json m2 = bmrl::make_manifest(cfg, 5, "suite");
  CHECK(m1 == m2);  // nothing time-dependent inside
  CHECK(m1.at("seed") == 5);
  CHECK(m1.at("subcommand") == "suite");
  CHECK(m1.contains("config_hash"));
  CHECK(m1.contains("version"));
  CHECK_FALSE(m1.contains("timestamp"));

  const json other = bmrl::make_manifest(json::parse(R"({"seed": 6})"), 5, "suite");
  CHECK(other.at("config_hash") != m1.at("config_hash"));
}

TEST_CASE("suite results serialize with their curves") {
  bmrl::SuiteResult r;
  bmrl::ConditionResult cond;
  cond.condition = "demo";
  bmrl::EstimatorCurve curve;
  curve.estimator = "oracle";
  curve.episodes = {{-4.0, 0.5, 200}, {-3.0, 0.25, 200}};
  cond.curves = {curve};
  r.conditions = {cond};

  const json j = r;
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  const auto& jc = j[0];
  CHECK(jc.at("condition") == "demo");
  CHECK(jc.at("curves")[0].at("estimator") == "oracle");
  CHECK(jc.at("curves")[0].at("episodes")[1].at("mean") == -3.0);
  CHECK(jc.at("curves")[0].at("episodes")[0].at("n") == 200);
}
