#include <cmath>
#include <stdexcept>
#include <vector>

#include "bmrl/ai_planner.hpp"
#include "bmrl/harness.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bmrl::AiAction;
using bmrl::AiConfig;
using bmrl::AiStateRef;
using bmrl::ChainPopulation;
using bmrl::ChainworldParams;
using bmrl::ChainWorld;
using bmrl::Condition;
using bmrl::LogTuple;
using bmrl::Rng;
using bmrl::SuiteConfig;

namespace {

// A cooperative deterministic human: always acts unaided, never slips into
// anything random (p_g = 1, worthless terminals).
ChainworldParams cooperative() {
  ChainworldParams p;
  p.r_b = -0.1;
  p.r_l = 0.0;
  p.r_d = 0.0;
  return p;
}

class RecordingEstimator : public bmrl::Estimator {
 public:
  AiAction act(const AiStateRef& s, Rng&) override {
    refs.push_back(s);
    return AiAction::NoOp;
  }
  void observe(const LogTuple& t) override { tuples.push_back(t); }

  std::vector<AiStateRef> refs;
  std::vector<LogTuple> tuples;
};

// Collapse every range to a point so all trials share one world.
ChainPopulation point_population(const ChainworldParams& p) {
  ChainPopulation pop;
  pop.n_states = p.n_states;
  pop.r_b = {p.r_b, p.r_b};
  pop.r_d = {p.r_d, p.r_d};
  pop.r_l = {p.r_l, p.r_l};
  pop.r_g = {p.r_g, p.r_g};
  pop.gamma = {p.gamma, p.gamma};
  pop.p_d = {p.p_d, p.p_d};
  pop.p_d0 = {p.p_d0, p.p_d0};
  pop.p_l = {p.p_l, p.p_l};
  pop.p_g = p.p_g;
  pop.delta_gamma = p.delta_gamma;
  pop.delta_b = p.delta_b;
  return pop;
}

}  // namespace

TEST_CASE("population draws respect their ranges") {
  const ChainPopulation pop;
  Rng rng(109);
  for (int i = 0; i < 500; ++i) {
    const auto p = bmrl::sample_chain_params(pop, rng);
    CHECK(p.r_b >= -1.0);
    CHECK(p.r_b <= -0.2);
    CHECK(p.r_g >= 5.0);
    CHECK(p.r_g <= 15.0);
    CHECK(p.gamma >= 0.01);
    CHECK(p.gamma <= 0.99);
    CHECK(p.p_d >= 0.1);
    CHECK(p.p_d <= 0.5);
    CHECK(p.p_d0 >= p.p_d);  // never safer at the start than mid-chain
    CHECK(p.p_d0 <= 0.5);
    CHECK(p.p_g == 1.0);
    CHECK(p.delta_gamma == 0.3);
    CHECK(p.delta_b == 0.4);
  }
}

TEST_CASE("grid draws default to size-scaled reward ranges") {
  bmrl::GridPopulation pop;  // 8 x 5
  Rng rng(113);
  for (int i = 0; i < 300; ++i) {
    const auto g = bmrl::sample_grid_spec(pop, rng);
    CHECK(g.r_g >= 5.0);
    CHECK(g.r_g <= 10.0);
    CHECK(g.r_d >= 0.0);
    CHECK(g.r_d <= 1.0);
    CHECK(g.p >= 0.5);
    CHECK(g.p <= 1.0);
  }
  pop.r_g = bmrl::Range{2.0, 3.0};
  const auto g = bmrl::sample_grid_spec(pop, rng);
  CHECK(g.r_g >= 2.0);
  CHECK(g.r_g <= 3.0);
}

TEST_CASE("world sampling filters the humans the AI cannot help") {
  // With both intervention levers disabled, a human is helpless exactly when
  // it never reaches the goal unaided, which is common but not universal
  // under the default parameter ranges.
  Condition c;
  c.chain.delta_gamma = 0.0;
  c.chain.delta_b = 0.0;
  const AiConfig ai;

  Rng rng(127);
  for (int i = 0; i < 20; ++i) {
    const auto w = bmrl::sample_world(c, true, rng);
    CHECK_FALSE(bmrl::is_helpless(*w, ai));
  }

  // Without filtering, the same population does produce helpless humans.
  Rng raw(127);
  int helpless = 0;
  for (int i = 0; i < 50; ++i) {
    helpless += bmrl::is_helpless(*bmrl::sample_world(c, false, raw), ai);
  }
  CHECK(helpless > 0);
}

TEST_CASE("unknown condition worlds are rejected") {
  Condition c;
  c.world = "maze";
  Rng rng(131);
  CHECK_THROWS_AS(bmrl::sample_world(c, false, rng), std::invalid_argument);
}

TEST_CASE("only grid conditions carry a chain abstraction") {
  Condition chain_cond;
  Rng rng(137);
  const auto w = bmrl::sample_world(chain_cond, true, rng);
  CHECK_FALSE(bmrl::condition_abstraction(chain_cond, *w).has_value());

  Condition grid_cond;
  grid_cond.world = "grid";
  const auto g = bmrl::sample_world(grid_cond, true, rng);
  const auto abs = bmrl::condition_abstraction(grid_cond, *g);
  REQUIRE(abs.has_value());
  CHECK(abs->chain.n_states == 10);  // 8 + 5 - 3
  CHECK(int(abs->mapping.f.size()) == g->n_states());
}

TEST_CASE("an episode logs exactly what the estimator is told") {
  ChainWorld w{cooperative()};
  RecordingEstimator rec;
  const AiConfig ai;
  Rng rng(139);
  int steps = 0;
  const double total = bmrl::run_episode(w, rec, ai, rng, &steps);

  CHECK(steps == 10);  // deterministic walk to the goal
  CHECK(total == doctest::Approx(10 * ai.r_step + ai.r_goal));
  REQUIRE(rec.refs.size() == 10);
  REQUIRE(rec.tuples.size() == 10);

  CHECK(rec.refs[0].state == 0);
  CHECK(rec.refs[0].prev_action == -1);  // nothing has happened yet
  for (int i = 1; i < 10; ++i) {
    CHECK(rec.refs[i].state == i);
    CHECK(rec.refs[i].prev_action == 1);
  }
  double sum = 0.0;
  for (const auto& t : rec.tuples) sum += t.reward;
  CHECK(sum == doctest::Approx(total));
  CHECK(rec.tuples.back().s2.state == bmrl::goal_state(cooperative()));
  CHECK(rec.tuples.back().reward == doctest::Approx(ai.r_step + ai.r_goal));
  CHECK(rec.tuples.back().s2.prev_action == 1);
}

TEST_CASE("episodes cut off at the step budget when nobody absorbs") {
  ChainworldParams p;
  p.gamma = 0.01;  // too impatient to act
  p.p_d = 0.0;
  p.p_d0 = 0.0;
  p.p_l = 0.0;  // ... and no hazard: the human just sits there
  ChainWorld w{p};
  bmrl::FixedEstimator idle(AiAction::NoOp);
  AiConfig ai;
  ai.max_steps = 25;
  Rng rng(149);
  int steps = 0;
  const double total = bmrl::run_episode(w, idle, ai, rng, &steps);
  CHECK(steps == 25);
  CHECK(total == doctest::Approx(25 * ai.r_step));
}

TEST_CASE("a trial keeps one reward per episode") {
  ChainWorld w{cooperative()};
  bmrl::FixedEstimator idle(AiAction::NoOp);
  const AiConfig ai;
  Rng rng(151);
  const auto rewards = bmrl::run_trial(w, idle, 5, ai, rng);
  REQUIRE(rewards.size() == 5);
  for (const double r : rewards) {
    CHECK(r == doctest::Approx(10 * ai.r_step + ai.r_goal));
  }
}

TEST_CASE("a deterministic point population collapses the error bars") {
  SuiteConfig cfg;
  cfg.n_trials = 4;
  cfg.n_episodes = 3;
  cfg.estimators = {"oracle"};
  Condition c;
  c.name = "point";
  c.chain = point_population(cooperative());
  cfg.conditions = {c};

  const auto result = bmrl::run_suite(cfg);
  REQUIRE(result.conditions.size() == 1);
  REQUIRE(result.conditions[0].curves.size() == 1);
  const auto& curve = result.conditions[0].curves[0];
  REQUIRE(curve.episodes.size() == 3);
  for (const auto& pt : curve.episodes) {
    CHECK(pt.n == 4);
    CHECK(pt.se == 0.0);
    // The oracle leaves a cooperative human alone: the idle walk's reward.
    CHECK(pt.mean == doctest::Approx(10 * cfg.ai.r_step + cfg.ai.r_goal));
  }
}

TEST_CASE("results do not depend on which other estimators run") {
  SuiteConfig both;
  both.n_trials = 5;
  both.n_episodes = 3;
  both.estimators = {"oracle", "random"};
  both.conditions = {Condition{}};

  SuiteConfig alone = both;
  alone.estimators = {"random"};

  const auto full = bmrl::run_suite(both);
  const auto solo = bmrl::run_suite(alone);
  const auto& random_full = full.conditions[0].curves[1];
  const auto& random_solo = solo.conditions[0].curves[0];
  REQUIRE(random_full.estimator == "random");
  REQUIRE(random_solo.estimator == "random");
  for (int e = 0; e < 3; ++e) {
    CHECK(random_full.episodes[e].mean == random_solo.episodes[e].mean);
    CHECK(random_full.episodes[e].se == random_solo.episodes[e].se);
  }
}

TEST_CASE("thread count does not change the numbers") {
  SuiteConfig serial;
  serial.n_trials = 6;
  serial.n_episodes = 2;
  serial.estimators = {"oracle", "always_gamma", "random"};
  serial.conditions = {Condition{}};

  SuiteConfig threaded = serial;
  threaded.jobs = 3;

  CHECK(bmrl::csv_string(bmrl::run_suite(serial)) ==
        bmrl::csv_string(bmrl::run_suite(threaded)));
}

TEST_CASE("reruns are byte-identical") {
  SuiteConfig cfg;
  cfg.n_trials = 3;
  cfg.n_episodes = 2;
  cfg.estimators = {"random", "always_burden"};
  cfg.conditions = {Condition{}};
  CHECK(bmrl::csv_string(bmrl::run_suite(cfg)) ==
        bmrl::csv_string(bmrl::run_suite(cfg)));
}

TEST_CASE("the CSV lists one row per condition, estimator, and episode") {
  SuiteConfig cfg;
  cfg.n_trials = 2;
  cfg.n_episodes = 2;
  cfg.estimators = {"oracle"};
  Condition a;
  a.name = "alpha";
  Condition b;
  b.name = "beta";
  cfg.conditions = {a, b};

  const std::string csv = bmrl::csv_string(bmrl::run_suite(cfg));
  CHECK(csv.rfind("condition,estimator,episode,mean,se,n\n", 0) == 0);
  int lines = 0;
  for (const char ch : csv) lines += ch == '\n';
  CHECK(lines == 1 + 2 * 1 * 2);
  CHECK(csv.find("alpha,oracle,1,") != std::string::npos);
  CHECK(csv.find("beta,oracle,2,") != std::string::npos);
}

TEST_CASE("suite configs are validated before running") {
  SuiteConfig cfg;
  cfg.conditions = {Condition{}};
  cfg.n_trials = 0;
  CHECK_THROWS_AS(bmrl::run_suite(cfg), std::invalid_argument);
  cfg.n_trials = 1;
  cfg.n_episodes = 0;
  CHECK_THROWS_AS(bmrl::run_suite(cfg), std::invalid_argument);
  cfg.n_episodes = 1;
  cfg.conditions.clear();
  CHECK_THROWS_AS(bmrl::run_suite(cfg), std::invalid_argument);
}
