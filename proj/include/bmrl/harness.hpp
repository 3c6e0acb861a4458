#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bmrl/estimators.hpp"
#include "bmrl/grid_world.hpp"
#include "bmrl/world.hpp"

namespace bmrl {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

double sample_range(const Range& r, Rng& rng);

// Per-trial sampling ranges for chainworld humans. p_g and the intervention
// effects are fixed per individual; p_d0 is drawn from [max(p_d, p_d0.lo),
// p_d0.hi] so the state-0 disengagement risk is never below the generic one.
struct ChainPopulation {
  int n_states = 10;
  Range r_b{-1.0, -0.2};
  Range r_d{0.0, 1.0};
  Range r_l{-1.0, 0.0};
  Range r_g{5.0, 15.0};
  Range gamma{0.01, 0.99};
  Range p_d{0.1, 0.5};
  Range p_d0{0.0, 0.5};
  Range p_l{0.0, 0.4};
  double p_g = 1.0;
  double delta_gamma = 0.3;
  double delta_b = 0.4;
};

ChainworldParams sample_chain_params(const ChainPopulation& pop, Rng& rng);

// Per-trial sampling ranges for gridworld humans. Reward ranges default to
// the size-scaled ones: r_g in [5W/8, 10W/8], r_d in [0, H/5]. goal_dy and
// diseng_dy displace the true goal / disengagement corners; the chain mapping
// keeps using the nominal corners, which is what makes those conditions
// misspecified.
struct GridPopulation {
  int width = 8;
  int height = 5;
  int goal_dy = 0;
  int diseng_dy = 0;
  Range r_b{-1.0, -0.2};
  Range gamma{0.01, 0.99};
  Range p{0.5, 1.0};
  std::optional<Range> r_g;  // default [5W/8, 10W/8]
  std::optional<Range> r_d;  // default [0, H/5]
  double delta_gamma = 0.3;
  double delta_b = 0.4;
};

GridSpec sample_grid_spec(const GridPopulation& pop, Rng& rng);

// One experimental condition: a world family plus how its humans act.
struct Condition {
  std::string name = "perfect";
  std::string world = "chainworld";  // "chainworld" or "grid"
  ActionMode mode;                   // softmax humans when mode.softmax
  std::optional<NoiseSpec> noise;    // chainworld-only per-step parameter noise
  ChainPopulation chain;
  GridPopulation grid;
};

struct SuiteConfig {
  std::uint64_t seed = 0;
  int n_trials = 200;
  int n_episodes = 15;
  bool filter_helpless = true;
  int jobs = 1;  // 0 = hardware concurrency
  std::vector<std::string> estimators = {"oracle",       "chainworld", "model_based",
                                         "model_free",   "always_gamma",
                                         "always_burden", "random"};
  AiConfig ai;
  FitConfig fit;
  std::vector<Condition> conditions;
};

struct CurvePoint {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean (0 when n < 2)
  int n = 0;
};

struct EstimatorCurve {
  std::string estimator;
  std::vector<CurvePoint> episodes;  // index 0 = episode 1
};

struct ConditionResult {
  std::string condition;
  std::vector<EstimatorCurve> curves;
};

struct SuiteResult {
  std::vector<ConditionResult> conditions;
};

// Draw one human for the condition. With filter_helpless, rejection-samples
// until the drawn human can reach the goal under the oracle policy, so every
// trial contributes; this matches conditioning on the reachable subpopulation.
std::unique_ptr<World> sample_world(const Condition& c, bool filter_helpless,
                                    Rng& rng);

// The chain mapping the fitting estimator uses for this condition: identity
// for chains, the nominal-corner grid reduction otherwise (anchored on the
// corner that is still correct when the other one is displaced).
std::optional<ChainAbstraction> condition_abstraction(const Condition& c,
                                                      const World& w);

// Roll one episode from the start state until absorption or ai.max_steps
// epochs. Per epoch: the estimator picks an intervention, the world advances
// one human decision, the estimator observes the resulting AI tuple. Returns
// the episode's total AI reward (step/intervention costs plus terminal bonus)
// and, if requested, the number of epochs taken.
double run_episode(World& w, Estimator& est, const AiConfig& ai, Rng& rng,
                   int* steps_out = nullptr);

// Run n_episodes episodes against one world, refitting at every episode
// boundary; returns per-episode total AI rewards.
std::vector<double> run_trial(World& w, Estimator& est, int n_episodes,
                              const AiConfig& ai, Rng& rng);

// Run all trials for one condition. Streams are keyed by (seed, condition
// name, estimator name, trial), so results for any one estimator do not
// depend on which other estimators or conditions are in the suite, and trials
// can run on any number of threads without changing the output.
ConditionResult run_condition(const Condition& c, const SuiteConfig& cfg);

SuiteResult run_suite(const SuiteConfig& cfg);

// CSV with header condition,estimator,episode,mean,se,n; episodes 1-based;
// %.10g numbers. Deterministic given (config, seed).
void write_csv(std::ostream& out, const SuiteResult& result);
std::string csv_string(const SuiteResult& result);

}  // namespace bmrl
