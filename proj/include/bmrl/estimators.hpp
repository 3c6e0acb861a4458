#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bmrl/ai_planner.hpp"
#include "bmrl/equivalence.hpp"
#include "bmrl/world.hpp"

namespace bmrl {

// What the AI observes: the human's state and the action that led into it
// (prev_action = -1 at the start of an episode, before any action exists).
struct AiStateRef {
  int state = 0;
  int prev_action = -1;
};

inline int id_of(const AiStateSpace& sp, const AiStateRef& ref) {
  return ref.prev_action < 0 ? sp.sentinel() : sp.id(ref.state, ref.prev_action);
}

// One logged interaction step: AI state, intervention, the AI's reward for the
// epoch (step/intervention cost plus any terminal bonus), successor AI state.
struct LogTuple {
  AiStateRef s;
  AiAction x = AiAction::NoOp;
  double reward = 0.0;
  AiStateRef s2;
};

// Online intervention policy interface. The harness calls act() each epoch,
// observe() with the resulting tuple, and end_episode() at episode boundaries.
// Fitting estimators refit whenever new data has arrived, so a policy that
// stalls mid-episode is revised at the next decision rather than at the next
// episode; one bad draw then costs an epoch, not a whole episode.
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual AiAction act(const AiStateRef& s, Rng& rng) = 0;
  virtual void observe(const LogTuple&) {}
  virtual void end_episode(Rng&) {}
};

// --- chainworld likelihood fit ---------------------------------------------

struct FitConfig {
  int n_candidates = 5000;
  int n_states = 10;  // chain length of the fitted model
};

struct FitResult {
  ChainworldParams params;
  double tau = 0.1;
  double log_likelihood = 0.0;
};

// Draw one candidate from the published parameter ranges: r_g in [5,50],
// r_d in [0,5], r_l in [-5,0], r_b in [-1,0], gamma in [0.01,0.99], p_g and
// p_d0 in [0,1], (p_d,p_l) uniform on the triangle p_d+p_l<=1, delta_gamma
// and delta_b in [0,1], tau in [0.01,0.3].
FitResult sample_fit_candidate(const FitConfig& cfg, Rng& rng);

// Log-likelihood of chain-coordinate tuples under a softmax human with the
// given parameters: per tuple, log pi(a'|s, x) + log T(s, a', s'). Returns
// -inf when any tuple has probability zero under the model. Reference
// implementation; the fitter uses an equivalent bucketed fast path.
double chain_log_likelihood(const ChainworldParams& p, double tau,
                            const std::vector<LogTuple>& tuples);

// Best-of-n_candidates maximum likelihood fit (ties keep the earliest
// candidate; with no data every candidate ties at zero, so the first draw is
// returned, making the empty-data fit seed-deterministic).
//
// With an incumbent, the incumbent is re-scored on the current data and only
// replaced by a strictly better candidate, and half the budget perturbs the
// best-so-far instead of sampling fresh. Retention stops a fitted model whose
// policy is working from being swapped for a random near-tie, and the local
// proposals reach likelihood levels that plain uniform sampling only finds
// with ~100x the budget.
FitResult fit_chainworld(const std::vector<LogTuple>& tuples, const FitConfig& cfg,
                         Rng& rng, const FitResult* incumbent = nullptr);

// --- estimator implementations ----------------------------------------------

// Plans by fitting a chainworld to (optionally mapped) experience and applying
// the window policy of the fitted parameters. Refits lazily before the first
// decision that follows new data (fresh candidate draws each refit, so a fit
// that the data cannot distinguish from better ones is re-drawn rather than
// kept).
class ChainworldEstimator : public Estimator {
 public:
  // Mapping translates raw world tuples into chain coordinates; pass the
  // identity mapping for chainworld conditions.
  ChainworldEstimator(Mapping mapping, FitConfig fit_cfg, AiConfig ai_cfg);

  AiAction act(const AiStateRef& s, Rng& rng) override;
  void observe(const LogTuple& t) override;
  void end_episode(Rng& rng) override;

  const FitResult& current_fit() const { return fit_; }

 private:
  void refit(Rng& rng);

  Mapping map_;
  FitConfig fit_cfg_;
  AiConfig ai_cfg_;
  std::vector<LogTuple> data_;  // chain coordinates
  FitResult fit_;
  std::vector<AiAction> labels_;
  bool dirty_ = true;    // data (or nothing at all) not yet fitted
  bool has_fit_ = false;  // fit_ holds a real fit, usable as an incumbent
};

// Tabular certainty-equivalent planner over AI states: transition counts with
// add-beta smoothing toward the uniform distribution, known rewards, value
// iteration re-solved (warm-started) after every observed transition.
class ModelBasedEstimator : public Estimator {
 public:
  ModelBasedEstimator(AiStateSpace space, std::vector<char> terminal,
                      std::vector<double> terminal_value, AiConfig cfg,
                      double smoothing = 1.0);

  AiAction act(const AiStateRef& s, Rng& rng) override;
  void observe(const LogTuple& t) override;
  void end_episode(Rng& rng) override;

 private:
  void refit();

  AiStateSpace space_;
  std::vector<char> terminal_;
  std::vector<double> terminal_value_;
  AiConfig cfg_;
  double beta_;
  // Sparse successor counts per (ai state, intervention).
  std::vector<std::vector<std::pair<int, int>>> counts_;
  std::vector<int> totals_;
  std::vector<double> v_;
  std::vector<AiAction> policy_;
};

// Epsilon-greedy tabular Q-learning over AI states; terminals bootstrap zero.
class QLearningEstimator : public Estimator {
 public:
  QLearningEstimator(AiStateSpace space, std::vector<char> terminal, AiConfig cfg,
                     double learning_rate = 0.9, double epsilon = 0.1);

  AiAction act(const AiStateRef& s, Rng& rng) override;
  void observe(const LogTuple& t) override;

 private:
  AiStateSpace space_;
  std::vector<char> terminal_;
  AiConfig cfg_;
  double lr_;
  double eps_;
  std::vector<double> q_;
};

class FixedEstimator : public Estimator {
 public:
  explicit FixedEstimator(AiAction x) : x_(x) {}
  AiAction act(const AiStateRef&, Rng&) override { return x_; }

 private:
  AiAction x_;
};

class RandomEstimator : public Estimator {
 public:
  AiAction act(const AiStateRef&, Rng& rng) override {
    return static_cast<AiAction>(rng.uniform_int(0, kNumAiActions - 1));
  }
};

// Plays a fixed per-world-state labelling (the oracle policies of the true
// world: the window policy for chains, the exact solve otherwise).
class LabelledEstimator : public Estimator {
 public:
  explicit LabelledEstimator(std::vector<AiAction> labels)
      : labels_(std::move(labels)) {}
  AiAction act(const AiStateRef& s, Rng&) override { return labels_[s.state]; }

 private:
  std::vector<AiAction> labels_;
};

// Build an estimator by name: oracle, chainworld, model_based, model_free,
// always_gamma, always_burden, random. `truth` is the condition's world;
// `abstraction` supplies the chainworld estimator's mapping for non-chain
// conditions (chain conditions derive the identity mapping internally).
std::unique_ptr<Estimator> make_estimator(
    const std::string& name, const World& truth,
    const std::optional<ChainAbstraction>& abstraction, const AiConfig& ai_cfg,
    const FitConfig& fit_cfg);

}  // namespace bmrl
