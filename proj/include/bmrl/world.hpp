#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmrl/chainworld.hpp"
#include "bmrl/mdp.hpp"
#include "bmrl/rng.hpp"

namespace bmrl {

enum class StateKind { Progress, Goal, Disengaged };

// How the simulated human picks actions: exact threshold/greedy optimum, or a
// Boltzmann (softmax) choice over action values with temperature tau.
struct ActionMode {
  bool softmax = false;
  double tau = 0.0;
};

// Per-step parameter noise: before every human decision one named parameter is
// resampled uniformly around its nominal value (half-width epsilon times a
// scale of 5 for rewards, 1 for probabilities and gamma) and clipped back into
// its domain. The realized value drives both the human's choice and the
// transition for that step.
struct NoiseSpec {
  std::string param;  // r_g, r_b, r_l, r_d, p_g, p_l, p_d, p_d0, gamma
  double epsilon = 0.0;
};

// A human decision process the AI can intervene on. Worlds expose two faces:
//  - an exact face (transitions / exact_mdp / action_probs / optimal_action)
//    describing the mean process, used by planners and oracles;
//  - a sampling face (begin_step / sample_action / sample_step) used by the
//    simulator, which may deviate per step when the world is noisy.
//
// Interventions never change the environment dynamics, only the parameters the
// human decides with (discount for InterveneGamma, burden reward for
// InterveneBurden), so transitions() takes no intervention argument while the
// decision-side queries do.
class World {
 public:
  virtual ~World() = default;

  virtual int n_states() const = 0;        // includes terminal states
  virtual int n_actions() const = 0;       // human actions
  virtual int start_state() const = 0;
  virtual StateKind kind(int s) const = 0;
  virtual double terminal_reward(int s) const = 0;
  virtual double gamma() const = 0;        // nominal human discount
  virtual const ActionMode& mode() const = 0;

  // True when the exact face describes every step (no per-step noise).
  virtual bool stationary() const { return true; }

  // Exact successor distribution of the mean process; empty for terminals.
  // Rewards are the human's step rewards, excluding terminal bonuses.
  virtual std::vector<ChainTransition> transitions(int s, int a) const = 0;

  // The human's decision problem under intervention x, as an explicit MDP
  // (same dynamics, choice-relevant parameters intervened).
  virtual ExplicitMdp exact_mdp(AiAction x) const = 0;

  // P(human action | state, active intervention) for the mean process.
  // Default: optimal mode puts mass 1 on optimal_action; softmax mode uses a
  // Boltzmann distribution over Q-values backed up from exact_mdp(x).
  virtual std::vector<double> action_probs(int s, AiAction x) const;

  // Deterministic optimal human action in the mean process.
  // Default: greedy on exact_mdp(x), ties to the lowest action index.
  virtual int optimal_action(int s, AiAction x) const;

  // --- sampling face (defaults suit stationary worlds) ---
  // Called once before each human decision; noisy worlds resample here.
  virtual void begin_step(Rng&) {}
  // Sample the human's action at s under intervention x.
  virtual int sample_action(int s, AiAction x, Rng& rng) const;
  // Sample the environment transition for the chosen action. The reward has
  // the terminal bonus folded into the entering transition.
  virtual StepResult sample_step(int s, int a, Rng& rng) = 0;

 protected:
  // Lazily solved exact_mdp(x), shared by the default decision queries.
  const ViResult& solved(AiAction x) const;
  std::vector<double> boltzmann_probs(int s, AiAction x) const;

 private:
  mutable std::array<std::optional<ViResult>, kNumAiActions> vi_cache_;
  mutable std::array<std::optional<std::vector<double>>, kNumAiActions> q_cache_;
};

// Sample an action index from a discrete distribution with one uniform draw.
int sample_discrete(const std::vector<double>& probs, Rng& rng);

// Sample an outcome from an exact transition row with one uniform draw,
// folding the terminal reward into the entering step.
StepResult sample_world_row(const World& w, const std::vector<ChainTransition>& ts,
                            Rng& rng);

// Build a world's decision MDP from its exact face, shifting the reward of
// the flagged burden actions by rb_delta (used for intervened variants).
ExplicitMdp mdp_from_world(const World& w, double gamma, double rb_delta,
                           const std::vector<char>& burdened);

// The canonical chainworld as a World, optionally noisy and/or softmax.
// Decision queries use the closed-form values rather than value iteration.
class ChainWorld : public World {
 public:
  explicit ChainWorld(ChainworldParams params, ActionMode mode = {},
                      std::optional<NoiseSpec> noise = std::nullopt);

  int n_states() const override { return base_.n_states + 2; }
  int n_actions() const override { return 2; }
  int start_state() const override { return 0; }
  StateKind kind(int s) const override;
  double terminal_reward(int s) const override;
  double gamma() const override { return base_.gamma; }
  const ActionMode& mode() const override { return mode_; }
  bool stationary() const override { return !noise_.has_value(); }

  std::vector<ChainTransition> transitions(int s, int a) const override;
  ExplicitMdp exact_mdp(AiAction x) const override;
  std::vector<double> action_probs(int s, AiAction x) const override;
  int optimal_action(int s, AiAction x) const override;

  void begin_step(Rng& rng) override;
  int sample_action(int s, AiAction x, Rng& rng) const override;
  StepResult sample_step(int s, int a, Rng& rng) override;

  const ChainworldParams& params() const { return base_; }
  const ChainworldParams& realized_params() const { return realized_; }

 private:
  ChainworldParams base_;
  ChainworldParams realized_;  // == base_ unless noise is active
  ActionMode mode_;
  std::optional<NoiseSpec> noise_;
};

// Resample-and-clip used by noisy chain worlds; exposed for tests.
// Probabilities clip to [0,1] (p_d and p_l rescaled proportionally if their
// sum exceeds 1), gamma to [0, kGammaMax], rewards to their sign domain.
ChainworldParams resample_param(const ChainworldParams& base, const NoiseSpec& noise,
                                Rng& rng);

}  // namespace bmrl
