#pragma once

#include "bmrl/equivalence.hpp"
#include "bmrl/world.hpp"

namespace bmrl {

// Chainworld with a state-dependent disengagement hazard p_d(n), non-increasing
// toward the goal. The gap V_pursuit − V_disengage must be non-decreasing in n
// (single-crossing), which the constructor verifies; thresholds and the window
// structure then behave exactly as in the constant-hazard chain.
struct MonotonicChainSpec {
  int n_states = 10;
  std::vector<double> p_d;  // size n_states, non-increasing; p_d[0] doubles as
                            // the start-state hazard (no regression at s_0)
  double p_g = 0.9;
  double p_l = 0.2;
  double r_b = -0.5;
  double r_l = -0.5;
  double r_g = 10.0;
  double r_d = 0.5;
  double gamma = 0.9;
  double delta_gamma = 0.3;
  double delta_b = 0.4;

  void validate() const;  // throws on domain errors or a single-crossing violation
};

class MonotonicChainWorld : public World {
 public:
  explicit MonotonicChainWorld(MonotonicChainSpec spec, ActionMode mode = {});

  int n_states() const override { return spec_.n_states + 2; }
  int n_actions() const override { return 2; }
  int start_state() const override { return 0; }
  StateKind kind(int s) const override;
  double terminal_reward(int s) const override;
  double gamma() const override { return spec_.gamma; }
  const ActionMode& mode() const override { return mode_; }

  std::vector<ChainTransition> transitions(int s, int a) const override;
  ExplicitMdp exact_mdp(AiAction x) const override;
  StepResult sample_step(int s, int a, Rng& rng) override;

  const MonotonicChainSpec& spec() const { return spec_; }

 private:
  MonotonicChainSpec spec_;
  ActionMode mode_;
};

// Exact policy values of the monotonic chain under intervention x
// (pursuit via the closed form, disengagement via the hazard recursion),
// and the act/abstain threshold they induce.
std::vector<double> monotonic_value_disengagement(const MonotonicChainSpec& spec,
                                                  AiAction x);
int monotonic_threshold(const MonotonicChainSpec& spec, AiAction x);

// A constant-parameter chainworld whose (t0, t_gamma, t_b) frontier matches
// the monotonic world's, with the identity state/action mapping. Built by a
// deterministic search over simple deterministic chains; throws
// std::runtime_error if no partner is found (not expected for valid specs).
ChainAbstraction equivalent_chainworld(const MonotonicChainWorld& w);

}  // namespace bmrl
