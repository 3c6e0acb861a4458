#pragma once

#include "bmrl/equivalence.hpp"
#include "bmrl/world.hpp"

namespace bmrl {

// Multi-chain progress world, independent-hazards case: one goal chain of
// length n0 (advance with p_g1 on "act"), and a bank of one-step disengagement
// chains that each complete with probability p_branch[c] on every "abstain";
// completing any of them disengages the human. Abstaining can also slip the
// goal chain back one step with probability p_l. Because the disengagement
// chains are one-step, the composite state collapses to the goal-chain index.
struct MultiChainASpec {
  int n0 = 10;
  double p_g1 = 0.9;
  std::vector<double> p_branch;  // at least one entry
  double p_l = 0.1;
  double r_b = -0.5;
  double r_l = -0.5;
  double r_g = 10.0;
  double r_d = 0.5;
  double gamma = 0.9;
  double delta_gamma = 0.3;
  double delta_b = 0.4;

  void validate() const;
  double p_disengage() const;  // 1 - prod(1 - p_branch[c])
};

class MultiChainAWorld : public World {
 public:
  explicit MultiChainAWorld(MultiChainASpec spec, ActionMode mode = {});

  int n_states() const override { return spec_.n0 + 2; }
  int n_actions() const override { return 2; }
  int start_state() const override { return 0; }
  StateKind kind(int s) const override;
  double terminal_reward(int s) const override;
  double gamma() const override { return spec_.gamma; }
  const ActionMode& mode() const override { return mode_; }

  std::vector<ChainTransition> transitions(int s, int a) const override;
  ExplicitMdp exact_mdp(AiAction x) const override;
  StepResult sample_step(int s, int a, Rng& rng) override;

  const MultiChainASpec& spec() const { return spec_; }

 private:
  MultiChainASpec spec_;
  ActionMode mode_;
  double p_dis_ = 0.0;
};

// Multi-chain progress world, coupled-fatigue case: acting advances the goal
// chain and the fatigue chain together at cost r_b, resting recovers one unit
// of fatigue at cost r_b, abstaining is free but fatigues. Reaching fatigue
// n1 disengages (worth 0); completing the goal chain wins even if the final
// act also exhausts the fatigue budget.
struct MultiChainBSpec {
  int n0 = 4;
  int n1 = 3;
  double r_b = -0.5;
  double r_g = 10.0;
  double gamma = 0.9;
  double delta_gamma = 0.3;
  double delta_b = 0.4;

  void validate() const;
};

class MultiChainBWorld : public World {
 public:
  // Actions: 0 abstain, 1 act, 2 rest.
  explicit MultiChainBWorld(MultiChainBSpec spec, ActionMode mode = {});

  int n_states() const override { return spec_.n0 * spec_.n1 + 2; }
  int n_actions() const override { return 3; }
  int start_state() const override { return state_of(0, 0); }
  StateKind kind(int s) const override;
  double terminal_reward(int s) const override;
  double gamma() const override { return spec_.gamma; }
  const ActionMode& mode() const override { return mode_; }

  std::vector<ChainTransition> transitions(int s, int a) const override;
  ExplicitMdp exact_mdp(AiAction x) const override;
  StepResult sample_step(int s, int a, Rng& rng) override;

  const MultiChainBSpec& spec() const { return spec_; }
  int state_of(int g, int h) const { return g * spec_.n1 + h; }
  int goal_id() const { return spec_.n0 * spec_.n1; }
  int diseng_id() const { return spec_.n0 * spec_.n1 + 1; }

 private:
  MultiChainBSpec spec_;
  ActionMode mode_;
};

// Chain abstractions matching the two cases (exact for A; for B the chain
// index is total progress minus the forced-rest debt, length 2*n0).
ChainAbstraction multichain_a_abstraction(const MultiChainAWorld& w);
ChainAbstraction multichain_b_abstraction(const MultiChainBWorld& w);

}  // namespace bmrl
