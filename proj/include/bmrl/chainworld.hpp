#pragma once

#include <array>
#include <vector>

#include "bmrl/mdp.hpp"
#include "bmrl/rng.hpp"

namespace bmrl {

// Interventions the AI can apply to the human for a single decision.
enum class AiAction { NoOp = 0, InterveneGamma = 1, InterveneBurden = 2 };
inline constexpr int kNumAiActions = 3;

// Discount factors are kept strictly below 1 so infinite-horizon values exist.
inline constexpr double kGammaMax = 1.0 - 1e-3;

// Parametric chainworld: states s_0..s_{N-1} on the way to a goal, plus two
// absorbing states (goal, disengaged). Action 1 ("act") advances with prob p_g
// at cost r_b; action 0 ("abstain") risks disengaging (p_d, boosted to p_d0 at
// s_0) and regressing (p_l, reward r_l). delta_gamma / delta_b are the per-step
// intervention effects: a patience boost and a burden relief (stored with
// positive meaning helpful, i.e. r_b is moved toward 0 by +delta_b).
struct ChainworldParams {
  int n_states = 10;
  double r_b = -0.5;
  double r_l = -0.5;
  double r_g = 10.0;
  double r_d = 0.5;
  double p_g = 1.0;
  double p_l = 0.2;
  double p_d = 0.2;
  double p_d0 = 0.3;
  double gamma = 0.9;
  double delta_gamma = 0.3;
  double delta_b = 0.4;

  // Throws std::invalid_argument on out-of-domain values
  // (probabilities outside [0,1], p_d + p_l > 1, gamma outside [0, kGammaMax],
  // rewards with the wrong sign, n_states < 1).
  void validate() const;
};

// Chain state indices used throughout: 0..N-1 progress, N = goal, N+1 = disengaged.
inline int goal_state(const ChainworldParams& p) { return p.n_states; }
inline int disengaged_state(const ChainworldParams& p) { return p.n_states + 1; }

// Parameters as experienced by the human while an intervention is active.
ChainworldParams apply_intervention(const ChainworldParams& p, AiAction x);

// Closed-form value of always acting, for n in [0, N] (n = N is the goal).
double value_goal_pursuit(const ChainworldParams& p, int n);
// Closed-form value of always abstaining, for n in [0, N-1].
double value_disengagement(const ChainworldParams& p, int n);
// max of the two policy values; defined on [0, N] (r_g at the goal).
double value_optimal(const ChainworldParams& p, int n);

// Largest n in [0, N-1] with V_goal(n) <= V_dis(n); -1 if pursuit wins everywhere.
// The optimal human acts exactly at n > threshold (ties favor abstaining).
int human_threshold(const ChainworldParams& p);

// One-step action values {Q(abstain), Q(act)} backed up from value_optimal.
std::array<double, 2> human_q(const ChainworldParams& p, int n);

// P(act) under a Boltzmann choice rule with temperature tau over human_q.
double softmax_act_prob(const ChainworldParams& p, int n, double tau);

// Deterministic optimal choice at n (threshold rule).
int human_optimal_action(const ChainworldParams& p, int n);

struct StepResult {
  int next;       // chain state index (goal / disengaged included)
  double reward;  // step reward, with the terminal reward folded into the
                  // transition that enters an absorbing state
};

// Sample one environment transition for the human's chosen action.
// Consumes exactly one uniform draw.
StepResult human_step(const ChainworldParams& p, int n, int action, Rng& rng);

// Exact successor distribution of (n, action); rewards exclude terminal bonuses.
struct ChainTransition {
  int next;
  double prob;
  double reward;
};
std::vector<ChainTransition> chain_transitions(const ChainworldParams& p, int n, int action);

// The chain as an explicit 2-action MDP (for oracle cross-checks and planning).
ExplicitMdp chain_mdp(const ChainworldParams& p);

}  // namespace bmrl
