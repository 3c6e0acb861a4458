#pragma once

#include <vector>

#include "bmrl/mdp.hpp"
#include "bmrl/world.hpp"

namespace bmrl {

// Rewards and horizon of the intervening AI. The AI pays r_step for idle
// epochs and r_intervene for interventions, and receives r_goal / r_disengage
// when the human absorbs.
struct AiConfig {
  double r_goal = 1.0;
  double r_disengage = -50.0;
  double r_intervene = -1.0;
  double r_step = -0.5;
  double gamma_ai = 0.99;
  int max_steps = 100;
};

// AI state = [human state, previous human action], plus one episode-start
// sentinel where no previous action exists yet. Terminal human states are
// carried through (the pairing is inert there).
struct AiStateSpace {
  int world_states = 0;
  int world_actions = 0;

  int size() const { return world_states * world_actions + 1; }
  int id(int s, int prev_a) const { return s * world_actions + prev_a; }
  int sentinel() const { return world_states * world_actions; }
  int state_of(int id) const {
    return id == sentinel() ? -1 : id / world_actions;
  }
  int prev_action_of(int id) const {
    return id == sentinel() ? -1 : id % world_actions;
  }
};

struct AiMdp {
  ExplicitMdp mdp;      // actions indexed by AiAction
  AiStateSpace space;
};

// The AI's decision process over [human state, previous action] pairs: the AI
// picks x, the human chooses a' at the current state under x, and the
// environment moves on a': T([s,a], x, [s',a']) = pi(a'|s,x) T(s,a',s').
// Dynamics therefore depend only on the state component; the sentinel behaves
// like any other pairing of the start state.
AiMdp build_ai_mdp(const World& w, const AiConfig& cfg);

struct AiSolution {
  AiStateSpace space;
  std::vector<double> v;             // per AI state
  std::vector<AiAction> policy;      // per AI state (greedy, ties to NoOp first)
  std::vector<AiAction> marginal;    // per world state: the common greedy action
                                     // across previous-action pairings
};

// Exact optimal intervention policy by value iteration on build_ai_mdp.
// Throws std::logic_error for non-stationary (noisy) worlds.
AiSolution solve_ai(const World& w, const AiConfig& cfg);

// Closed-form AI value curves for a chainworld human, ignoring step costs and
// regression (the paper-level approximation): the value of escorting the human
// from s_n to the goal vs. the value of letting them disengage.
double value_goal_pursuit_ai(const ChainworldParams& p, const AiConfig& cfg, int n);
double value_disengagement_ai(const ChainworldParams& p, const AiConfig& cfg);

// Largest n with value_goal_pursuit_ai(n) <= value_disengagement_ai; -1 if none.
int ai_threshold(const ChainworldParams& p, const AiConfig& cfg);

// The frontier summary that determines the three-window policy.
struct ThresholdSummary {
  int t0;     // human threshold with no intervention
  int t_gamma;  // human threshold under the patience intervention
  int t_b;    // human threshold under the burden intervention
  int t_ai;   // AI abandonment threshold (closed form)
  int t_min;  // min(t0, t_gamma, t_b)
};

ThresholdSummary threshold_summary(const ChainworldParams& p, const AiConfig& cfg);

// Per-progress-state intervention labels for the window policy:
//   n <= min(t_min, t_ai)... abandoned or unhelpable -> NoOp;
//   t_min < n <= t0 (and n > t_ai) -> the cheapest unlocking intervention
//     (InterveneGamma if t_gamma < n, else InterveneBurden);
//   n > t0 -> NoOp (the human acts on their own).
std::vector<AiAction> three_window_policy(const ChainworldParams& p, const AiConfig& cfg);

// Structure check: NoOp prefix, one contiguous intervention block, NoOp tail.
bool is_three_window(const std::vector<AiAction>& labels);

// True when no intervention policy gives the human positive probability of
// reaching the goal from the start state (exact reachability under the
// optimal AI policy's induced human chain).
bool is_helpless(const World& w, const AiConfig& cfg);
bool is_helpless(const ChainworldParams& p, const AiConfig& cfg);

}  // namespace bmrl
