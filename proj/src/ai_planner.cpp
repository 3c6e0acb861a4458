#include "bmrl/ai_planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace bmrl {

AiMdp build_ai_mdp(const World& w, const AiConfig& cfg) {
  AiMdp out;
  out.space.world_states = w.n_states();
  out.space.world_actions = w.n_actions();
  const AiStateSpace& sp = out.space;

  ExplicitMdp& m = out.mdp;
  m.n_states = sp.size();
  m.n_actions = kNumAiActions;
  m.gamma = cfg.gamma_ai;
  m.rows.resize(static_cast<std::size_t>(m.n_states) * kNumAiActions);
  m.reward.assign(static_cast<std::size_t>(m.n_states) * kNumAiActions, 0.0);
  m.terminal.assign(m.n_states, 0);
  m.terminal_value.assign(m.n_states, 0.0);

  auto terminal_value = [&](StateKind k) {
    return k == StateKind::Goal ? cfg.r_goal : cfg.r_disengage;
  };

  // Fill one AI state's rows; identical for every previous-action pairing of
  // the same world state, because the human re-decides at s regardless of how
  // they got there.
  auto fill = [&](int ai_id, int s) {
    const StateKind k = w.kind(s);
    if (k != StateKind::Progress) {
      m.terminal[ai_id] = 1;
      m.terminal_value[ai_id] = terminal_value(k);
      return;
    }
    for (int xi = 0; xi < kNumAiActions; ++xi) {
      const AiAction x = static_cast<AiAction>(xi);
      auto& row = m.rows[ai_id * kNumAiActions + xi];
      const auto probs = w.action_probs(s, x);
      for (int a = 0; a < w.n_actions(); ++a) {
        if (probs[a] <= 0.0) continue;
        for (const auto& t : w.transitions(s, a)) {
          row.push_back({sp.id(t.next, a), probs[a] * t.prob});
        }
      }
      m.reward[ai_id * kNumAiActions + xi] =
          (x == AiAction::NoOp) ? cfg.r_step : cfg.r_intervene;
    }
  };

  for (int s = 0; s < sp.world_states; ++s) {
    for (int a = 0; a < sp.world_actions; ++a) fill(sp.id(s, a), s);
  }
  fill(sp.sentinel(), w.start_state());
  return out;
}

AiSolution solve_ai(const World& w, const AiConfig& cfg) {
  if (!w.stationary())
    throw std::logic_error("solve_ai: world has per-step noise; no exact MDP");
  const AiMdp built = build_ai_mdp(w, cfg);
  const ViResult vi = value_iteration(built.mdp);

  AiSolution sol;
  sol.space = built.space;
  sol.v = vi.v;
  sol.policy.resize(vi.policy.size());
  for (std::size_t i = 0; i < vi.policy.size(); ++i)
    sol.policy[i] = static_cast<AiAction>(vi.policy[i]);

  // The greedy action is shared across previous-action pairings (the dynamics
  // depend only on the state component), so the per-world-state marginal is
  // well-defined. Verify rather than assume.
  sol.marginal.assign(built.space.world_states, AiAction::NoOp);
  for (int s = 0; s < built.space.world_states; ++s) {
    if (w.kind(s) != StateKind::Progress) continue;
    const AiAction first = sol.policy[built.space.id(s, 0)];
    for (int a = 1; a < built.space.world_actions; ++a) {
      if (sol.policy[built.space.id(s, a)] != first)
        throw std::logic_error("solve_ai: greedy action differs across previous actions");
    }
    if (s == w.start_state() && sol.policy[built.space.sentinel()] != first)
      throw std::logic_error("solve_ai: sentinel action differs from its state's");
    sol.marginal[s] = first;
  }
  return sol;
}

double value_goal_pursuit_ai(const ChainworldParams& p, const AiConfig& cfg, int n) {
  if (n >= p.n_states) return cfg.r_goal;
  const double zeta = 1.0 - cfg.gamma_ai * (1.0 - p.p_g);
  const double rho = cfg.gamma_ai * p.p_g / zeta;
  const int k = p.n_states - n;
  if (std::fabs(1.0 - rho) < 1e-12)
    return cfg.r_goal + cfg.r_intervene * k;
  const double rho_k = std::pow(rho, k);
  return cfg.r_goal * rho_k + cfg.r_intervene * (1.0 - rho_k) / (1.0 - rho);
}

double value_disengagement_ai(const ChainworldParams& p, const AiConfig& cfg) {
  return cfg.r_disengage * cfg.gamma_ai * p.p_d /
         (1.0 - cfg.gamma_ai * (1.0 - p.p_d));
}

int ai_threshold(const ChainworldParams& p, const AiConfig& cfg) {
  const double vd = value_disengagement_ai(p, cfg);
  for (int n = p.n_states - 1; n >= 0; --n) {
    if (value_goal_pursuit_ai(p, cfg, n) <= vd) return n;
  }
  return -1;
}

ThresholdSummary threshold_summary(const ChainworldParams& p, const AiConfig& cfg) {
  ThresholdSummary t;
  t.t0 = human_threshold(p);
  t.t_gamma = human_threshold(apply_intervention(p, AiAction::InterveneGamma));
  t.t_b = human_threshold(apply_intervention(p, AiAction::InterveneBurden));
  t.t_ai = ai_threshold(p, cfg);
  t.t_min = std::min({t.t0, t.t_gamma, t.t_b});
  return t;
}

std::vector<AiAction> three_window_policy(const ChainworldParams& p, const AiConfig& cfg) {
  const ThresholdSummary t = threshold_summary(p, cfg);
  std::vector<AiAction> labels(p.n_states, AiAction::NoOp);
  for (int n = 0; n < p.n_states; ++n) {
    if (n <= t.t_min) continue;           // no intervention unlocks acting
    if (n <= t.t_ai) continue;            // not worth rescuing
    if (n > t.t0) continue;               // acts unaided
    // Inside the window some intervention unlocks acting; prefer the patience
    // boost when it works (it is the lower action index, matching the exact
    // solver's tie rule when both work).
    labels[n] = (t.t_gamma < n) ? AiAction::InterveneGamma : AiAction::InterveneBurden;
  }
  return labels;
}

bool is_three_window(const std::vector<AiAction>& labels) {
  int phase = 0;  // 0: leading NoOps, 1: intervention block, 2: trailing NoOps
  for (const AiAction x : labels) {
    const bool intervene = x != AiAction::NoOp;
    if (phase == 0 && intervene) phase = 1;
    else if (phase == 1 && !intervene) phase = 2;
    else if (phase == 2 && intervene) return false;
  }
  return true;
}

namespace {

// Exact reachability of a Goal state under a fixed per-state AI labelling.
bool goal_reachable(const World& w, const std::vector<AiAction>& per_state) {
  std::vector<char> seen(w.n_states(), 0);
  std::queue<int> q;
  q.push(w.start_state());
  seen[w.start_state()] = 1;
  while (!q.empty()) {
    const int s = q.front();
    q.pop();
    if (w.kind(s) == StateKind::Goal) return true;
    if (w.kind(s) != StateKind::Progress) continue;
    const int a = w.optimal_action(s, per_state[s]);
    for (const auto& t : w.transitions(s, a)) {
      if (t.prob > 0.0 && !seen[t.next]) {
        seen[t.next] = 1;
        q.push(t.next);
      }
    }
  }
  return false;
}

}  // namespace

bool is_helpless(const World& w, const AiConfig& cfg) {
  const AiSolution sol = solve_ai(w, cfg);
  return !goal_reachable(w, sol.marginal);
}

bool is_helpless(const ChainworldParams& p, const AiConfig& cfg) {
  // The window policy is the exact optimum for chainworlds; avoids the solve.
  ChainWorld w(p);
  std::vector<AiAction> labels = three_window_policy(p, cfg);
  labels.resize(w.n_states(), AiAction::NoOp);  // terminals: unused filler
  return !goal_reachable(w, labels);
}

}  // namespace bmrl
