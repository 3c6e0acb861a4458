#include "bmrl/chainworld.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bmrl {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ChainworldParams: " + what);
}

bool in01(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void ChainworldParams::validate() const {
  require(n_states >= 1, "n_states must be >= 1");
  require(in01(p_g), "p_g outside [0,1]");
  require(in01(p_l), "p_l outside [0,1]");
  require(in01(p_d), "p_d outside [0,1]");
  require(in01(p_d0), "p_d0 outside [0,1]");
  require(p_d + p_l <= 1.0 + 1e-12, "p_d + p_l exceeds 1");
  require(gamma >= 0.0 && gamma <= kGammaMax, "gamma outside [0, 1-1e-3]");
  require(r_b <= 0.0, "r_b must be <= 0");
  require(r_l <= 0.0, "r_l must be <= 0");
  require(r_g >= 0.0, "r_g must be >= 0");
  require(r_d >= 0.0, "r_d must be >= 0");
}

ChainworldParams apply_intervention(const ChainworldParams& p, AiAction x) {
  ChainworldParams q = p;
  switch (x) {
    case AiAction::NoOp:
      break;
    case AiAction::InterveneGamma:
      // delta_gamma > 0 adds patience; a negative delta_gamma removes it.
      q.gamma = std::clamp(p.gamma + p.delta_gamma, 0.0, kGammaMax);
      break;
    case AiAction::InterveneBurden:
      // delta_b > 0 relieves the burden; a negative delta_b makes it worse.
      // Relief is uncapped: a strong incentive can make acting outright
      // rewarding for the step it is applied, which is what unlocks humans
      // whose patience no gamma boost can repair.
      q.r_b = p.r_b + p.delta_b;
      break;
  }
  return q;
}

double value_goal_pursuit(const ChainworldParams& p, int n) {
  const int N = p.n_states;
  if (n >= N) return p.r_g;
  // Unrolled recursion V(n) = r_b + g[p_g V(n+1) + (1-p_g) V(n)], V(N) = r_g:
  // V(n) = r_g rho^{N-n} + r_b (1 - rho^{N-n}) / (1 - gamma),
  // rho = g p_g / (1 - g (1 - p_g)).
  const double z = 1.0 - p.gamma * (1.0 - p.p_g);
  const double rho = p.gamma * p.p_g / z;
  const double rho_k = std::pow(rho, N - n);
  return p.r_g * rho_k + p.r_b * (1.0 - rho_k) / (1.0 - p.gamma);
}

double value_disengagement(const ChainworldParams& p, int n) {
  // Unrolled recursion of always abstaining:
  //   V(0) = g [p_d0 r_d + (1 - p_d0) V(0)]
  //   V(n) = g p_d r_d + p_l r_l + g [p_l V(n-1) + (1 - p_d - p_l) V(n)]
  const double v = 1.0 - p.gamma * (1.0 - p.p_d0);
  const double u = 1.0 - p.gamma * (1.0 - p.p_d - p.p_l);
  const double w = p.gamma * p.p_l / u;
  const double w_n = std::pow(w, n);
  const double head = p.r_d * (p.gamma * p.p_d0 / v) * w_n;
  const double tail = (p.gamma * p.p_d * p.r_d + p.p_l * p.r_l) * (1.0 - w_n) /
                      (1.0 - p.gamma * (1.0 - p.p_d));
  return head + tail;
}

double value_optimal(const ChainworldParams& p, int n) {
  if (n >= p.n_states) return p.r_g;
  return std::max(value_goal_pursuit(p, n), value_disengagement(p, n));
}

int human_threshold(const ChainworldParams& p) {
  for (int n = p.n_states - 1; n >= 0; --n) {
    if (value_goal_pursuit(p, n) <= value_disengagement(p, n)) return n;
  }
  return -1;
}

std::array<double, 2> human_q(const ChainworldParams& p, int n) {
  const double v_here = value_optimal(p, n);
  const double v_up = value_optimal(p, n + 1);
  const double q_act =
      p.r_b + p.gamma * (p.p_g * v_up + (1.0 - p.p_g) * v_here);
  double q_abstain;
  if (n == 0) {
    q_abstain = p.gamma * (p.p_d0 * p.r_d + (1.0 - p.p_d0) * v_here);
  } else {
    const double v_down = value_optimal(p, n - 1);
    q_abstain = p.p_l * p.r_l +
                p.gamma * (p.p_d * p.r_d + p.p_l * v_down +
                           (1.0 - p.p_d - p.p_l) * v_here);
  }
  return {q_abstain, q_act};
}

double softmax_act_prob(const ChainworldParams& p, int n, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("softmax temperature must be > 0");
  const auto q = human_q(p, n);
  // P(act) = sigmoid((Q_act - Q_abstain) / tau), computed without overflow.
  const double d = (q[1] - q[0]) / tau;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

int human_optimal_action(const ChainworldParams& p, int n) {
  return value_goal_pursuit(p, n) > value_disengagement(p, n) ? 1 : 0;
}

StepResult human_step(const ChainworldParams& p, int n, int action, Rng& rng) {
  const double u = rng.uniform();
  if (action == 1) {
    if (u < p.p_g) {
      const int next = n + 1;
      if (next == p.n_states) return {goal_state(p), p.r_b + p.r_g};
      return {next, p.r_b};
    }
    return {n, p.r_b};
  }
  if (n == 0) {
    if (u < p.p_d0) return {disengaged_state(p), p.r_d};
    return {0, 0.0};
  }
  if (u < p.p_d) return {disengaged_state(p), p.r_d};
  if (u < p.p_d + p.p_l) return {n - 1, p.r_l};
  return {n, 0.0};
}

std::vector<ChainTransition> chain_transitions(const ChainworldParams& p, int n,
                                               int action) {
  std::vector<ChainTransition> out;
  if (action == 1) {
    const int next = (n + 1 == p.n_states) ? goal_state(p) : n + 1;
    if (p.p_g > 0.0) out.push_back({next, p.p_g, p.r_b});
    if (p.p_g < 1.0) out.push_back({n, 1.0 - p.p_g, p.r_b});
    return out;
  }
  if (n == 0) {
    if (p.p_d0 > 0.0) out.push_back({disengaged_state(p), p.p_d0, 0.0});
    if (p.p_d0 < 1.0) out.push_back({0, 1.0 - p.p_d0, 0.0});
    return out;
  }
  if (p.p_d > 0.0) out.push_back({disengaged_state(p), p.p_d, 0.0});
  if (p.p_l > 0.0) out.push_back({n - 1, p.p_l, p.r_l});
  const double stay = 1.0 - p.p_d - p.p_l;
  if (stay > 0.0) out.push_back({n, stay, 0.0});
  return out;
}

ExplicitMdp chain_mdp(const ChainworldParams& p) {
  ExplicitMdp m;
  m.n_states = p.n_states + 2;
  m.n_actions = 2;
  m.gamma = p.gamma;
  m.rows.resize(static_cast<std::size_t>(m.n_states) * 2);
  m.reward.assign(static_cast<std::size_t>(m.n_states) * 2, 0.0);
  m.terminal.assign(m.n_states, 0);
  m.terminal_value.assign(m.n_states, 0.0);
  m.terminal[goal_state(p)] = 1;
  m.terminal_value[goal_state(p)] = p.r_g;
  m.terminal[disengaged_state(p)] = 1;
  m.terminal_value[disengaged_state(p)] = p.r_d;
  for (int n = 0; n < p.n_states; ++n) {
    for (int a = 0; a < 2; ++a) {
      double r = 0.0;
      auto& row = m.rows[n * 2 + a];
      for (const auto& t : chain_transitions(p, n, a)) {
        row.push_back({t.next, t.prob});
        r += t.prob * t.reward;
      }
      m.reward[n * 2 + a] = r;
    }
  }
  return m;
}

}  // namespace bmrl
