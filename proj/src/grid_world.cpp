#include "bmrl/grid_world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace bmrl {

namespace {

int manhattan(int x0, int y0, int x1, int y1) {
  return std::abs(x0 - x1) + std::abs(y0 - y1);
}

}  // namespace

void GridSpec::validate() const {
  if (width < 2 || height < 2)
    throw std::invalid_argument("GridSpec: need at least a 2x2 grid");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("GridSpec: p outside [0,1]");
  if (gamma < 0.0 || gamma > kGammaMax)
    throw std::invalid_argument("GridSpec: gamma outside [0, 1-1e-3]");
  if (r_b > 0.0) throw std::invalid_argument("GridSpec: r_b must be <= 0");
  if (r_g < 0.0 || r_d < 0.0)
    throw std::invalid_argument("GridSpec: terminal rewards must be >= 0");
  if (goal_dy < 0 || goal_dy >= height)
    throw std::invalid_argument("GridSpec: goal_dy outside the grid");
  if (diseng_dy < 0 || diseng_dy >= height)
    throw std::invalid_argument("GridSpec: diseng_dy outside the grid");
}

GridWorld::GridWorld(GridSpec spec, ActionMode mode) : spec_(spec), mode_(mode) {
  spec_.validate();
  goal_ = cell(spec_.width - 1, spec_.goal_dy);
  diseng_ = cell(0, spec_.height - 1 - spec_.diseng_dy);
  if (goal_ == diseng_)
    throw std::invalid_argument("GridSpec: goal and disengagement coincide");

  // Episodes start at the progress cell farthest from the goal; ties prefer
  // larger y, then larger x. For the corner layout this is the neighbor of
  // the disengagement corner, the image of the chain's s_0.
  int best = -1, best_d = -1;
  for (int y = spec_.height - 1; y >= 0; --y) {
    for (int x = spec_.width - 1; x >= 0; --x) {
      const int s = cell(x, y);
      if (s == goal_ || s == diseng_) continue;
      const int d = manhattan(x, y, spec_.width - 1, spec_.goal_dy);
      if (d > best_d) {
        best_d = d;
        best = s;
      }
    }
  }
  start_ = best;
}

StateKind GridWorld::kind(int s) const {
  if (s == goal_) return StateKind::Goal;
  if (s == diseng_) return StateKind::Disengaged;
  return StateKind::Progress;
}

double GridWorld::terminal_reward(int s) const {
  if (s == goal_) return spec_.r_g;
  if (s == diseng_) return spec_.r_d;
  return 0.0;
}

int GridWorld::intended(int s, int a) const {
  static constexpr int dx[4] = {+1, -1, 0, 0};
  static constexpr int dy[4] = {0, 0, +1, -1};
  const int x = s % spec_.width + dx[a];
  const int y = s / spec_.width + dy[a];
  if (x < 0 || x >= spec_.width || y < 0 || y >= spec_.height) return s;
  return cell(x, y);
}

bool GridWorld::goal_ward(int s, int a) const {
  const int t = intended(s, a);
  const int gx = spec_.width - 1, gy = spec_.goal_dy;
  return manhattan(t % spec_.width, t / spec_.width, gx, gy) <
         manhattan(s % spec_.width, s / spec_.width, gx, gy);
}

std::vector<ChainTransition> GridWorld::transitions(int s, int a) const {
  if (kind(s) != StateKind::Progress) return {};
  const double r = goal_ward(s, a) ? spec_.r_b : 0.0;
  const int t = intended(s, a);
  if (t == s || spec_.p >= 1.0) return {{t, 1.0, r}};
  std::vector<ChainTransition> out;
  if (spec_.p > 0.0) out.push_back({t, spec_.p, r});
  out.push_back({s, 1.0 - spec_.p, r});
  return out;
}

ExplicitMdp GridWorld::exact_mdp(AiAction x) const {
  const double g =
      x == AiAction::InterveneGamma
          ? std::clamp(spec_.gamma + spec_.delta_gamma, 0.0, kGammaMax)
          : spec_.gamma;
  const double rb = x == AiAction::InterveneBurden ? spec_.r_b + spec_.delta_b
                                                   : spec_.r_b;
  ExplicitMdp m;
  m.n_states = n_states();
  m.n_actions = 4;
  m.gamma = g;
  m.rows.resize(static_cast<std::size_t>(m.n_states) * 4);
  m.reward.assign(static_cast<std::size_t>(m.n_states) * 4, 0.0);
  m.terminal.assign(m.n_states, 0);
  m.terminal_value.assign(m.n_states, 0.0);
  m.terminal[goal_] = 1;
  m.terminal_value[goal_] = spec_.r_g;
  m.terminal[diseng_] = 1;
  m.terminal_value[diseng_] = spec_.r_d;
  for (int s = 0; s < m.n_states; ++s) {
    if (m.terminal[s]) continue;
    for (int a = 0; a < 4; ++a) {
      auto& row = m.rows[s * 4 + a];
      for (const auto& t : transitions(s, a)) row.push_back({t.next, t.prob});
      m.reward[s * 4 + a] = goal_ward(s, a) ? rb : 0.0;
    }
  }
  return m;
}

StepResult GridWorld::sample_step(int s, int a, Rng& rng) {
  const auto ts = transitions(s, a);
  const double u = rng.uniform();
  double acc = 0.0;
  const ChainTransition* pick = &ts.back();
  for (const auto& t : ts) {
    acc += t.prob;
    if (u < acc) {
      pick = &t;
      break;
    }
  }
  double r = pick->reward;
  if (kind(pick->next) != StateKind::Progress) r += terminal_reward(pick->next);
  return {pick->next, r};
}

ChainAbstraction grid_abstraction(const GridWorld& w, bool anchor_on_goal) {
  const GridSpec& sp = w.spec();
  // The modeler assumes the nominal corner layout; the chain length and the
  // anchoring corner come from it, not from any displaced special cell.
  const int n_hat = sp.width + sp.height - 3;

  ChainAbstraction out;
  out.chain.n_states = n_hat;
  out.chain.r_b = sp.r_b;
  out.chain.r_l = 0.0;
  out.chain.r_g = sp.r_g;
  out.chain.r_d = sp.r_d;
  out.chain.p_g = sp.p;
  out.chain.p_l = sp.p;
  out.chain.p_d = 0.0;
  out.chain.p_d0 = sp.p;
  out.chain.gamma = sp.gamma;
  out.chain.delta_gamma = sp.delta_gamma;
  out.chain.delta_b = sp.delta_b;
  out.chain.validate();

  out.mapping.f.assign(w.n_states(), 0);
  out.mapping.g.assign(w.n_states(), std::vector<int>(4, 0));
  for (int s = 0; s < w.n_states(); ++s) {
    if (w.kind(s) == StateKind::Goal) {
      out.mapping.f[s] = n_hat;  // chain goal
      continue;
    }
    if (w.kind(s) == StateKind::Disengaged) {
      out.mapping.f[s] = n_hat + 1;  // chain disengaged
      continue;
    }
    const int x = s % sp.width, y = s / sp.width;
    int idx;
    if (anchor_on_goal) {
      idx = n_hat - manhattan(x, y, sp.width - 1, 0);
    } else {
      idx = manhattan(x, y, 0, sp.height - 1) - 1;
    }
    out.mapping.f[s] = std::min(std::max(idx, 0), n_hat - 1);
    for (int a = 0; a < 4; ++a) out.mapping.g[s][a] = w.goal_ward(s, a) ? 1 : 0;
  }
  return out;
}

}  // namespace bmrl
