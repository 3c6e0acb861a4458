#include "bmrl/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmrl {

const ViResult& World::solved(AiAction x) const {
  auto& slot = vi_cache_[static_cast<int>(x)];
  if (!slot) slot = value_iteration(exact_mdp(x));
  return *slot;
}

std::vector<double> World::boltzmann_probs(int s, AiAction x) const {
  auto& qs = q_cache_[static_cast<int>(x)];
  if (!qs) qs = q_from_values(exact_mdp(x), solved(x).v);
  const int A = n_actions();
  std::vector<double> p(A);
  double qmax = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < A; ++a) qmax = std::max(qmax, (*qs)[s * A + a]);
  double z = 0.0;
  for (int a = 0; a < A; ++a) {
    p[a] = std::exp(((*qs)[s * A + a] - qmax) / mode().tau);
    z += p[a];
  }
  for (double& v : p) v /= z;
  return p;
}

std::vector<double> World::action_probs(int s, AiAction x) const {
  if (mode().softmax) return boltzmann_probs(s, x);
  std::vector<double> p(n_actions(), 0.0);
  p[optimal_action(s, x)] = 1.0;
  return p;
}

int World::optimal_action(int s, AiAction x) const { return solved(x).policy[s]; }

int World::sample_action(int s, AiAction x, Rng& rng) const {
  if (!mode().softmax) return optimal_action(s, x);
  return sample_discrete(action_probs(s, x), rng);
}

int sample_discrete(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < probs.size(); ++a) {
    acc += probs[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(probs.size()) - 1;
}

StepResult sample_world_row(const World& w, const std::vector<ChainTransition>& ts,
                            Rng& rng) {
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
  if (w.kind(pick->next) != StateKind::Progress) r += w.terminal_reward(pick->next);
  return {pick->next, r};
}

ExplicitMdp mdp_from_world(const World& w, double gamma, double rb_delta,
                           const std::vector<char>& burdened) {
  const int S = w.n_states();
  const int A = w.n_actions();
  ExplicitMdp m;
  m.n_states = S;
  m.n_actions = A;
  m.gamma = gamma;
  m.rows.resize(static_cast<std::size_t>(S) * A);
  m.reward.assign(static_cast<std::size_t>(S) * A, 0.0);
  m.terminal.assign(S, 0);
  m.terminal_value.assign(S, 0.0);
  for (int s = 0; s < S; ++s) {
    if (w.kind(s) != StateKind::Progress) {
      m.terminal[s] = 1;
      m.terminal_value[s] = w.terminal_reward(s);
      continue;
    }
    for (int a = 0; a < A; ++a) {
      auto& row = m.rows[s * A + a];
      double r = 0.0;
      for (const auto& t : w.transitions(s, a)) {
        row.push_back({t.next, t.prob});
        r += t.prob * t.reward;
      }
      if (burdened[s * A + a]) r += rb_delta;
      m.reward[s * A + a] = r;
    }
  }
  return m;
}

// --- ChainWorld -----------------------------------------------------------

ChainWorld::ChainWorld(ChainworldParams params, ActionMode mode,
                       std::optional<NoiseSpec> noise)
    : base_(params), realized_(params), mode_(mode), noise_(std::move(noise)) {
  base_.validate();
  if (mode_.softmax && mode_.tau <= 0.0)
    throw std::invalid_argument("softmax mode requires tau > 0");
  if (noise_) {
    static const char* known[] = {"r_g", "r_b", "r_l", "r_d", "p_g",
                                  "p_l", "p_d", "p_d0", "gamma"};
    bool ok = false;
    for (const char* k : known) ok = ok || noise_->param == k;
    if (!ok) throw std::invalid_argument("unknown noise parameter: " + noise_->param);
    if (noise_->epsilon < 0.0) throw std::invalid_argument("noise epsilon must be >= 0");
  }
}

StateKind ChainWorld::kind(int s) const {
  if (s == goal_state(base_)) return StateKind::Goal;
  if (s == disengaged_state(base_)) return StateKind::Disengaged;
  return StateKind::Progress;
}

double ChainWorld::terminal_reward(int s) const {
  if (s == goal_state(base_)) return base_.r_g;
  if (s == disengaged_state(base_)) return base_.r_d;
  return 0.0;
}

std::vector<ChainTransition> ChainWorld::transitions(int s, int a) const {
  if (kind(s) != StateKind::Progress) return {};
  return chain_transitions(base_, s, a);
}

ExplicitMdp ChainWorld::exact_mdp(AiAction x) const {
  return chain_mdp(apply_intervention(base_, x));
}

std::vector<double> ChainWorld::action_probs(int s, AiAction x) const {
  const ChainworldParams th = apply_intervention(base_, x);
  if (mode_.softmax) {
    const double p1 = softmax_act_prob(th, s, mode_.tau);
    return {1.0 - p1, p1};
  }
  std::vector<double> p(2, 0.0);
  p[human_optimal_action(th, s)] = 1.0;
  return p;
}

int ChainWorld::optimal_action(int s, AiAction x) const {
  return human_optimal_action(apply_intervention(base_, x), s);
}

void ChainWorld::begin_step(Rng& rng) {
  if (noise_) realized_ = resample_param(base_, *noise_, rng);
}

int ChainWorld::sample_action(int s, AiAction x, Rng& rng) const {
  const ChainworldParams th = apply_intervention(realized_, x);
  if (!mode_.softmax) return human_optimal_action(th, s);
  const double p1 = softmax_act_prob(th, s, mode_.tau);
  return rng.uniform() < p1 ? 1 : 0;
}

StepResult ChainWorld::sample_step(int s, int a, Rng& rng) {
  return human_step(realized_, s, a, rng);
}

// --- noise ----------------------------------------------------------------

namespace {

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

ChainworldParams resample_param(const ChainworldParams& base, const NoiseSpec& noise,
                                Rng& rng) {
  ChainworldParams p = base;
  const bool is_reward = noise.param[0] == 'r';
  const double scale = is_reward ? 5.0 : 1.0;
  const double half = noise.epsilon * scale;

  double* field = nullptr;
  if (noise.param == "r_g") field = &p.r_g;
  else if (noise.param == "r_b") field = &p.r_b;
  else if (noise.param == "r_l") field = &p.r_l;
  else if (noise.param == "r_d") field = &p.r_d;
  else if (noise.param == "p_g") field = &p.p_g;
  else if (noise.param == "p_l") field = &p.p_l;
  else if (noise.param == "p_d") field = &p.p_d;
  else if (noise.param == "p_d0") field = &p.p_d0;
  else if (noise.param == "gamma") field = &p.gamma;
  else throw std::invalid_argument("unknown noise parameter: " + noise.param);

  *field = rng.uniform(*field - half, *field + half);

  // Clip back into the parameter's domain.
  if (noise.param == "gamma") {
    p.gamma = clip(p.gamma, 0.0, kGammaMax);
  } else if (is_reward) {
    if (noise.param == "r_g" || noise.param == "r_d") *field = std::max(*field, 0.0);
    else *field = std::min(*field, 0.0);
  } else {
    *field = clip(*field, 0.0, 1.0);
    if (p.p_d + p.p_l > 1.0) {  // keep the abstain branch a distribution
      const double s = p.p_d + p.p_l;
      p.p_d /= s;
      p.p_l /= s;
    }
  }
  return p;
}

}  // namespace bmrl
