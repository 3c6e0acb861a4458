#include "bmrl/multichain_world.hpp"

#include <algorithm>
#include <stdexcept>

namespace bmrl {

// --- case A -----------------------------------------------------------------

void MultiChainASpec::validate() const {
  if (n0 < 1) throw std::invalid_argument("MultiChainASpec: n0 must be >= 1");
  if (p_branch.empty())
    throw std::invalid_argument("MultiChainASpec: need at least one disengagement chain");
  for (double p : p_branch)
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("MultiChainASpec: p_branch outside [0,1]");
  if (p_g1 < 0.0 || p_g1 > 1.0)
    throw std::invalid_argument("MultiChainASpec: p_g1 outside [0,1]");
  if (p_l < 0.0 || p_l > 1.0)
    throw std::invalid_argument("MultiChainASpec: p_l outside [0,1]");
  if (p_l > 1.0 - p_disengage() + 1e-12)
    throw std::invalid_argument(
        "MultiChainASpec: p_l exceeds the probability that no chain disengages");
  if (gamma < 0.0 || gamma > kGammaMax)
    throw std::invalid_argument("MultiChainASpec: gamma outside [0, 1-1e-3]");
  if (r_b > 0.0 || r_l > 0.0)
    throw std::invalid_argument("MultiChainASpec: r_b and r_l must be <= 0");
  if (r_g < 0.0 || r_d < 0.0)
    throw std::invalid_argument("MultiChainASpec: r_g and r_d must be >= 0");
}

double MultiChainASpec::p_disengage() const {
  double keep = 1.0;
  for (double p : p_branch) keep *= 1.0 - p;
  return 1.0 - keep;
}

MultiChainAWorld::MultiChainAWorld(MultiChainASpec spec, ActionMode mode)
    : spec_(std::move(spec)), mode_(mode) {
  spec_.validate();
  p_dis_ = spec_.p_disengage();
}

StateKind MultiChainAWorld::kind(int s) const {
  if (s == spec_.n0) return StateKind::Goal;
  if (s == spec_.n0 + 1) return StateKind::Disengaged;
  return StateKind::Progress;
}

double MultiChainAWorld::terminal_reward(int s) const {
  if (s == spec_.n0) return spec_.r_g;
  if (s == spec_.n0 + 1) return spec_.r_d;
  return 0.0;
}

std::vector<ChainTransition> MultiChainAWorld::transitions(int s, int a) const {
  if (kind(s) != StateKind::Progress) return {};
  std::vector<ChainTransition> out;
  if (a == 1) {
    const int next = s + 1 == spec_.n0 ? spec_.n0 : s + 1;
    if (spec_.p_g1 > 0.0) out.push_back({next, spec_.p_g1, spec_.r_b});
    if (spec_.p_g1 < 1.0) out.push_back({s, 1.0 - spec_.p_g1, spec_.r_b});
    return out;
  }
  // Abstain: any disengagement chain may complete; otherwise the goal chain
  // may slip back (never below 0).
  if (p_dis_ > 0.0) out.push_back({spec_.n0 + 1, p_dis_, 0.0});
  if (s > 0 && spec_.p_l > 0.0) out.push_back({s - 1, spec_.p_l, spec_.r_l});
  const double stay = s > 0 ? 1.0 - p_dis_ - spec_.p_l : 1.0 - p_dis_;
  if (stay > 0.0) out.push_back({s, stay, 0.0});
  return out;
}

ExplicitMdp MultiChainAWorld::exact_mdp(AiAction x) const {
  const double g = x == AiAction::InterveneGamma
                       ? std::clamp(spec_.gamma + spec_.delta_gamma, 0.0, kGammaMax)
                       : spec_.gamma;
  const double rb =
      x == AiAction::InterveneBurden ? spec_.r_b + spec_.delta_b : spec_.r_b;
  std::vector<char> burdened(static_cast<std::size_t>(n_states()) * 2, 0);
  for (int s = 0; s < spec_.n0; ++s) burdened[s * 2 + 1] = 1;
  return mdp_from_world(*this, g, rb - spec_.r_b, burdened);
}

StepResult MultiChainAWorld::sample_step(int s, int a, Rng& rng) {
  return sample_world_row(*this, transitions(s, a), rng);
}

ChainAbstraction multichain_a_abstraction(const MultiChainAWorld& w) {
  const MultiChainASpec& sp = w.spec();
  ChainAbstraction out;
  out.chain.n_states = sp.n0;
  out.chain.r_b = sp.r_b;
  out.chain.r_l = sp.r_l;
  out.chain.r_g = sp.r_g;
  out.chain.r_d = sp.r_d;
  out.chain.p_g = sp.p_g1;
  out.chain.p_l = sp.p_l;
  out.chain.p_d = sp.p_disengage();
  out.chain.p_d0 = sp.p_disengage();
  out.chain.gamma = sp.gamma;
  out.chain.delta_gamma = sp.delta_gamma;
  out.chain.delta_b = sp.delta_b;
  out.chain.validate();

  out.mapping.f.assign(w.n_states(), 0);
  out.mapping.g.assign(w.n_states(), std::vector<int>(2, 0));
  for (int s = 0; s < w.n_states(); ++s) {
    out.mapping.f[s] = s;  // identical layout: progress, goal, disengaged
    out.mapping.g[s] = {0, 1};
  }
  return out;
}

// --- case B -----------------------------------------------------------------

void MultiChainBSpec::validate() const {
  if (n0 < 1 || n1 < 1)
    throw std::invalid_argument("MultiChainBSpec: chain lengths must be >= 1");
  if (gamma < 0.0 || gamma > kGammaMax)
    throw std::invalid_argument("MultiChainBSpec: gamma outside [0, 1-1e-3]");
  if (r_b > 0.0) throw std::invalid_argument("MultiChainBSpec: r_b must be <= 0");
  if (r_g < 0.0) throw std::invalid_argument("MultiChainBSpec: r_g must be >= 0");
}

MultiChainBWorld::MultiChainBWorld(MultiChainBSpec spec, ActionMode mode)
    : spec_(spec), mode_(mode) {
  spec_.validate();
}

StateKind MultiChainBWorld::kind(int s) const {
  if (s == goal_id()) return StateKind::Goal;
  if (s == diseng_id()) return StateKind::Disengaged;
  return StateKind::Progress;
}

double MultiChainBWorld::terminal_reward(int s) const {
  if (s == goal_id()) return spec_.r_g;
  return 0.0;  // disengaging is worth nothing here by construction
}

std::vector<ChainTransition> MultiChainBWorld::transitions(int s, int a) const {
  if (kind(s) != StateKind::Progress) return {};
  const int g = s / spec_.n1;
  const int h = s % spec_.n1;
  int next;
  double r;
  switch (a) {
    case 1:  // act: advance both chains; completing the goal chain wins
      if (g + 1 == spec_.n0) next = goal_id();
      else if (h + 1 == spec_.n1) next = diseng_id();
      else next = state_of(g + 1, h + 1);
      r = spec_.r_b;
      break;
    case 2:  // rest: recover one unit of fatigue
      next = state_of(g, std::max(h - 1, 0));
      r = spec_.r_b;
      break;
    default:  // abstain: free, but fatigue accumulates
      next = h + 1 == spec_.n1 ? diseng_id() : state_of(g, h + 1);
      r = 0.0;
      break;
  }
  return {{next, 1.0, r}};
}

ExplicitMdp MultiChainBWorld::exact_mdp(AiAction x) const {
  const double gam = x == AiAction::InterveneGamma
                         ? std::clamp(spec_.gamma + spec_.delta_gamma, 0.0, kGammaMax)
                         : spec_.gamma;
  const double rb =
      x == AiAction::InterveneBurden ? spec_.r_b + spec_.delta_b : spec_.r_b;
  std::vector<char> burdened(static_cast<std::size_t>(n_states()) * 3, 0);
  for (int s = 0; s < spec_.n0 * spec_.n1; ++s) {
    burdened[s * 3 + 1] = 1;
    burdened[s * 3 + 2] = 1;
  }
  return mdp_from_world(*this, gam, rb - spec_.r_b, burdened);
}

StepResult MultiChainBWorld::sample_step(int s, int a, Rng& rng) {
  return sample_world_row(*this, transitions(s, a), rng);
}

ChainAbstraction multichain_b_abstraction(const MultiChainBWorld& w) {
  const MultiChainBSpec& sp = w.spec();
  const int n_hat = 2 * sp.n0;

  ChainAbstraction out;
  out.chain.n_states = n_hat;
  out.chain.r_b = sp.r_b;
  out.chain.r_l = 0.0;
  out.chain.r_g = sp.r_g;
  out.chain.r_d = 0.0;
  out.chain.p_g = 1.0;
  out.chain.p_l = 1.0;
  out.chain.p_d = 0.0;
  out.chain.p_d0 = 1.0;
  out.chain.gamma = sp.gamma;
  out.chain.delta_gamma = sp.delta_gamma;
  out.chain.delta_b = sp.delta_b;
  out.chain.validate();

  out.mapping.f.assign(w.n_states(), 0);
  out.mapping.g.assign(w.n_states(), std::vector<int>(3, 0));
  for (int s = 0; s < w.n_states(); ++s) {
    if (w.kind(s) == StateKind::Goal) {
      out.mapping.f[s] = n_hat;
      continue;
    }
    if (w.kind(s) == StateKind::Disengaged) {
      out.mapping.f[s] = n_hat + 1;
      continue;
    }
    const int g = s / sp.n1;
    const int h = s % sp.n1;
    // Chain index = n_hat minus the fewest steps to the goal (acts plus the
    // rests forced by the fatigue budget; the final act is exempt).
    const int acts = sp.n0 - g;
    const int min_steps = acts + std::max(0, acts + h - sp.n1);
    out.mapping.f[s] = n_hat - min_steps;
    out.mapping.g[s] = {0, 1, 0};  // act maps to act; abstain and rest to abstain
  }
  return out;
}

}  // namespace bmrl
