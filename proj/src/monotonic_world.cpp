#include "bmrl/monotonic_world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmrl {

namespace {

// The monotonic chain with parameters intervened: gamma under the patience
// boost, r_b under the burden relief.
MonotonicChainSpec intervened(const MonotonicChainSpec& spec, AiAction x) {
  MonotonicChainSpec s = spec;
  if (x == AiAction::InterveneGamma)
    s.gamma = std::clamp(s.gamma + s.delta_gamma, 0.0, kGammaMax);
  if (x == AiAction::InterveneBurden) s.r_b = s.r_b + s.delta_b;
  return s;
}

// Closed-form pursuit value; the hazard schedule plays no role on this side.
double pursuit_value(const MonotonicChainSpec& s, int n) {
  ChainworldParams stub;
  stub.n_states = s.n_states;
  stub.r_b = s.r_b;
  stub.r_g = s.r_g;
  stub.p_g = s.p_g;
  stub.gamma = s.gamma;
  return value_goal_pursuit(stub, n);
}

}  // namespace

void MonotonicChainSpec::validate() const {
  if (n_states < 1) throw std::invalid_argument("MonotonicChainSpec: n_states < 1");
  if (static_cast<int>(p_d.size()) != n_states)
    throw std::invalid_argument("MonotonicChainSpec: p_d size must equal n_states");
  for (int n = 0; n < n_states; ++n) {
    if (p_d[n] < 0.0 || p_d[n] > 1.0)
      throw std::invalid_argument("MonotonicChainSpec: p_d outside [0,1]");
    if (n > 0) {
      if (p_d[n] > p_d[n - 1] + 1e-12)
        throw std::invalid_argument("MonotonicChainSpec: p_d must be non-increasing");
      if (p_d[n] + p_l > 1.0 + 1e-12)
        throw std::invalid_argument("MonotonicChainSpec: p_d + p_l exceeds 1");
    }
  }
  if (p_g < 0.0 || p_g > 1.0)
    throw std::invalid_argument("MonotonicChainSpec: p_g outside [0,1]");
  if (p_l < 0.0 || p_l > 1.0)
    throw std::invalid_argument("MonotonicChainSpec: p_l outside [0,1]");
  if (gamma < 0.0 || gamma > kGammaMax)
    throw std::invalid_argument("MonotonicChainSpec: gamma outside [0, 1-1e-3]");
  if (r_b > 0.0 || r_l > 0.0)
    throw std::invalid_argument("MonotonicChainSpec: r_b and r_l must be <= 0");
  if (r_g < 0.0 || r_d < 0.0)
    throw std::invalid_argument("MonotonicChainSpec: r_g and r_d must be >= 0");

  // Single-crossing: the advantage of pursuing must be non-decreasing in n,
  // so "act iff n > threshold" is the exact optimal structure.
  const auto vd = monotonic_value_disengagement(*this, AiAction::NoOp);
  double prev = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < n_states; ++n) {
    const double diff = pursuit_value(*this, n) - vd[n];
    if (diff < prev - 1e-9)
      throw std::invalid_argument(
          "MonotonicChainSpec: pursuit advantage is not single-crossing");
    prev = diff;
  }
}

MonotonicChainWorld::MonotonicChainWorld(MonotonicChainSpec spec, ActionMode mode)
    : spec_(std::move(spec)), mode_(mode) {
  spec_.validate();
}

StateKind MonotonicChainWorld::kind(int s) const {
  if (s == spec_.n_states) return StateKind::Goal;
  if (s == spec_.n_states + 1) return StateKind::Disengaged;
  return StateKind::Progress;
}

double MonotonicChainWorld::terminal_reward(int s) const {
  if (s == spec_.n_states) return spec_.r_g;
  if (s == spec_.n_states + 1) return spec_.r_d;
  return 0.0;
}

std::vector<ChainTransition> MonotonicChainWorld::transitions(int s, int a) const {
  if (kind(s) != StateKind::Progress) return {};
  std::vector<ChainTransition> out;
  if (a == 1) {
    const int next = s + 1 == spec_.n_states ? spec_.n_states : s + 1;
    if (spec_.p_g > 0.0) out.push_back({next, spec_.p_g, spec_.r_b});
    if (spec_.p_g < 1.0) out.push_back({s, 1.0 - spec_.p_g, spec_.r_b});
    return out;
  }
  const double pd = spec_.p_d[s];
  if (pd > 0.0) out.push_back({spec_.n_states + 1, pd, 0.0});
  if (s > 0 && spec_.p_l > 0.0) out.push_back({s - 1, spec_.p_l, spec_.r_l});
  const double stay = s > 0 ? 1.0 - pd - spec_.p_l : 1.0 - pd;
  if (stay > 0.0) out.push_back({s, stay, 0.0});
  return out;
}

ExplicitMdp MonotonicChainWorld::exact_mdp(AiAction x) const {
  const MonotonicChainSpec s = intervened(spec_, x);
  std::vector<char> burdened(static_cast<std::size_t>(n_states()) * 2, 0);
  for (int n = 0; n < spec_.n_states; ++n) burdened[n * 2 + 1] = 1;
  return mdp_from_world(*this, s.gamma, s.r_b - spec_.r_b, burdened);
}

StepResult MonotonicChainWorld::sample_step(int s, int a, Rng& rng) {
  return sample_world_row(*this, transitions(s, a), rng);
}

std::vector<double> monotonic_value_disengagement(const MonotonicChainSpec& spec,
                                                  AiAction x) {
  const MonotonicChainSpec s = intervened(spec, x);
  std::vector<double> v(s.n_states, 0.0);
  // V(0) = g [pd0 r_d + (1-pd0) V(0)]; V(n) solves the one-sided recursion in
  // V(n-1) since abstaining never moves up the chain.
  v[0] = s.gamma * s.p_d[0] * s.r_d / (1.0 - s.gamma * (1.0 - s.p_d[0]));
  for (int n = 1; n < s.n_states; ++n) {
    const double pd = s.p_d[n];
    v[n] = (s.gamma * pd * s.r_d + s.p_l * s.r_l + s.gamma * s.p_l * v[n - 1]) /
           (1.0 - s.gamma * (1.0 - pd - s.p_l));
  }
  return v;
}

int monotonic_threshold(const MonotonicChainSpec& spec, AiAction x) {
  const MonotonicChainSpec s = intervened(spec, x);
  const auto vd = monotonic_value_disengagement(spec, x);
  for (int n = s.n_states - 1; n >= 0; --n) {
    if (pursuit_value(s, n) <= vd[n]) return n;
  }
  return -1;
}

namespace {

// Threshold of the simple deterministic chain used as an equivalence partner:
// p_g = 1, no hazards, r_b = -rb_mag, r_d = r_l = 0. Acting at n is worth it
// iff r_g > rb_mag * h(N - n), h(k) = (1 - gamma^k) / (gamma^k (1 - gamma)).
double h_cost(int k, double gamma) {
  return (1.0 - std::pow(gamma, k)) / (std::pow(gamma, k) * (1.0 - gamma));
}

int simple_threshold(int n_states, double r_g, double rb_mag, double gamma) {
  for (int n = n_states - 1; n >= 0; --n) {
    if (r_g <= rb_mag * h_cost(n_states - n, gamma) ||
        std::fabs(r_g - rb_mag * h_cost(n_states - n, gamma)) < 1e-15)
      return n;
  }
  return -1;
}

}  // namespace

ChainAbstraction equivalent_chainworld(const MonotonicChainWorld& w) {
  const MonotonicChainSpec& spec = w.spec();
  const int N = spec.n_states;
  const int t0 = monotonic_threshold(spec, AiAction::NoOp);
  // Thresholds above t0 never matter: the window only covers n <= t0, so an
  // intervention that fails to unlock anything there can be replaced by a
  // do-nothing one (effect clamped to t0).
  const int tg = std::min(monotonic_threshold(spec, AiAction::InterveneGamma), t0);
  const int tb = std::min(monotonic_threshold(spec, AiAction::InterveneBurden), t0);

  Mapping identity;
  identity.f.resize(w.n_states());
  identity.g.assign(w.n_states(), {0, 1});
  for (int s = 0; s < w.n_states(); ++s) identity.f[s] = s;

  const double rb_mag = 1.0;
  for (const double base : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
    // r_g candidates inside the bracket that pins the unaided threshold at t0.
    const double lo = t0 + 1 > N ? 0.0 : (t0 == N - 1 ? 0.0 : h_cost(N - t0 - 1, base));
    const double hi = t0 == -1 ? 3.0 * h_cost(N, base) + 1.0 : h_cost(N - t0, base);
    for (const double frac : {0.5, 0.9, 0.999}) {
      const double r_g = t0 == -1 ? hi : lo + (hi - lo) * frac;
      if (r_g <= 0.0) continue;
      if (simple_threshold(N, r_g, rb_mag, base) != t0) continue;

      // Burden relief: pick |r_b'| that moves the threshold to tb.
      double rb2;
      if (tb == t0) {
        rb2 = rb_mag;
      } else if (tb == -1) {
        rb2 = 0.5 * r_g / h_cost(N, base);
      } else {
        const double b_lo = r_g / h_cost(N - tb, base);
        const double b_hi = r_g / h_cost(N - tb - 1, base);
        rb2 = std::min(0.5 * (b_lo + b_hi), rb_mag);
      }
      if (rb2 > rb_mag || simple_threshold(N, r_g, rb2, base) != tb) continue;

      // Patience boost: bisect gamma' until the threshold lands on tg.
      double gp = base;
      if (tg != t0) {
        double g_lo = base, g_hi = kGammaMax;
        if (simple_threshold(N, r_g, rb_mag, g_hi) > tg) continue;  // unreachable
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (g_lo + g_hi);
          if (simple_threshold(N, r_g, rb_mag, mid) > tg) g_lo = mid;
          else g_hi = mid;
        }
        gp = g_hi;
        if (simple_threshold(N, r_g, rb_mag, gp) != tg) continue;
      }

      ChainworldParams partner;
      partner.n_states = N;
      partner.r_b = -rb_mag;
      partner.r_l = 0.0;
      partner.r_g = r_g;
      partner.r_d = 0.0;
      partner.p_g = 1.0;
      partner.p_l = 0.0;
      partner.p_d = 0.0;
      partner.p_d0 = 0.0;
      partner.gamma = base;
      partner.delta_gamma = gp - base;
      partner.delta_b = rb_mag - rb2;
      partner.validate();

      // Confirm the full frontier before accepting.
      if (human_threshold(partner) != t0) continue;
      if (human_threshold(apply_intervention(partner, AiAction::InterveneGamma)) != tg)
        continue;
      if (human_threshold(apply_intervention(partner, AiAction::InterveneBurden)) != tb)
        continue;

      ChainAbstraction out;
      out.mapping = std::move(identity);
      out.chain = partner;
      return out;
    }
  }
  throw std::runtime_error(
      "equivalent_chainworld: no constant-parameter partner found");
}

}  // namespace bmrl
