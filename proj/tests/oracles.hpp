#pragma once

// Reference implementations used to cross-check the library's closed forms
// and solvers. Everything here iterates the raw Bellman equations to a fixed
// point instead of using the library's algebraic solutions or MDP machinery.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bmrl/chainworld.hpp"
#include "bmrl/rng.hpp"

namespace oracle {

inline constexpr double kFixedPointTol = 1e-14;

// Value of always acting: v(n) = r_b + g [p_g v(n+1) + (1-p_g) v(n)],
// boundary v(N) = r_g.
inline std::vector<double> pursuit_values(const bmrl::ChainworldParams& p) {
  std::vector<double> v(p.n_states + 1, 0.0);
  v[p.n_states] = p.r_g;
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double delta = 0.0;
    for (int n = p.n_states - 1; n >= 0; --n) {
      const double nv =
          p.r_b + p.gamma * (p.p_g * v[n + 1] + (1.0 - p.p_g) * v[n]);
      delta = std::max(delta, std::fabs(nv - v[n]));
      v[n] = nv;
    }
    if (delta < kFixedPointTol) break;
  }
  return v;
}

// Value of always abstaining: at n = 0 the only risks are disengaging
// (worth r_d on arrival) or staying; above 0 the chain can also slip back,
// paying r_l on the regression outcome.
inline std::vector<double> disengage_values(const bmrl::ChainworldParams& p) {
  std::vector<double> v(p.n_states, 0.0);
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double delta = 0.0;
    for (int n = 0; n < p.n_states; ++n) {
      double nv;
      if (n == 0) {
        nv = p.gamma * (p.p_d0 * p.r_d + (1.0 - p.p_d0) * v[0]);
      } else {
        nv = p.p_l * p.r_l +
             p.gamma * (p.p_d * p.r_d + p.p_l * v[n - 1] +
                        (1.0 - p.p_d - p.p_l) * v[n]);
      }
      delta = std::max(delta, std::fabs(nv - v[n]));
      v[n] = nv;
    }
    if (delta < kFixedPointTol) break;
  }
  return v;
}

// Optimal values by value iteration over the two-action choice, with the
// terminal boundary values held fixed.
inline std::vector<double> optimal_values(const bmrl::ChainworldParams& p) {
  const int N = p.n_states;
  std::vector<double> v(N, 0.0);
  const auto at = [&](const std::vector<double>& vv, int n) {
    return n >= N ? p.r_g : vv[n];
  };
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double delta = 0.0;
    for (int n = 0; n < N; ++n) {
      const double act =
          p.r_b + p.gamma * (p.p_g * at(v, n + 1) + (1.0 - p.p_g) * v[n]);
      double abstain;
      if (n == 0) {
        abstain = p.gamma * (p.p_d0 * p.r_d + (1.0 - p.p_d0) * v[0]);
      } else {
        abstain = p.p_l * p.r_l +
                  p.gamma * (p.p_d * p.r_d + p.p_l * v[n - 1] +
                             (1.0 - p.p_d - p.p_l) * v[n]);
      }
      const double nv = std::max(act, abstain);
      delta = std::max(delta, std::fabs(nv - v[n]));
      v[n] = nv;
    }
    if (delta < kFixedPointTol) break;
  }
  return v;
}

// Largest state where abstaining is still weakly preferred under the
// always-act / always-abstain comparison.
inline int threshold(const bmrl::ChainworldParams& p) {
  const auto vg = pursuit_values(p);
  const auto vd = disengage_values(p);
  for (int n = p.n_states - 1; n >= 0; --n) {
    if (vg[n] <= vd[n]) return n;
  }
  return -1;
}

// One human from the experiment population ranges, written out here so the
// tests do not lean on the harness sampler they also verify.
inline bmrl::ChainworldParams sample_population_params(bmrl::Rng& rng) {
  bmrl::ChainworldParams p;
  p.n_states = 10;
  p.r_b = rng.uniform(-1.0, -0.2);
  p.r_d = rng.uniform(0.0, 1.0);
  p.r_l = rng.uniform(-1.0, 0.0);
  p.r_g = rng.uniform(5.0, 15.0);
  p.gamma = rng.uniform(0.01, 0.99);
  p.p_d = rng.uniform(0.1, 0.5);
  p.p_d0 = rng.uniform(p.p_d, 0.5);
  p.p_l = rng.uniform(0.0, 0.4);
  p.p_g = 1.0;
  p.delta_gamma = 0.3;
  p.delta_b = 0.4;
  return p;
}

// A broader draw covering the full candidate domain (probabilistic progress,
// free-ranging rewards), for stress tests beyond the experiment population.
inline bmrl::ChainworldParams sample_wide_params(bmrl::Rng& rng) {
  bmrl::ChainworldParams p;
  p.n_states = 2 + rng.uniform_int(0, 10);
  p.r_b = rng.uniform(-2.0, 0.0);
  p.r_d = rng.uniform(0.0, 3.0);
  p.r_l = rng.uniform(-3.0, 0.0);
  p.r_g = rng.uniform(0.0, 30.0);
  p.gamma = rng.uniform(0.0, 0.999);
  p.p_g = rng.uniform(0.0, 1.0);
  double u = rng.uniform();
  double v = rng.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  p.p_d = u;
  p.p_l = v;
  p.p_d0 = rng.uniform(0.0, 1.0);
  p.delta_gamma = rng.uniform(0.0, 0.8);
  p.delta_b = rng.uniform(0.0, 1.5);
  return p;
}

}  // namespace oracle
