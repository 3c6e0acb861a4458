#include "bmrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmrl {

ViResult value_iteration(const ExplicitMdp& mdp, double tol, int max_sweeps,
                         const std::vector<double>* warm_start) {
  const int S = mdp.n_states;
  const int A = mdp.n_actions;
  ViResult out;
  out.v.assign(S, 0.0);
  for (int s = 0; s < S; ++s) {
    if (mdp.terminal[s]) out.v[s] = mdp.terminal_value[s];
  }
  if (warm_start) {
    for (int s = 0; s < S; ++s) {
      if (!mdp.terminal[s]) out.v[s] = (*warm_start)[s];
    }
  }

  std::vector<double> next(out.v);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double delta = 0.0;
    for (int s = 0; s < S; ++s) {
      if (mdp.terminal[s]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double q = mdp.r(s, a);
        for (const auto& e : mdp.row(s, a)) q += mdp.gamma * e.prob * out.v[e.next];
        if (q > best) best = q;
      }
      next[s] = best;
      delta = std::max(delta, std::fabs(best - out.v[s]));
    }
    out.v.swap(next);
    ++out.sweeps;
    if (delta < tol) break;
  }

  out.policy.assign(S, 0);
  for (int s = 0; s < S; ++s) {
    if (mdp.terminal[s]) continue;
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int a = 0; a < A; ++a) {
      double q = mdp.r(s, a);
      for (const auto& e : mdp.row(s, a)) q += mdp.gamma * e.prob * out.v[e.next];
      if (q > best) {  // strict: ties resolve to the lowest action index
        best = q;
        arg = a;
      }
    }
    out.policy[s] = arg;
  }
  return out;
}

std::vector<double> q_from_values(const ExplicitMdp& mdp, const std::vector<double>& v) {
  const int S = mdp.n_states;
  const int A = mdp.n_actions;
  std::vector<double> q(static_cast<std::size_t>(S) * A, 0.0);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      if (mdp.terminal[s]) {
        q[s * A + a] = mdp.terminal_value[s];
        continue;
      }
      double x = mdp.r(s, a);
      for (const auto& e : mdp.row(s, a)) x += mdp.gamma * e.prob * v[e.next];
      q[s * A + a] = x;
    }
  }
  return q;
}

}  // namespace bmrl
