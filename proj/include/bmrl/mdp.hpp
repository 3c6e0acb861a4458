#pragma once

#include <vector>

namespace bmrl {

// Sparse tabular MDP with absorbing terminal states.
//
// Terminal states carry a fixed boundary value (their one-time reward, earned at
// the epoch the process sits on them); value iteration never backs them up.
// Rewards are expected immediate rewards R(s,a), already marginalized over the
// successor distribution.
struct ExplicitMdp {
  struct Entry {
    int next;
    double prob;
  };

  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;
  // row(s,a) = successors of (s,a); empty for terminal states.
  std::vector<std::vector<Entry>> rows;    // indexed s * n_actions + a
  std::vector<double> reward;              // indexed s * n_actions + a
  std::vector<char> terminal;              // 1 if absorbing
  std::vector<double> terminal_value;      // boundary value for terminal states

  const std::vector<Entry>& row(int s, int a) const { return rows[s * n_actions + a]; }
  double r(int s, int a) const { return reward[s * n_actions + a]; }
};

struct ViResult {
  std::vector<double> v;
  std::vector<int> policy;  // greedy, ties to the lowest action index
  int sweeps = 0;
};

// Gauss–Seidel-free synchronous value iteration to sup-norm tolerance `tol`.
// Deterministic: fixed state order, no parallelism, ties to the lowest index.
ViResult value_iteration(const ExplicitMdp& mdp, double tol = 1e-12,
                         int max_sweeps = 1000000,
                         const std::vector<double>* warm_start = nullptr);

// Q(s,a) backups from a fixed value function.
std::vector<double> q_from_values(const ExplicitMdp& mdp, const std::vector<double>& v);

}  // namespace bmrl
