#include <cmath>

#include "bmrl/mdp.hpp"
#include "doctest.h"

namespace {

using bmrl::ExplicitMdp;
using bmrl::q_from_values;
using bmrl::value_iteration;

// Two states: s0 --a--> s1 (terminal, boundary value 5) with reward 1.
ExplicitMdp hop_mdp() {
  ExplicitMdp m;
  m.n_states = 2;
  m.n_actions = 1;
  m.gamma = 0.9;
  m.rows.resize(2);
  m.rows[0] = {{1, 1.0}};
  m.reward = {1.0, 0.0};
  m.terminal = {0, 1};
  m.terminal_value = {0.0, 5.0};
  return m;
}

}  // namespace

TEST_CASE("value iteration solves a one-hop MDP exactly") {
  const auto res = value_iteration(hop_mdp());
  CHECK(res.v[0] == doctest::Approx(1.0 + 0.9 * 5.0).epsilon(1e-12));
  CHECK(res.v[1] == 5.0);  // boundary value held fixed
  CHECK(res.policy[0] == 0);
  CHECK(res.sweeps >= 1);
}

TEST_CASE("value iteration sums a discounted self-loop") {
  ExplicitMdp m;
  m.n_states = 1;
  m.n_actions = 1;
  m.gamma = 0.9;
  m.rows = {{{0, 1.0}}};
  m.reward = {1.0};
  m.terminal = {0};
  m.terminal_value = {0.0};
  const auto res = value_iteration(m, 1e-13);
  CHECK(res.v[0] == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("greedy ties go to the lowest action index") {
  ExplicitMdp m;
  m.n_states = 2;
  m.n_actions = 2;
  m.gamma = 0.5;
  m.rows.resize(4);
  m.rows[0] = {{1, 1.0}};  // (s0, a0)
  m.rows[1] = {{1, 1.0}};  // (s0, a1), same row and reward
  m.reward = {2.0, 2.0, 0.0, 0.0};
  m.terminal = {0, 1};
  m.terminal_value = {0.0, 0.0};
  const auto res = value_iteration(m);
  CHECK(res.policy[0] == 0);
}

TEST_CASE("q_from_values backs up one step from a fixed value function") {
  const auto m = hop_mdp();
  const std::vector<double> v = {7.0, 5.0};
  const auto q = q_from_values(m, v);
  CHECK(q[0] == doctest::Approx(1.0 + 0.9 * 5.0).epsilon(1e-12));
}

TEST_CASE("warm-started value iteration converges immediately") {
  ExplicitMdp m;
  m.n_states = 1;
  m.n_actions = 1;
  m.gamma = 0.9;
  m.rows = {{{0, 1.0}}};
  m.reward = {1.0};
  m.terminal = {0};
  m.terminal_value = {0.0};
  const auto cold = value_iteration(m, 1e-12);
  const auto warm = value_iteration(m, 1e-12, 1000000, &cold.v);
  CHECK(warm.sweeps <= 2);
  CHECK(warm.v[0] == doctest::Approx(cold.v[0]).epsilon(1e-12));
}
