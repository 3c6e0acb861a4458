#include <stdexcept>

#include "bmrl/equivalence.hpp"
#include "bmrl/grid_world.hpp"
#include "bmrl/monotonic_world.hpp"
#include "bmrl/multichain_world.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bmrl::AiAction;
using bmrl::AiConfig;
using bmrl::ChainworldParams;
using bmrl::ChainWorld;
using bmrl::GridSpec;
using bmrl::GridWorld;
using bmrl::Rng;

TEST_CASE("the identity mapping covers every state and action") {
  const ChainWorld w{ChainworldParams{}};
  const auto m = bmrl::identity_mapping(w);
  REQUIRE(int(m.f.size()) == w.n_states());
  for (int s = 0; s < w.n_states(); ++s) {
    CHECK(m.f[s] == s);
    REQUIRE(int(m.g[s].size()) == w.n_actions());
    for (int a = 0; a < w.n_actions(); ++a) CHECK(m.g[s][a] == a);
  }
}

TEST_CASE("a world is intervention-equivalent to itself") {
  const ChainWorld w{ChainworldParams{}};
  const auto report =
      bmrl::ai_equivalent(w, w, bmrl::identity_mapping(w), AiConfig{});
  CHECK(report.equivalent);
  CHECK(report.states_compared >= 2);
  CHECK(report.mismatches.empty());
}

TEST_CASE("humans with different windows are told apart") {
  ChainworldParams a;  // default: helped over a wide window
  ChainworldParams b = a;
  b.gamma = 0.1;
  b.r_b = -2.0;  // helped only at the last state
  const ChainWorld wa{a}, wb{b};
  const auto report =
      bmrl::ai_equivalent(wa, wb, bmrl::identity_mapping(wa), AiConfig{});
  CHECK_FALSE(report.equivalent);
  REQUIRE(!report.mismatches.empty());
  const auto& mm = report.mismatches.front();
  CHECK(mm.a_policy != mm.b_policy);
  CHECK(mm.state >= -1);
}

TEST_CASE("a mapping must cover the bigger world's states") {
  const ChainWorld a{ChainworldParams{}};
  bmrl::Mapping short_map = bmrl::identity_mapping(a);
  short_map.f.pop_back();
  CHECK_THROWS_AS(bmrl::ai_equivalent(a, a, short_map, AiConfig{}),
                  std::invalid_argument);
}

TEST_CASE("the corner grid plans exactly like its chain abstraction") {
  const GridWorld grid{GridSpec{}};
  const auto abs = bmrl::grid_abstraction(grid);
  const ChainWorld chain{abs.chain};
  const auto report = bmrl::ai_equivalent(grid, chain, abs.mapping, AiConfig{});
  CHECK(report.equivalent);
  CHECK(report.states_compared > 2);
}

TEST_CASE("sampled corner grids stay equivalent to their abstractions") {
  Rng rng(73);
  const AiConfig cfg;
  for (int rep = 0; rep < 8; ++rep) {
    GridSpec sp;
    sp.width = 4 + rng.uniform_int(0, 4);
    sp.height = 3 + rng.uniform_int(0, 3);
    sp.p = rng.uniform(0.5, 1.0);
    sp.gamma = rng.uniform(0.3, 0.95);
    sp.r_b = rng.uniform(-1.0, -0.2);
    sp.r_g = rng.uniform(5.0, 12.0);
    sp.r_d = rng.uniform(0.0, 1.0);
    const GridWorld grid{sp};
    const auto abs = bmrl::grid_abstraction(grid);
    const ChainWorld chain{abs.chain};
    const auto report = bmrl::ai_equivalent(grid, chain, abs.mapping, cfg);
    CHECK(report.equivalent);
  }
}

TEST_CASE("a far-displaced goal breaks the nominal abstraction") {
  GridSpec sp;
  sp.goal_dy = 4;  // goal dropped to the disengagement row
  const GridWorld grid{sp};
  // The modeler still assumes the corner layout, anchoring distances on the
  // corner that remains true (disengagement); every distance-to-goal is wrong.
  const auto abs = bmrl::grid_abstraction(grid);
  const ChainWorld chain{abs.chain};
  const auto report = bmrl::ai_equivalent(grid, chain, abs.mapping, AiConfig{});
  CHECK_FALSE(report.equivalent);
  CHECK(!report.mismatches.empty());
}

TEST_CASE("the independent-hazard bank is exactly its merged chain") {
  bmrl::MultiChainASpec sp;
  sp.p_branch = {0.05, 0.1, 0.15};
  sp.p_l = 0.2;
  const bmrl::MultiChainAWorld w{sp};
  const auto abs = bmrl::multichain_a_abstraction(w);
  const ChainWorld chain{abs.chain};
  const auto report = bmrl::ai_equivalent(w, chain, abs.mapping, AiConfig{});
  CHECK(report.equivalent);
}

TEST_CASE("the coupled-fatigue world matches its debt-counting chain") {
  bmrl::MultiChainBSpec sp;  // 4 goal steps, fatigue budget 3
  const bmrl::MultiChainBWorld w{sp};
  const auto abs = bmrl::multichain_b_abstraction(w);
  const ChainWorld chain{abs.chain};
  const auto report = bmrl::ai_equivalent(w, chain, abs.mapping, AiConfig{});
  CHECK(report.equivalent);
}

TEST_CASE("the monotonic chain matches its constant-parameter partner") {
  bmrl::MonotonicChainSpec sp;
  sp.n_states = 8;
  sp.p_d = {0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1};
  sp.gamma = 0.5;
  sp.r_b = -0.6;
  const bmrl::MonotonicChainWorld w{sp};
  const auto abs = bmrl::equivalent_chainworld(w);
  const ChainWorld chain{abs.chain};
  const auto report = bmrl::ai_equivalent(w, chain, abs.mapping, AiConfig{});
  CHECK(report.equivalent);
}

TEST_CASE("harmful interventions preserve grid-chain equivalence") {
  GridSpec sp;
  sp.delta_gamma = -0.3;  // interventions now remove patience
  sp.delta_b = -0.4;      // ... and add burden
  const GridWorld grid{sp};
  const auto abs = bmrl::grid_abstraction(grid);
  CHECK(abs.chain.delta_gamma == sp.delta_gamma);
  CHECK(abs.chain.delta_b == sp.delta_b);
  const ChainWorld chain{abs.chain};
  const auto report = bmrl::ai_equivalent(grid, chain, abs.mapping, AiConfig{});
  CHECK(report.equivalent);
}
