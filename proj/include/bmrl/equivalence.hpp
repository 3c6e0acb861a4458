#pragma once

#include <string>
#include <vector>

#include "bmrl/ai_planner.hpp"
#include "bmrl/world.hpp"

namespace bmrl {

// State/action correspondence from a world A onto a (usually smaller) world B:
// f maps A-states to B-states, g maps (A-state, A-action) to a B-action.
// Terminal states map kind-to-kind.
struct Mapping {
  std::vector<int> f;
  std::vector<std::vector<int>> g;  // g[s][a]; unused rows may be empty
};

struct PolicyMismatch {
  int state = -1;        // A world state (-1 for the episode-start sentinel)
  int prev_action = -1;  // A previous human action
  AiAction a_policy = AiAction::NoOp;
  AiAction b_policy = AiAction::NoOp;
};

struct EquivReport {
  bool equivalent = false;
  int states_compared = 0;
  std::vector<PolicyMismatch> mismatches;
};

// A chainworld stand-in for a richer world, together with the mapping onto it.
struct ChainAbstraction {
  Mapping mapping;
  ChainworldParams chain;
};

// f(s) = s, g(s, a) = a over all of w's states and actions.
Mapping identity_mapping(const World& w);

// Checks that the exact optimal intervention policies of A and B agree on
// every AI state reachable in A (from the episode-start sentinel, under any
// sequence of interventions, with the human responding optimally), comparing
// A's action at [s, a] with B's at [f(s), g(s, a)]. Both sides are solved
// exactly; nothing about the mapping is assumed beyond kind preservation.
EquivReport ai_equivalent(const World& a, const World& b, const Mapping& map,
                          const AiConfig& cfg);

}  // namespace bmrl
