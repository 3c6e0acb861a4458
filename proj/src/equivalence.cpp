#include "bmrl/equivalence.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace bmrl {

namespace {

// Q-value gaps between genuinely different interventions are on the order of
// the AI reward scale; gaps below this are floating-point echoes of exact ties
// (e.g. two interventions that unlock the same human behavior).
constexpr double kTieTol = 1e-9;

struct Solved {
  AiMdp built;
  ViResult vi;
  std::vector<double> q;
};

Solved solve(const World& w, const AiConfig& cfg) {
  Solved s;
  s.built = build_ai_mdp(w, cfg);
  s.vi = value_iteration(s.built.mdp);
  s.q = q_from_values(s.built.mdp, s.vi.v);
  return s;
}

bool near_optimal(const Solved& s, int id, int action) {
  double best = s.q[id * kNumAiActions];
  for (int x = 1; x < kNumAiActions; ++x)
    best = std::max(best, s.q[id * kNumAiActions + x]);
  return s.q[id * kNumAiActions + action] >= best - kTieTol;
}

}  // namespace

Mapping identity_mapping(const World& w) {
  Mapping m;
  m.f.resize(w.n_states());
  m.g.assign(w.n_states(), std::vector<int>(w.n_actions(), 0));
  for (int s = 0; s < w.n_states(); ++s) {
    m.f[s] = s;
    for (int a = 0; a < w.n_actions(); ++a) m.g[s][a] = a;
  }
  return m;
}

EquivReport ai_equivalent(const World& a, const World& b, const Mapping& map,
                          const AiConfig& cfg) {
  if (static_cast<int>(map.f.size()) != a.n_states())
    throw std::invalid_argument("ai_equivalent: mapping does not cover A's states");

  const Solved sa = solve(a, cfg);
  const Solved sb = solve(b, cfg);

  EquivReport report;
  report.equivalent = true;

  // Policies correspond when each side's greedy action is optimal (up to
  // exact ties) in the other: single greedy actions may differ at knife-edge
  // ties without breaking equivalence of the optimal policy sets.
  auto compare = [&](int id_a, int id_b, int s, int prev) {
    const int pa = static_cast<int>(sa.vi.policy[id_a]);
    const int pb = static_cast<int>(sb.vi.policy[id_b]);
    ++report.states_compared;
    if (!(near_optimal(sb, id_b, pa) && near_optimal(sa, id_a, pb))) {
      report.equivalent = false;
      report.mismatches.push_back(
          {s, prev, static_cast<AiAction>(pa), static_cast<AiAction>(pb)});
    }
  };

  // Breadth-first over A's reachable AI states: every intervention, optimal
  // human response, every positive-probability outcome.
  std::vector<char> seen(sa.built.space.size(), 0);
  std::queue<int> frontier;

  const int start_sentinel = sa.built.space.sentinel();
  seen[start_sentinel] = 1;
  frontier.push(start_sentinel);
  compare(start_sentinel, sb.built.space.sentinel(), -1, -1);

  while (!frontier.empty()) {
    const int id = frontier.front();
    frontier.pop();
    const int s =
        id == start_sentinel ? a.start_state() : sa.built.space.state_of(id);
    if (a.kind(s) != StateKind::Progress) continue;

    for (int xi = 0; xi < kNumAiActions; ++xi) {
      const int act = a.optimal_action(s, static_cast<AiAction>(xi));
      for (const auto& t : a.transitions(s, act)) {
        if (t.prob <= 0.0) continue;
        const int next_id = sa.built.space.id(t.next, act);
        if (seen[next_id]) continue;
        seen[next_id] = 1;
        frontier.push(next_id);
        if (a.kind(t.next) == StateKind::Progress) {
          // The pending action was chosen at s, so g translates it there.
          const int id_b = sb.built.space.id(map.f[t.next], map.g[s][act]);
          compare(next_id, id_b, t.next, act);
        }
      }
    }
  }
  return report;
}

}  // namespace bmrl
