#pragma once

#include "bmrl/equivalence.hpp"
#include "bmrl/world.hpp"

namespace bmrl {

// A rectangular progress world. One corner cell is the goal, the opposite-edge
// corner is the disengagement state, and moves succeed with probability p
// (otherwise the human stays put). Actions that reduce the true distance to
// the goal carry the burden r_b; all other moves are free. Either special cell
// can be displaced along its column to build misspecified variants.
struct GridSpec {
  int width = 8;
  int height = 5;
  double p = 0.9;
  double r_b = -0.5;
  double r_g = 10.0;
  double r_d = 0.5;
  double gamma = 0.9;
  double delta_gamma = 0.3;
  double delta_b = 0.4;
  int goal_dy = 0;       // goal at (width-1, goal_dy); 0 = corner
  int diseng_dy = 0;     // disengagement at (0, height-1-diseng_dy); 0 = corner

  void validate() const;
};

class GridWorld : public World {
 public:
  explicit GridWorld(GridSpec spec, ActionMode mode = {});

  int n_states() const override { return spec_.width * spec_.height; }
  int n_actions() const override { return 4; }  // +x, -x, +y, -y
  int start_state() const override { return start_; }
  StateKind kind(int s) const override;
  double terminal_reward(int s) const override;
  double gamma() const override { return spec_.gamma; }
  const ActionMode& mode() const override { return mode_; }

  std::vector<ChainTransition> transitions(int s, int a) const override;
  ExplicitMdp exact_mdp(AiAction x) const override;
  StepResult sample_step(int s, int a, Rng& rng) override;

  const GridSpec& spec() const { return spec_; }
  int cell(int x, int y) const { return y * spec_.width + x; }
  int goal_cell() const { return goal_; }
  int diseng_cell() const { return diseng_; }
  // True when the intended move of action a from s strictly reduces the
  // distance to the goal (these are the burdensome, goal-ward actions).
  bool goal_ward(int s, int a) const;

 private:
  int intended(int s, int a) const;  // clamped neighbor; s itself at walls

  GridSpec spec_;
  ActionMode mode_;
  int goal_ = 0;
  int diseng_ = 0;
  int start_ = 0;
};

// The chain abstraction a modeler would use for a grid: chain index =
// distance-to-disengagement minus one (or, when anchor_on_goal is set,
// chain length minus distance-to-goal), assuming the nominal corner layout.
// Returns the state/action mapping and the chain parameters.
ChainAbstraction grid_abstraction(const GridWorld& w, bool anchor_on_goal = false);

}  // namespace bmrl
