// Python bindings for the core operations: chainworld values and thresholds,
// intervention policies, equivalence checks, and the experiment suite.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bmrl/ai_planner.hpp"
#include "bmrl/equivalence.hpp"
#include "bmrl/grid_world.hpp"
#include "bmrl/harness.hpp"

namespace py = pybind11;
using namespace bmrl;

namespace {

const char* action_name(AiAction x) {
  switch (x) {
    case AiAction::InterveneGamma:
      return "gamma";
    case AiAction::InterveneBurden:
      return "burden";
    default:
      return "none";
  }
}

std::vector<std::string> named_policy(const std::vector<AiAction>& labels) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const AiAction x : labels) out.emplace_back(action_name(x));
  return out;
}

}  // namespace

PYBIND11_MODULE(_bmrl, m) {
  m.doc() = "Intervention planning for parametric models of boundedly-rational "
            "humans";

  py::class_<ChainworldParams>(m, "ChainworldParams")
      .def(py::init<>())
      .def_readwrite("n_states", &ChainworldParams::n_states)
      .def_readwrite("r_b", &ChainworldParams::r_b)
      .def_readwrite("r_l", &ChainworldParams::r_l)
      .def_readwrite("r_g", &ChainworldParams::r_g)
      .def_readwrite("r_d", &ChainworldParams::r_d)
      .def_readwrite("p_g", &ChainworldParams::p_g)
      .def_readwrite("p_l", &ChainworldParams::p_l)
      .def_readwrite("p_d", &ChainworldParams::p_d)
      .def_readwrite("p_d0", &ChainworldParams::p_d0)
      .def_readwrite("gamma", &ChainworldParams::gamma)
      .def_readwrite("delta_gamma", &ChainworldParams::delta_gamma)
      .def_readwrite("delta_b", &ChainworldParams::delta_b)
      .def("validate", &ChainworldParams::validate);

  py::class_<AiConfig>(m, "AiConfig")
      .def(py::init<>())
      .def_readwrite("r_goal", &AiConfig::r_goal)
      .def_readwrite("r_disengage", &AiConfig::r_disengage)
      .def_readwrite("r_intervene", &AiConfig::r_intervene)
      .def_readwrite("r_step", &AiConfig::r_step)
      .def_readwrite("gamma_ai", &AiConfig::gamma_ai)
      .def_readwrite("max_steps", &AiConfig::max_steps);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("width", &GridSpec::width)
      .def_readwrite("height", &GridSpec::height)
      .def_readwrite("p", &GridSpec::p)
      .def_readwrite("r_b", &GridSpec::r_b)
      .def_readwrite("r_g", &GridSpec::r_g)
      .def_readwrite("r_d", &GridSpec::r_d)
      .def_readwrite("gamma", &GridSpec::gamma)
      .def_readwrite("delta_gamma", &GridSpec::delta_gamma)
      .def_readwrite("delta_b", &GridSpec::delta_b)
      .def_readwrite("goal_dy", &GridSpec::goal_dy)
      .def_readwrite("diseng_dy", &GridSpec::diseng_dy)
      .def("validate", &GridSpec::validate);

  m.def("value_goal_pursuit", &value_goal_pursuit, py::arg("params"),
        py::arg("state"));
  m.def("value_disengagement", &value_disengagement, py::arg("params"),
        py::arg("state"));
  m.def("value_optimal", &value_optimal, py::arg("params"), py::arg("state"));
  m.def("human_threshold", &human_threshold, py::arg("params"),
        "Largest state where abstaining is still optimal (-1 if none)");

  m.def(
      "threshold_summary",
      [](const ChainworldParams& p, const AiConfig& cfg) {
        const ThresholdSummary t = threshold_summary(p, cfg);
        py::dict d;
        d["t0"] = t.t0;
        d["t_gamma"] = t.t_gamma;
        d["t_b"] = t.t_b;
        d["t_ai"] = t.t_ai;
        d["t_min"] = t.t_min;
        return d;
      },
      py::arg("params"), py::arg("ai") = AiConfig{});

  m.def(
      "three_window_policy",
      [](const ChainworldParams& p, const AiConfig& cfg) {
        return named_policy(three_window_policy(p, cfg));
      },
      py::arg("params"), py::arg("ai") = AiConfig{},
      "Per-state intervention labels: 'none', 'gamma', or 'burden'");

  m.def(
      "solve_grid_policy",
      [](const GridSpec& g, const AiConfig& cfg) {
        const GridWorld w(g);
        return named_policy(solve_ai(w, cfg).marginal);
      },
      py::arg("grid"), py::arg("ai") = AiConfig{},
      "Marginal per-cell intervention labels from the exact solve");

  m.def(
      "grid_equivalent",
      [](const GridSpec& g, bool anchor_on_goal, const AiConfig& cfg) {
        const GridWorld w(g);
        const ChainAbstraction abs = grid_abstraction(w, anchor_on_goal);
        const ChainWorld chain(abs.chain);
        return ai_equivalent(w, chain, abs.mapping, cfg).equivalent;
      },
      py::arg("grid"), py::arg("anchor_on_goal") = false,
      py::arg("ai") = AiConfig{},
      "True when the grid's optimal intervention policy matches its chain "
      "reduction's");

  m.def(
      "is_helpless",
      [](const ChainworldParams& p, const AiConfig& cfg) {
        return is_helpless(p, cfg);
      },
      py::arg("params"), py::arg("ai") = AiConfig{},
      "True when no intervention policy can ever reach the goal");

  m.def(
      "sample_chain_params",
      [](std::uint64_t seed) {
        Rng rng(seed);
        return sample_chain_params(ChainPopulation{}, rng);
      },
      py::arg("seed"), "Draw one human from the default population ranges");

  m.attr("__version__") = BMRL_VERSION;
}
