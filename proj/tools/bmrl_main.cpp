// bmrl: solve, simulate, fit, and benchmark intervention policies for
// boundedly-rational human decision models.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bmrl/ai_planner.hpp"
#include "bmrl/grid_world.hpp"
#include "bmrl/harness.hpp"
#include "bmrl/json_io.hpp"
#include "bmrl/monotonic_world.hpp"
#include "bmrl/multichain_world.hpp"

namespace {

using bmrl::json;

const char* action_name(bmrl::AiAction x) {
  switch (x) {
    case bmrl::AiAction::InterveneGamma:
      return "gamma";
    case bmrl::AiAction::InterveneBurden:
      return "burden";
    default:
      return "none";
  }
}

const char* kind_name(bmrl::StateKind k) {
  switch (k) {
    case bmrl::StateKind::Goal:
      return "goal";
    case bmrl::StateKind::Disengaged:
      return "disengaged";
    default:
      return "progress";
  }
}

struct CommonOpts {
  std::string config;
  std::string out;
  std::string format;  // "" = subcommand default
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config, "JSON config file")->required();
  cmd->add_option("--out", o.out, "output path (default per subcommand)");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  // uint64 seeds via string to keep the full range portable across parsers
  cmd->add_option_function<std::string>(
      "--seed", [&o](const std::string& s) { o.seed = std::stoull(s); },
      "seed override (decimal)");
}

std::uint64_t effective_seed(const json& cfg, const CommonOpts& o) {
  if (o.seed) return *o.seed;
  return cfg.value("seed", std::uint64_t{0});
}

// Write the payload, its manifest, and echo the payload to stdout.
void emit(const std::string& out_path, const std::string& payload,
          const json& config, std::uint64_t seed, const std::string& subcommand) {
  bmrl::write_text_file(out_path, payload);
  bmrl::write_text_file(out_path + ".manifest.json",
                        bmrl::make_manifest(config, seed, subcommand).dump(2) + "\n");
  std::cout << payload;
}

// The chain reduction each structured world type carries, used wherever a
// fitting estimator or an equivalence check needs the mapping.
std::optional<bmrl::ChainAbstraction> derive_abstraction(const json& cfg,
                                                         const bmrl::World& w) {
  const std::string type = cfg.value("type", "chainworld");
  if (type == "grid") {
    const auto& g = dynamic_cast<const bmrl::GridWorld&>(w);
    return bmrl::grid_abstraction(g, cfg.value("anchor_on_goal", false));
  }
  if (type == "multichain_a")
    return bmrl::multichain_a_abstraction(
        dynamic_cast<const bmrl::MultiChainAWorld&>(w));
  if (type == "multichain_b")
    return bmrl::multichain_b_abstraction(
        dynamic_cast<const bmrl::MultiChainBWorld&>(w));
  if (type == "monotonic")
    return bmrl::equivalent_chainworld(
        dynamic_cast<const bmrl::MonotonicChainWorld&>(w));
  return std::nullopt;  // chainworlds fit themselves directly
}

int cmd_solve(const CommonOpts& o) {
  const json cfg = bmrl::load_json_file(o.config);
  const auto world = bmrl::world_from_json(cfg);
  const auto ai = cfg.value("ai", bmrl::AiConfig{});
  const std::uint64_t seed = effective_seed(cfg, o);

  json result;
  std::vector<bmrl::AiAction> labels;
  if (const auto* chain = dynamic_cast<const bmrl::ChainWorld*>(world.get())) {
    const auto th = bmrl::threshold_summary(chain->params(), ai);
    result["thresholds"] = json{{"t0", th.t0},
                                {"t_gamma", th.t_gamma},
                                {"t_b", th.t_b},
                                {"t_ai", th.t_ai},
                                {"t_min", th.t_min}};
    labels = bmrl::three_window_policy(chain->params(), ai);
  } else {
    labels = bmrl::solve_ai(*world, ai).marginal;
  }

  json policy = json::array();
  std::string csv = "state,kind,action\n";
  for (std::size_t s = 0; s < labels.size(); ++s) {
    const auto kind = world->kind(static_cast<int>(s));
    const char* action = kind == bmrl::StateKind::Progress ? action_name(labels[s])
                                                           : "none";
    policy.push_back(
        json{{"state", s}, {"kind", kind_name(kind)}, {"action", action}});
    csv += std::to_string(s);
    csv += ',';
    csv += kind_name(kind);
    csv += ',';
    csv += action;
    csv += '\n';
  }
  result["policy"] = policy;

  const std::string format = o.format.empty() ? "json" : o.format;
  const std::string out = o.out.empty() ? "solve." + format : o.out;
  emit(out, format == "json" ? result.dump(2) + "\n" : csv, cfg, seed, "solve");
  return 0;
}

int cmd_policy_dump(const CommonOpts& o) {
  const json cfg = bmrl::load_json_file(o.config);
  const auto world = bmrl::world_from_json(cfg);
  const auto ai = cfg.value("ai", bmrl::AiConfig{});
  const std::uint64_t seed = effective_seed(cfg, o);
  const auto sol = bmrl::solve_ai(*world, ai);

  json rows = json::array();
  std::string csv = "state,prev_action,action,value\n";
  for (int id = 0; id < sol.space.size(); ++id) {
    const bool sentinel = id == sol.space.sentinel();
    const int s = sentinel ? world->start_state() : sol.space.state_of(id);
    const int prev = sentinel ? -1 : sol.space.prev_action_of(id);
    const char* action = world->kind(s) == bmrl::StateKind::Progress
                             ? action_name(sol.policy[id])
                             : "none";
    rows.push_back(json{{"state", s},
                        {"prev_action", prev},
                        {"action", action},
                        {"value", sol.v[id]}});
    csv += std::to_string(s) + ',' + std::to_string(prev) + ',' + action + ',' +
           std::to_string(sol.v[id]) + '\n';
  }
  const json result = json{{"policy", rows}};

  const std::string format = o.format.empty() ? "json" : o.format;
  const std::string out = o.out.empty() ? "policy." + format : o.out;
  emit(out, format == "json" ? result.dump(2) + "\n" : csv, cfg, seed,
       "policy-dump");
  return 0;
}

int cmd_simulate(const CommonOpts& o, int n_episodes_flag) {
  const json cfg = bmrl::load_json_file(o.config);
  const auto world = bmrl::world_from_json(cfg);
  const auto ai = cfg.value("ai", bmrl::AiConfig{});
  const auto fit = cfg.value("fit", bmrl::FitConfig{});
  const std::string estimator = cfg.value("estimator", std::string("oracle"));
  const int n_episodes =
      n_episodes_flag > 0 ? n_episodes_flag : cfg.value("n_episodes", 15);
  const std::uint64_t seed = effective_seed(cfg, o);

  const auto abstraction = derive_abstraction(cfg, *world);
  const auto est = bmrl::make_estimator(estimator, *world, abstraction, ai, fit);
  bmrl::Rng rng(seed);

  json episodes = json::array();
  std::string csv = "episode,reward,steps\n";
  for (int e = 0; e < n_episodes; ++e) {
    int steps = 0;
    const double r = bmrl::run_episode(*world, *est, ai, rng, &steps);
    est->end_episode(rng);
    episodes.push_back(json{{"episode", e + 1}, {"reward", r}, {"steps", steps}});
    csv += std::to_string(e + 1) + ',' + std::to_string(r) + ',' +
           std::to_string(steps) + '\n';
  }
  const json result = json{{"estimator", estimator}, {"episodes", episodes}};

  const std::string format = o.format.empty() ? "csv" : o.format;
  const std::string out = o.out.empty() ? "simulate." + format : o.out;
  emit(out, format == "json" ? result.dump(2) + "\n" : csv, cfg, seed, "simulate");
  return 0;
}

int cmd_fit(const CommonOpts& o, int n_episodes_flag) {
  const json cfg = bmrl::load_json_file(o.config);
  const auto world = bmrl::world_from_json(cfg);
  const auto ai = cfg.value("ai", bmrl::AiConfig{});
  const auto fit_cfg = cfg.value("fit", bmrl::FitConfig{});
  const int n_episodes =
      n_episodes_flag > 0 ? n_episodes_flag : cfg.value("n_episodes", 15);
  const std::uint64_t seed = effective_seed(cfg, o);

  const auto abstraction = derive_abstraction(cfg, *world);
  auto est = bmrl::make_estimator("chainworld", *world, abstraction, ai, fit_cfg);
  bmrl::Rng rng(seed);
  bmrl::run_trial(*world, *est, n_episodes, ai, rng);

  const auto& fit = dynamic_cast<bmrl::ChainworldEstimator&>(*est).current_fit();
  const json result = json{{"params", fit.params},
                           {"tau", fit.tau},
                           {"log_likelihood", fit.log_likelihood},
                           {"n_episodes", n_episodes}};

  const std::string out = o.out.empty() ? "fit.json" : o.out;
  emit(out, result.dump(2) + "\n", cfg, seed, "fit");
  return 0;
}

int cmd_equiv(const CommonOpts& o) {
  const json cfg = bmrl::load_json_file(o.config);
  const json a_cfg = cfg.contains("a") ? cfg.at("a") : cfg;
  const auto a = bmrl::world_from_json(a_cfg);
  const auto ai = cfg.value("ai", bmrl::AiConfig{});
  const std::uint64_t seed = effective_seed(cfg, o);

  bmrl::Mapping mapping;
  std::unique_ptr<bmrl::World> b;
  json chain_params;
  if (const auto abstraction = derive_abstraction(a_cfg, *a)) {
    mapping = abstraction->mapping;
    chain_params = abstraction->chain;
    if (!cfg.contains("b")) b = std::make_unique<bmrl::ChainWorld>(abstraction->chain);
  } else {
    mapping = bmrl::identity_mapping(*a);
  }
  if (cfg.contains("b")) {
    b = bmrl::world_from_json(cfg.at("b"));
    chain_params = cfg.at("b").value("params", json::object());
  }
  if (!b)
    throw std::invalid_argument(
        "equiv: chainworld input needs an explicit \"b\" world to compare against");

  const auto report = bmrl::ai_equivalent(*a, *b, mapping, ai);
  json mismatches = json::array();
  for (const auto& m : report.mismatches)
    mismatches.push_back(json{{"state", m.state},
                              {"prev_action", m.prev_action},
                              {"a_action", action_name(m.a_policy)},
                              {"b_action", action_name(m.b_policy)}});
  const json result = json{{"equivalent", report.equivalent},
                           {"states_compared", report.states_compared},
                           {"mismatches", mismatches},
                           {"chain", chain_params}};

  const std::string out = o.out.empty() ? "equiv.json" : o.out;
  emit(out, result.dump(2) + "\n", cfg, seed, "equiv");
  return 0;
}

int cmd_suite(const CommonOpts& o, int n_trials_flag, int n_episodes_flag,
              const std::string& estimators_flag, int jobs_flag) {
  const json cfg_json = bmrl::load_json_file(o.config);
  auto cfg = cfg_json.get<bmrl::SuiteConfig>();
  if (o.seed) cfg.seed = *o.seed;
  if (n_trials_flag > 0) cfg.n_trials = n_trials_flag;
  if (n_episodes_flag > 0) cfg.n_episodes = n_episodes_flag;
  if (jobs_flag >= 0) cfg.jobs = jobs_flag;
  if (!estimators_flag.empty()) {
    cfg.estimators.clear();
    std::string item;
    std::istringstream ss(estimators_flag);
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.estimators.push_back(item);
  }

  // The manifest hashes the effective config, overrides included.
  json effective;
  bmrl::to_json(effective, cfg);

  const auto result = bmrl::run_suite(cfg);
  std::string payload;
  const std::string format = o.format.empty() ? "csv" : o.format;
  if (format == "csv") {
    payload = bmrl::csv_string(result);
  } else {
    json j;
    bmrl::to_json(j, result);
    payload = j.dump(2) + "\n";
  }
  const std::string out = o.out.empty() ? "suite_results." + format : o.out;
  emit(out, payload, effective, cfg.seed, "suite");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intervention planning and experiments for parametric models of "
               "boundedly-rational humans"};
  app.require_subcommand(1);

  CommonOpts solve_o, dump_o, sim_o, fit_o, equiv_o, suite_o;
  int sim_episodes = 0, fit_episodes = 0;
  int suite_trials = 0, suite_episodes = 0, suite_jobs = -1;
  std::string suite_estimators;

  auto* solve = app.add_subcommand(
      "solve", "Solve a world's intervention policy and thresholds");
  add_common(solve, solve_o);

  auto* dump = app.add_subcommand(
      "policy-dump", "Dump the exact per-[state, prev-action] intervention policy");
  add_common(dump, dump_o);

  auto* sim = app.add_subcommand(
      "simulate", "Roll episodes of one estimator against one world");
  add_common(sim, sim_o);
  sim->add_option("--n-episodes", sim_episodes, "episode count override");

  auto* fit = app.add_subcommand(
      "fit", "Collect interaction data and report the fitted parameters");
  add_common(fit, fit_o);
  fit->add_option("--n-episodes", fit_episodes, "episode count override");

  auto* equiv = app.add_subcommand(
      "equiv", "Check intervention-policy equivalence to the chain reduction");
  add_common(equiv, equiv_o);

  auto* suite =
      app.add_subcommand("suite", "Run a multi-condition experiment suite");
  add_common(suite, suite_o);
  suite->add_option("--n-trials", suite_trials, "trial count override");
  suite->add_option("--n-episodes", suite_episodes, "episode count override");
  suite->add_option("--estimators", suite_estimators,
                    "comma-separated estimator list override");
  suite->add_option("--jobs", suite_jobs, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_o);
    if (dump->parsed()) return cmd_policy_dump(dump_o);
    if (sim->parsed()) return cmd_simulate(sim_o, sim_episodes);
    if (fit->parsed()) return cmd_fit(fit_o, fit_episodes);
    if (equiv->parsed()) return cmd_equiv(equiv_o);
    if (suite->parsed())
      return cmd_suite(suite_o, suite_trials, suite_episodes, suite_estimators,
                       suite_jobs);
  } catch (const bmrl::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
