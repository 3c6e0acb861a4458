#include "bmrl/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bmrl {

void to_json(json& j, const ChainworldParams& p) {
  j = json{{"n_states", p.n_states},
           {"r_b", p.r_b},
           {"r_l", p.r_l},
           {"r_g", p.r_g},
           {"r_d", p.r_d},
           {"p_g", p.p_g},
           {"p_l", p.p_l},
           {"p_d", p.p_d},
           {"p_d0", p.p_d0},
           {"gamma", p.gamma},
           {"delta_gamma", p.delta_gamma},
           {"delta_b", p.delta_b}};
}

void from_json(const json& j, ChainworldParams& p) {
  p = ChainworldParams{};
  p.n_states = j.value("n_states", p.n_states);
  p.r_b = j.value("r_b", p.r_b);
  p.r_l = j.value("r_l", p.r_l);
  p.r_g = j.value("r_g", p.r_g);
  p.r_d = j.value("r_d", p.r_d);
  p.p_g = j.value("p_g", p.p_g);
  p.p_l = j.value("p_l", p.p_l);
  p.p_d = j.value("p_d", p.p_d);
  p.p_d0 = j.value("p_d0", p.p_d0);
  p.gamma = j.value("gamma", p.gamma);
  p.delta_gamma = j.value("delta_gamma", p.delta_gamma);
  p.delta_b = j.value("delta_b", p.delta_b);
}

void to_json(json& j, const GridSpec& g) {
  j = json{{"width", g.width},
           {"height", g.height},
           {"p", g.p},
           {"r_b", g.r_b},
           {"r_g", g.r_g},
           {"r_d", g.r_d},
           {"gamma", g.gamma},
           {"delta_gamma", g.delta_gamma},
           {"delta_b", g.delta_b},
           {"goal_dy", g.goal_dy},
           {"diseng_dy", g.diseng_dy}};
}

void from_json(const json& j, GridSpec& g) {
  g = GridSpec{};
  g.width = j.value("width", g.width);
  g.height = j.value("height", g.height);
  g.p = j.value("p", g.p);
  g.r_b = j.value("r_b", g.r_b);
  g.r_g = j.value("r_g", g.r_g);
  g.r_d = j.value("r_d", g.r_d);
  g.gamma = j.value("gamma", g.gamma);
  g.delta_gamma = j.value("delta_gamma", g.delta_gamma);
  g.delta_b = j.value("delta_b", g.delta_b);
  g.goal_dy = j.value("goal_dy", g.goal_dy);
  g.diseng_dy = j.value("diseng_dy", g.diseng_dy);
}

void to_json(json& j, const MultiChainASpec& s) {
  j = json{{"n0", s.n0},         {"p_g1", s.p_g1},
           {"p_branch", s.p_branch}, {"p_l", s.p_l},
           {"r_b", s.r_b},       {"r_l", s.r_l},
           {"r_g", s.r_g},       {"r_d", s.r_d},
           {"gamma", s.gamma},   {"delta_gamma", s.delta_gamma},
           {"delta_b", s.delta_b}};
}

void from_json(const json& j, MultiChainASpec& s) {
  s = MultiChainASpec{};
  s.n0 = j.value("n0", s.n0);
  s.p_g1 = j.value("p_g1", s.p_g1);
  s.p_branch = j.value("p_branch", s.p_branch);
  s.p_l = j.value("p_l", s.p_l);
  s.r_b = j.value("r_b", s.r_b);
  s.r_l = j.value("r_l", s.r_l);
  s.r_g = j.value("r_g", s.r_g);
  s.r_d = j.value("r_d", s.r_d);
  s.gamma = j.value("gamma", s.gamma);
  s.delta_gamma = j.value("delta_gamma", s.delta_gamma);
  s.delta_b = j.value("delta_b", s.delta_b);
}

void to_json(json& j, const MultiChainBSpec& s) {
  j = json{{"n0", s.n0},       {"n1", s.n1},
           {"r_b", s.r_b},     {"r_g", s.r_g},
           {"gamma", s.gamma}, {"delta_gamma", s.delta_gamma},
           {"delta_b", s.delta_b}};
}

void from_json(const json& j, MultiChainBSpec& s) {
  s = MultiChainBSpec{};
  s.n0 = j.value("n0", s.n0);
  s.n1 = j.value("n1", s.n1);
  s.r_b = j.value("r_b", s.r_b);
  s.r_g = j.value("r_g", s.r_g);
  s.gamma = j.value("gamma", s.gamma);
  s.delta_gamma = j.value("delta_gamma", s.delta_gamma);
  s.delta_b = j.value("delta_b", s.delta_b);
}

void to_json(json& j, const MonotonicChainSpec& s) {
  j = json{{"n_states", s.n_states}, {"p_d", s.p_d},
           {"p_g", s.p_g},           {"p_l", s.p_l},
           {"r_b", s.r_b},           {"r_l", s.r_l},
           {"r_g", s.r_g},           {"r_d", s.r_d},
           {"gamma", s.gamma},       {"delta_gamma", s.delta_gamma},
           {"delta_b", s.delta_b}};
}

void from_json(const json& j, MonotonicChainSpec& s) {
  s = MonotonicChainSpec{};
  s.n_states = j.value("n_states", s.n_states);
  s.p_d = j.value("p_d", s.p_d);
  s.p_g = j.value("p_g", s.p_g);
  s.p_l = j.value("p_l", s.p_l);
  s.r_b = j.value("r_b", s.r_b);
  s.r_l = j.value("r_l", s.r_l);
  s.r_g = j.value("r_g", s.r_g);
  s.r_d = j.value("r_d", s.r_d);
  s.gamma = j.value("gamma", s.gamma);
  s.delta_gamma = j.value("delta_gamma", s.delta_gamma);
  s.delta_b = j.value("delta_b", s.delta_b);
}

void to_json(json& j, const ActionMode& m) {
  j = json{{"softmax", m.softmax}, {"tau", m.tau}};
}

void from_json(const json& j, ActionMode& m) {
  m = ActionMode{};
  m.softmax = j.value("softmax", m.softmax);
  m.tau = j.value("tau", m.tau);
}

void to_json(json& j, const NoiseSpec& n) {
  j = json{{"param", n.param}, {"epsilon", n.epsilon}};
}

void from_json(const json& j, NoiseSpec& n) {
  n = NoiseSpec{};
  n.param = j.value("param", n.param);
  n.epsilon = j.value("epsilon", n.epsilon);
}

void to_json(json& j, const AiConfig& c) {
  j = json{{"r_goal", c.r_goal},       {"r_disengage", c.r_disengage},
           {"r_intervene", c.r_intervene}, {"r_step", c.r_step},
           {"gamma_ai", c.gamma_ai},   {"max_steps", c.max_steps}};
}

void from_json(const json& j, AiConfig& c) {
  c = AiConfig{};
  c.r_goal = j.value("r_goal", c.r_goal);
  c.r_disengage = j.value("r_disengage", c.r_disengage);
  c.r_intervene = j.value("r_intervene", c.r_intervene);
  c.r_step = j.value("r_step", c.r_step);
  c.gamma_ai = j.value("gamma_ai", c.gamma_ai);
  c.max_steps = j.value("max_steps", c.max_steps);
}

void to_json(json& j, const FitConfig& c) {
  j = json{{"n_candidates", c.n_candidates}, {"n_states", c.n_states}};
}

void from_json(const json& j, FitConfig& c) {
  c = FitConfig{};
  c.n_candidates = j.value("n_candidates", c.n_candidates);
  c.n_states = j.value("n_states", c.n_states);
}

void to_json(json& j, const Range& r) { j = json::array({r.lo, r.hi}); }

void from_json(const json& j, Range& r) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("range must be a [lo, hi] pair");
  r.lo = j[0].get<double>();
  r.hi = j[1].get<double>();
}

void to_json(json& j, const ChainPopulation& p) {
  j = json{{"n_states", p.n_states},
           {"r_b", p.r_b},
           {"r_d", p.r_d},
           {"r_l", p.r_l},
           {"r_g", p.r_g},
           {"gamma", p.gamma},
           {"p_d", p.p_d},
           {"p_d0", p.p_d0},
           {"p_l", p.p_l},
           {"p_g", p.p_g},
           {"delta_gamma", p.delta_gamma},
           {"delta_b", p.delta_b}};
}

void from_json(const json& j, ChainPopulation& p) {
  p = ChainPopulation{};
  p.n_states = j.value("n_states", p.n_states);
  p.r_b = j.value("r_b", p.r_b);
  p.r_d = j.value("r_d", p.r_d);
  p.r_l = j.value("r_l", p.r_l);
  p.r_g = j.value("r_g", p.r_g);
  p.gamma = j.value("gamma", p.gamma);
  p.p_d = j.value("p_d", p.p_d);
  p.p_d0 = j.value("p_d0", p.p_d0);
  p.p_l = j.value("p_l", p.p_l);
  p.p_g = j.value("p_g", p.p_g);
  p.delta_gamma = j.value("delta_gamma", p.delta_gamma);
  p.delta_b = j.value("delta_b", p.delta_b);
}

void to_json(json& j, const GridPopulation& p) {
  j = json{{"width", p.width},
           {"height", p.height},
           {"goal_dy", p.goal_dy},
           {"diseng_dy", p.diseng_dy},
           {"r_b", p.r_b},
           {"gamma", p.gamma},
           {"p", p.p},
           {"delta_gamma", p.delta_gamma},
           {"delta_b", p.delta_b}};
  if (p.r_g) j["r_g"] = *p.r_g;
  if (p.r_d) j["r_d"] = *p.r_d;
}

void from_json(const json& j, GridPopulation& p) {
  p = GridPopulation{};
  p.width = j.value("width", p.width);
  p.height = j.value("height", p.height);
  p.goal_dy = j.value("goal_dy", p.goal_dy);
  p.diseng_dy = j.value("diseng_dy", p.diseng_dy);
  p.r_b = j.value("r_b", p.r_b);
  p.gamma = j.value("gamma", p.gamma);
  p.p = j.value("p", p.p);
  p.delta_gamma = j.value("delta_gamma", p.delta_gamma);
  p.delta_b = j.value("delta_b", p.delta_b);
  if (j.contains("r_g")) p.r_g = j.at("r_g").get<Range>();
  if (j.contains("r_d")) p.r_d = j.at("r_d").get<Range>();
}

void to_json(json& j, const Condition& c) {
  j = json{{"name", c.name}, {"world", c.world}};
  if (c.mode.softmax) j["mode"] = c.mode;
  if (c.noise) j["noise"] = *c.noise;
  if (c.world == "grid")
    j["grid"] = c.grid;
  else
    j["chain"] = c.chain;
}

void from_json(const json& j, Condition& c) {
  c = Condition{};
  c.name = j.value("name", c.name);
  c.world = j.value("world", c.world);
  c.mode = j.value("mode", c.mode);
  if (j.contains("noise")) c.noise = j.at("noise").get<NoiseSpec>();
  c.chain = j.value("chain", c.chain);
  c.grid = j.value("grid", c.grid);
}

void to_json(json& j, const SuiteConfig& c) {
  j = json{{"seed", c.seed},
           {"n_trials", c.n_trials},
           {"n_episodes", c.n_episodes},
           {"filter_helpless", c.filter_helpless},
           {"jobs", c.jobs},
           {"estimators", c.estimators},
           {"ai", c.ai},
           {"fit", c.fit},
           {"conditions", c.conditions}};
}

void from_json(const json& j, SuiteConfig& c) {
  c = SuiteConfig{};
  c.seed = j.value("seed", c.seed);
  c.n_trials = j.value("n_trials", c.n_trials);
  c.n_episodes = j.value("n_episodes", c.n_episodes);
  c.filter_helpless = j.value("filter_helpless", c.filter_helpless);
  c.jobs = j.value("jobs", c.jobs);
  c.estimators = j.value("estimators", c.estimators);
  c.ai = j.value("ai", c.ai);
  c.fit = j.value("fit", c.fit);
  c.conditions = j.value("conditions", c.conditions);
}

void to_json(json& j, const SuiteResult& r) {
  j = json::array();
  for (const auto& cond : r.conditions) {
    json curves = json::array();
    for (const auto& curve : cond.curves) {
      json episodes = json::array();
      for (const auto& pt : curve.episodes)
        episodes.push_back(json{{"mean", pt.mean}, {"se", pt.se}, {"n", pt.n}});
      curves.push_back(json{{"estimator", curve.estimator}, {"episodes", episodes}});
    }
    j.push_back(json{{"condition", cond.condition}, {"curves", curves}});
  }
}

std::unique_ptr<World> world_from_json(const json& j) {
  const std::string type = j.value("type", "chainworld");
  const ActionMode mode = j.value("mode", ActionMode{});
  std::optional<NoiseSpec> noise;
  if (j.contains("noise")) noise = j.at("noise").get<NoiseSpec>();
  const json params = j.value("params", json::object());
  if (type == "chainworld")
    return std::make_unique<ChainWorld>(params.get<ChainworldParams>(), mode, noise);
  if (noise)
    throw std::invalid_argument("per-step parameter noise requires a chainworld");
  if (type == "grid") return std::make_unique<GridWorld>(params.get<GridSpec>(), mode);
  if (type == "multichain_a")
    return std::make_unique<MultiChainAWorld>(params.get<MultiChainASpec>(), mode);
  if (type == "multichain_b")
    return std::make_unique<MultiChainBWorld>(params.get<MultiChainBSpec>(), mode);
  if (type == "monotonic")
    return std::make_unique<MonotonicChainWorld>(params.get<MonotonicChainSpec>(),
                                                 mode);
  throw std::invalid_argument("unknown world type: " + type);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

json make_manifest(const json& config, std::uint64_t seed,
                   const std::string& subcommand) {
  const std::string dump = config.dump();
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(dump)));
  return json{{"config_hash", hash},
              {"seed", seed},
              {"version", BMRL_VERSION},
              {"subcommand", subcommand}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace bmrl
