#include "bmrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bmrl/ai_planner.hpp"

namespace bmrl {

double sample_range(const Range& r, Rng& rng) { return rng.uniform(r.lo, r.hi); }

ChainworldParams sample_chain_params(const ChainPopulation& pop, Rng& rng) {
  ChainworldParams p;
  p.n_states = pop.n_states;
  p.r_b = sample_range(pop.r_b, rng);
  p.r_d = sample_range(pop.r_d, rng);
  p.r_l = sample_range(pop.r_l, rng);
  p.r_g = sample_range(pop.r_g, rng);
  p.gamma = sample_range(pop.gamma, rng);
  p.p_d = sample_range(pop.p_d, rng);
  p.p_d0 = rng.uniform(std::max(pop.p_d0.lo, p.p_d), pop.p_d0.hi);
  p.p_l = sample_range(pop.p_l, rng);
  p.p_g = pop.p_g;
  p.delta_gamma = pop.delta_gamma;
  p.delta_b = pop.delta_b;
  p.validate();
  return p;
}

GridSpec sample_grid_spec(const GridPopulation& pop, Rng& rng) {
  GridSpec g;
  g.width = pop.width;
  g.height = pop.height;
  g.goal_dy = pop.goal_dy;
  g.diseng_dy = pop.diseng_dy;
  g.r_b = sample_range(pop.r_b, rng);
  g.gamma = sample_range(pop.gamma, rng);
  g.p = sample_range(pop.p, rng);
  const Range rg = pop.r_g.value_or(Range{5.0 * pop.width / 8.0, 10.0 * pop.width / 8.0});
  const Range rd = pop.r_d.value_or(Range{0.0, pop.height / 5.0});
  g.r_g = sample_range(rg, rng);
  g.r_d = sample_range(rd, rng);
  g.delta_gamma = pop.delta_gamma;
  g.delta_b = pop.delta_b;
  g.validate();
  return g;
}

std::unique_ptr<World> sample_world(const Condition& c, bool filter_helpless,
                                    Rng& rng) {
  const AiConfig ai;  // helplessness is defined against the default AI setup
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::unique_ptr<World> w;
    bool helpless;
    if (c.world == "chainworld") {
      const ChainworldParams p = sample_chain_params(c.chain, rng);
      helpless = filter_helpless && is_helpless(p, ai);
      if (!helpless) w = std::make_unique<ChainWorld>(p, c.mode, c.noise);
    } else if (c.world == "grid") {
      GridWorld g(sample_grid_spec(c.grid, rng), c.mode);
      helpless = filter_helpless && is_helpless(g, ai);
      if (!helpless) w = std::make_unique<GridWorld>(std::move(g));
    } else {
      throw std::invalid_argument("unknown condition world: " + c.world);
    }
    if (!helpless) return w;
  }
  throw std::runtime_error("condition '" + c.name +
                           "': could not sample a non-helpless human");
}

std::optional<ChainAbstraction> condition_abstraction(const Condition& c,
                                                      const World& w) {
  if (c.world != "grid") return std::nullopt;
  const auto& grid = dynamic_cast<const GridWorld&>(w);
  // Anchor the mapping on whichever nominal corner is still the true one, so
  // each displaced-corner condition misstates exactly one distance.
  const bool anchor_on_goal = c.grid.diseng_dy > 0;
  return grid_abstraction(grid, anchor_on_goal);
}

double run_episode(World& w, Estimator& est, const AiConfig& ai, Rng& rng,
                   int* steps_out) {
  double total = 0.0;
  int s = w.start_state();
  int prev = -1;
  int steps = 0;
  for (int step = 0; step < ai.max_steps; ++step) {
    const AiStateRef ref{s, prev};
    const AiAction x = est.act(ref, rng);
    w.begin_step(rng);
    const int a = w.sample_action(s, x, rng);
    const StepResult sr = w.sample_step(s, a, rng);
    double r = x == AiAction::NoOp ? ai.r_step : ai.r_intervene;
    const StateKind k = w.kind(sr.next);
    if (k == StateKind::Goal) r += ai.r_goal;
    if (k == StateKind::Disengaged) r += ai.r_disengage;
    total += r;
    est.observe(LogTuple{ref, x, r, AiStateRef{sr.next, a}});
    s = sr.next;
    prev = a;
    ++steps;
    if (k != StateKind::Progress) break;
  }
  if (steps_out) *steps_out = steps;
  return total;
}

std::vector<double> run_trial(World& w, Estimator& est, int n_episodes,
                              const AiConfig& ai, Rng& rng) {
  std::vector<double> rewards(n_episodes);
  for (int e = 0; e < n_episodes; ++e) {
    rewards[e] = run_episode(w, est, ai, rng);
    est.end_episode(rng);
  }
  return rewards;
}

namespace {

CurvePoint aggregate(const std::vector<std::vector<double>>& by_trial, int episode) {
  CurvePoint pt;
  pt.n = static_cast<int>(by_trial.size());
  double sum = 0.0;
  for (const auto& t : by_trial) sum += t[episode];
  pt.mean = sum / pt.n;
  if (pt.n > 1) {
    double ss = 0.0;
    for (const auto& t : by_trial) {
      const double d = t[episode] - pt.mean;
      ss += d * d;
    }
    pt.se = std::sqrt(ss / (pt.n - 1)) / std::sqrt(static_cast<double>(pt.n));
  }
  return pt;
}

}  // namespace

ConditionResult run_condition(const Condition& c, const SuiteConfig& cfg) {
  const int n_est = static_cast<int>(cfg.estimators.size());
  // rewards[estimator][trial][episode]
  std::vector<std::vector<std::vector<double>>> rewards(
      n_est, std::vector<std::vector<double>>(cfg.n_trials));

  const auto run_one_trial = [&](int trial) {
    Rng sample_rng(mix_seed(cfg.seed, fnv1a(c.name + "#sample"), trial));
    const auto world = sample_world(c, cfg.filter_helpless, sample_rng);
    const auto abstraction = condition_abstraction(c, *world);
    for (int i = 0; i < n_est; ++i) {
      const std::string& name = cfg.estimators[i];
      Rng rng(mix_seed(cfg.seed, fnv1a(c.name + "#" + name), trial));
      const auto est = make_estimator(name, *world, abstraction, cfg.ai, cfg.fit);
      rewards[i][trial] = run_trial(*world, *est, cfg.n_episodes, cfg.ai, rng);
    }
  };

  int jobs = cfg.jobs;
  if (jobs <= 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, cfg.n_trials);
  if (jobs <= 1) {
    for (int t = 0; t < cfg.n_trials; ++t) run_one_trial(t);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (;;) {
          const int t = next.fetch_add(1);
          if (t >= cfg.n_trials) return;
          try {
            run_one_trial(t);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  ConditionResult out;
  out.condition = c.name;
  out.curves.resize(n_est);
  for (int i = 0; i < n_est; ++i) {
    out.curves[i].estimator = cfg.estimators[i];
    out.curves[i].episodes.resize(cfg.n_episodes);
    for (int e = 0; e < cfg.n_episodes; ++e)
      out.curves[i].episodes[e] = aggregate(rewards[i], e);
  }
  return out;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  if (cfg.n_trials < 1) throw std::invalid_argument("n_trials must be positive");
  if (cfg.n_episodes < 1) throw std::invalid_argument("n_episodes must be positive");
  if (cfg.conditions.empty())
    throw std::invalid_argument("suite config has no conditions");
  SuiteResult result;
  result.conditions.reserve(cfg.conditions.size());
  for (const auto& c : cfg.conditions) result.conditions.push_back(run_condition(c, cfg));
  return result;
}

void write_csv(std::ostream& out, const SuiteResult& result) {
  const auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  out << "condition,estimator,episode,mean,se,n\n";
  for (const auto& cond : result.conditions) {
    for (const auto& curve : cond.curves) {
      for (std::size_t e = 0; e < curve.episodes.size(); ++e) {
        const CurvePoint& pt = curve.episodes[e];
        out << cond.condition << ',' << curve.estimator << ',' << e + 1 << ','
            << num(pt.mean) << ',' << num(pt.se) << ',' << pt.n << '\n';
      }
    }
  }
}

std::string csv_string(const SuiteResult& result) {
  std::ostringstream ss;
  write_csv(ss, result);
  return ss.str();
}

}  // namespace bmrl
