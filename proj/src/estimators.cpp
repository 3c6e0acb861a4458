#include "bmrl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmrl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Outcome classes of a chain-coordinate transition; -1 marks transitions the
// chain model cannot produce at all (these force the -inf sentinel and occur
// only under misspecified mappings).
enum Outcome { kAdvance = 0, kStay = 1, kRegress = 2, kDisengage = 3 };

int classify(int n_states, int s, int a, int s2) {
  if (a == 1) {
    if (s2 == s + 1 && s + 1 < n_states) return kAdvance;
    if (s2 == n_states && s == n_states - 1) return kAdvance;
    if (s2 == s) return kStay;
    return -1;
  }
  if (s2 == n_states + 1) return kDisengage;
  if (s2 == s - 1 && s > 0) return kRegress;
  if (s2 == s) return kStay;
  return -1;
}

struct BucketedData {
  // count per (chain state, intervention, action, outcome)
  std::vector<std::pair<int, int>> cells;  // (packed index, count)
  bool impossible = false;
};

int pack(int s, int x, int a, int o) { return ((s * kNumAiActions + x) * 2 + a) * 4 + o; }

BucketedData bucket(const std::vector<LogTuple>& tuples, int n_states) {
  BucketedData out;
  std::vector<int> dense(static_cast<std::size_t>(n_states) * kNumAiActions * 8, 0);
  for (const auto& t : tuples) {
    const int s = t.s.state;
    const int a = t.s2.prev_action;
    if (s < 0 || s >= n_states || a < 0 || a > 1) {
      out.impossible = true;
      return out;
    }
    const int o = classify(n_states, s, a, t.s2.state);
    if (o < 0) {
      out.impossible = true;
      return out;
    }
    ++dense[pack(s, static_cast<int>(t.x), a, o)];
  }
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] > 0) out.cells.emplace_back(static_cast<int>(i), dense[i]);
  }
  return out;
}

// Per-candidate log pi(a|s,x) table via exact value recursions (no pow), and
// log transition factors per (action, outcome).
struct CandidateTables {
  std::vector<double> logpi;  // [s][x][a]
  double log_t[2][4];         // [a][outcome], generic states
  double log_t0[2][4];        // same at s = 0 (p_d0 replaces p_d; no regression)

  double cell(int n_states, int s, int x, int a, int o) const {
    (void)n_states;
    const double* t = (s == 0 ? log_t0[a] : log_t[a]);
    return logpi[(s * kNumAiActions + x) * 2 + a] + t[o];
  }
};

CandidateTables build_tables(const ChainworldParams& p, double tau) {
  const int N = p.n_states;
  CandidateTables tb;
  tb.logpi.assign(static_cast<std::size_t>(N) * kNumAiActions * 2, 0.0);

  for (int xi = 0; xi < kNumAiActions; ++xi) {
    const ChainworldParams th = apply_intervention(p, static_cast<AiAction>(xi));
    // Pursuit values by backward recursion, disengagement values forward.
    std::vector<double> vg(N + 1), vd(N);
    vg[N] = th.r_g;
    const double zg = 1.0 - th.gamma * (1.0 - th.p_g);
    for (int n = N - 1; n >= 0; --n)
      vg[n] = (th.r_b + th.gamma * th.p_g * vg[n + 1]) / zg;
    vd[0] = th.gamma * th.p_d0 * th.r_d / (1.0 - th.gamma * (1.0 - th.p_d0));
    const double zd = 1.0 - th.gamma * (1.0 - th.p_d - th.p_l);
    for (int n = 1; n < N; ++n)
      vd[n] = (th.gamma * th.p_d * th.r_d + th.p_l * th.r_l +
               th.gamma * th.p_l * vd[n - 1]) /
              zd;
    auto vopt = [&](int n) {
      if (n >= N) return th.r_g;
      return std::max(vg[n], vd[n]);
    };
    for (int n = 0; n < N; ++n) {
      const double q1 =
          th.r_b + th.gamma * (th.p_g * vopt(n + 1) + (1.0 - th.p_g) * vopt(n));
      double q0;
      if (n == 0) {
        q0 = th.gamma * (th.p_d0 * th.r_d + (1.0 - th.p_d0) * vopt(0));
      } else {
        q0 = th.p_l * th.r_l + th.gamma * (th.p_d * th.r_d + th.p_l * vopt(n - 1) +
                                           (1.0 - th.p_d - th.p_l) * vopt(n));
      }
      const double d = (q1 - q0) / tau;
      tb.logpi[(n * kNumAiActions + xi) * 2 + 1] = -softplus(-d);
      tb.logpi[(n * kNumAiActions + xi) * 2 + 0] = -softplus(d);
    }
  }

  for (int a = 0; a < 2; ++a) {
    for (int o = 0; o < 4; ++o) {
      tb.log_t[a][o] = kNegInf;
      tb.log_t0[a][o] = kNegInf;
    }
  }
  tb.log_t[1][kAdvance] = std::log(p.p_g);
  tb.log_t[1][kStay] = std::log(1.0 - p.p_g);
  tb.log_t[0][kDisengage] = std::log(p.p_d);
  tb.log_t[0][kRegress] = std::log(p.p_l);
  tb.log_t[0][kStay] = std::log(std::max(1.0 - p.p_d - p.p_l, 0.0));
  tb.log_t0[1][kAdvance] = tb.log_t[1][kAdvance];
  tb.log_t0[1][kStay] = tb.log_t[1][kStay];
  tb.log_t0[0][kDisengage] = std::log(p.p_d0);
  tb.log_t0[0][kStay] = std::log(1.0 - p.p_d0);
  return tb;
}

double bucketed_log_likelihood(const ChainworldParams& p, double tau,
                               const BucketedData& data) {
  if (data.impossible) return kNegInf;
  if (data.cells.empty()) return 0.0;
  const CandidateTables tb = build_tables(p, tau);
  double sum = 0.0;
  for (const auto& [idx, count] : data.cells) {
    const int o = idx % 4;
    const int a = (idx / 4) % 2;
    const int x = (idx / 8) % kNumAiActions;
    const int s = idx / (8 * kNumAiActions);
    sum += count * tb.cell(p.n_states, s, x, a, o);
    if (sum == kNegInf) return kNegInf;
  }
  return sum;
}

}  // namespace

FitResult sample_fit_candidate(const FitConfig& cfg, Rng& rng) {
  FitResult c;
  c.params.n_states = cfg.n_states;
  c.params.r_g = rng.uniform(5.0, 50.0);
  c.params.r_d = rng.uniform(0.0, 5.0);
  c.params.r_l = rng.uniform(-5.0, 0.0);
  c.params.r_b = rng.uniform(-1.0, 0.0);
  c.params.gamma = rng.uniform(0.01, 0.99);
  c.params.p_g = rng.uniform(0.0, 1.0);
  c.params.p_d0 = rng.uniform(0.0, 1.0);
  double u = rng.uniform();
  double v = rng.uniform();
  if (u + v > 1.0) {  // reflect onto the simplex
    u = 1.0 - u;
    v = 1.0 - v;
  }
  c.params.p_d = u;
  c.params.p_l = v;
  c.params.delta_gamma = rng.uniform(0.0, 1.0);
  c.params.delta_b = rng.uniform(0.0, 1.0);
  c.tau = rng.uniform(0.01, 0.3);
  return c;
}

double chain_log_likelihood(const ChainworldParams& p, double tau,
                            const std::vector<LogTuple>& tuples) {
  double sum = 0.0;
  for (const auto& t : tuples) {
    const int s = t.s.state;
    const int a = t.s2.prev_action;
    if (s < 0 || s >= p.n_states || a < 0 || a > 1) return kNegInf;
    const ChainworldParams th = apply_intervention(p, t.x);
    const double p1 = softmax_act_prob(th, s, tau);
    const double pa = a == 1 ? p1 : 1.0 - p1;
    double pt = 0.0;
    for (const auto& tr : chain_transitions(p, s, a)) {
      if (tr.next == t.s2.state) pt += tr.prob;
    }
    if (pa <= 0.0 || pt <= 0.0) return kNegInf;
    sum += std::log(pa) + std::log(pt);
  }
  return sum;
}

namespace {

// Uniform step of width `scale` x range in every coordinate, clamped back to
// the sampling box ((p_d, p_l) back to the simplex). Coarse steps hop between
// nearby modes, fine steps polish the current one.
FitResult perturb_candidate(const FitResult& base, const FitConfig& cfg,
                            double scale, Rng& rng) {
  auto step = [&](double v, double lo, double hi) {
    return std::clamp(v + (hi - lo) * scale * rng.uniform(-1.0, 1.0), lo, hi);
  };
  FitResult c = base;
  c.params.n_states = cfg.n_states;
  c.params.r_g = step(c.params.r_g, 5.0, 50.0);
  c.params.r_d = step(c.params.r_d, 0.0, 5.0);
  c.params.r_l = step(c.params.r_l, -5.0, 0.0);
  c.params.r_b = step(c.params.r_b, -1.0, 0.0);
  c.params.gamma = step(c.params.gamma, 0.01, 0.99);
  c.params.p_g = step(c.params.p_g, 0.0, 1.0);
  c.params.p_d0 = step(c.params.p_d0, 0.0, 1.0);
  c.params.p_d = step(c.params.p_d, 0.0, 1.0);
  c.params.p_l = step(c.params.p_l, 0.0, 1.0 - c.params.p_d);
  c.params.delta_gamma = step(c.params.delta_gamma, 0.0, 1.0);
  c.params.delta_b = step(c.params.delta_b, 0.0, 1.0);
  c.tau = step(c.tau, 0.01, 0.3);
  return c;
}

constexpr double kPerturbScales[] = {0.4, 0.1, 0.02};

}  // namespace

FitResult fit_chainworld(const std::vector<LogTuple>& tuples, const FitConfig& cfg,
                         Rng& rng, const FitResult* incumbent) {
  const BucketedData data = bucket(tuples, cfg.n_states);
  FitResult best;
  bool have = false;
  if (incumbent != nullptr) {
    best = *incumbent;
    best.log_likelihood = bucketed_log_likelihood(best.params, best.tau, data);
    have = true;
  }
  const int n_fresh = incumbent != nullptr ? cfg.n_candidates / 2 : cfg.n_candidates;
  for (int i = 0; i < cfg.n_candidates; ++i) {
    FitResult cand = i < n_fresh
                         ? sample_fit_candidate(cfg, rng)
                         : perturb_candidate(best, cfg, kPerturbScales[i % 3], rng);
    cand.log_likelihood = bucketed_log_likelihood(cand.params, cand.tau, data);
    if (!have || cand.log_likelihood > best.log_likelihood) {
      best = cand;
      have = true;
    }
  }
  return best;
}

// --- ChainworldEstimator -----------------------------------------------------

ChainworldEstimator::ChainworldEstimator(Mapping mapping, FitConfig fit_cfg,
                                         AiConfig ai_cfg)
    : map_(std::move(mapping)), fit_cfg_(fit_cfg), ai_cfg_(ai_cfg) {}

AiAction ChainworldEstimator::act(const AiStateRef& s, Rng& rng) {
  if (dirty_) refit(rng);  // covers the initial no-data fit: deterministic draw
  const int chain_state = map_.f[s.state];
  if (chain_state >= fit_cfg_.n_states) return AiAction::NoOp;
  return labels_[chain_state];
}

void ChainworldEstimator::observe(const LogTuple& t) {
  LogTuple m;
  m.s.state = map_.f[t.s.state];
  m.s.prev_action = -1;  // irrelevant to the likelihood
  m.x = t.x;
  m.reward = t.reward;
  m.s2.state = map_.f[t.s2.state];
  m.s2.prev_action = map_.g[t.s.state][t.s2.prev_action];
  data_.push_back(m);
  dirty_ = true;
}

void ChainworldEstimator::end_episode(Rng& rng) {
  if (dirty_) refit(rng);
}

void ChainworldEstimator::refit(Rng& rng) {
  // Retain the current fit as an incumbent only while its policy is making
  // progress. A fit whose policy stalls the human explains the resulting
  // abstain data perfectly and would never be displaced, yet its own no-ops
  // prevent collecting the intervention outcomes that could disprove it; in
  // that state each refit searches from scratch instead.
  const bool stalled = !data_.empty() && data_.back().x == AiAction::NoOp &&
                       data_.back().s2.prev_action == 0;
  const FitResult* incumbent = (has_fit_ && !stalled) ? &fit_ : nullptr;
  fit_ = fit_chainworld(data_, fit_cfg_, rng, incumbent);
  labels_ = three_window_policy(fit_.params, ai_cfg_);
  has_fit_ = true;
  dirty_ = false;
}

// --- ModelBasedEstimator -----------------------------------------------------

ModelBasedEstimator::ModelBasedEstimator(AiStateSpace space, std::vector<char> terminal,
                                         std::vector<double> terminal_value,
                                         AiConfig cfg, double smoothing)
    : space_(space),
      terminal_(std::move(terminal)),
      terminal_value_(std::move(terminal_value)),
      cfg_(cfg),
      beta_(smoothing) {
  const int n = space_.size();
  counts_.resize(static_cast<std::size_t>(n) * kNumAiActions);
  totals_.assign(static_cast<std::size_t>(n) * kNumAiActions, 0);
  v_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (terminal_[i]) v_[i] = terminal_value_[i];
  }
  policy_.assign(n, AiAction::NoOp);
  refit();
}

AiAction ModelBasedEstimator::act(const AiStateRef& s, Rng&) {
  return policy_[id_of(space_, s)];
}

void ModelBasedEstimator::observe(const LogTuple& t) {
  const int i = id_of(space_, t.s);
  const int j = id_of(space_, t.s2);
  auto& row = counts_[i * kNumAiActions + static_cast<int>(t.x)];
  bool found = false;
  for (auto& [state, n] : row) {
    if (state == j) {
      ++n;
      found = true;
      break;
    }
  }
  if (!found) row.emplace_back(j, 1);
  ++totals_[i * kNumAiActions + static_cast<int>(t.x)];
  refit();  // warm-started, so the incremental re-solve is cheap
}

void ModelBasedEstimator::end_episode(Rng&) {}

void ModelBasedEstimator::refit() {
  const int n = space_.size();
  std::vector<double> next(v_);
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double mean_v = 0.0;
    for (int i = 0; i < n; ++i) mean_v += v_[i];
    mean_v /= n;
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      if (terminal_[i]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (int x = 0; x < kNumAiActions; ++x) {
        const auto& row = counts_[i * kNumAiActions + x];
        double acc = beta_ * mean_v;
        for (const auto& [j, c] : row) acc += c * v_[j];
        const double r = x == 0 ? cfg_.r_step : cfg_.r_intervene;
        const double q =
            r + cfg_.gamma_ai * acc / (totals_[i * kNumAiActions + x] + beta_);
        best = std::max(best, q);
      }
      next[i] = best;
      delta = std::max(delta, std::fabs(best - v_[i]));
    }
    v_.swap(next);
    if (delta < 1e-9) break;
  }
  // Greedy policy, ties to the cheapest (NoOp-first) action.
  double mean_v = 0.0;
  for (int i = 0; i < n; ++i) mean_v += v_[i];
  mean_v /= n;
  for (int i = 0; i < n; ++i) {
    if (terminal_[i]) continue;
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int x = 0; x < kNumAiActions; ++x) {
      const auto& row = counts_[i * kNumAiActions + x];
      double acc = beta_ * mean_v;
      for (const auto& [j, c] : row) acc += c * v_[j];
      const double r = x == 0 ? cfg_.r_step : cfg_.r_intervene;
      const double q =
          r + cfg_.gamma_ai * acc / (totals_[i * kNumAiActions + x] + beta_);
      if (q > best) {
        best = q;
        arg = x;
      }
    }
    policy_[i] = static_cast<AiAction>(arg);
  }
}

// --- QLearningEstimator ------------------------------------------------------

QLearningEstimator::QLearningEstimator(AiStateSpace space, std::vector<char> terminal,
                                       AiConfig cfg, double learning_rate,
                                       double epsilon)
    : space_(space),
      terminal_(std::move(terminal)),
      cfg_(cfg),
      lr_(learning_rate),
      eps_(epsilon) {
  q_.assign(static_cast<std::size_t>(space_.size()) * kNumAiActions, 0.0);
}

AiAction QLearningEstimator::act(const AiStateRef& s, Rng& rng) {
  if (rng.uniform() < eps_)
    return static_cast<AiAction>(rng.uniform_int(0, kNumAiActions - 1));
  const int i = id_of(space_, s);
  int arg = 0;
  double best = q_[i * kNumAiActions];
  for (int x = 1; x < kNumAiActions; ++x) {
    if (q_[i * kNumAiActions + x] > best) {
      best = q_[i * kNumAiActions + x];
      arg = x;
    }
  }
  return static_cast<AiAction>(arg);
}

void QLearningEstimator::observe(const LogTuple& t) {
  const int i = id_of(space_, t.s);
  const int j = id_of(space_, t.s2);
  double target = t.reward;
  if (!terminal_[j]) {
    double best = q_[j * kNumAiActions];
    for (int x = 1; x < kNumAiActions; ++x)
      best = std::max(best, q_[j * kNumAiActions + x]);
    target += cfg_.gamma_ai * best;
  }
  double& q = q_[i * kNumAiActions + static_cast<int>(t.x)];
  q += lr_ * (target - q);
}

// --- factory ------------------------------------------------------------------

namespace {

std::vector<AiAction> oracle_labels(const World& truth, const AiConfig& cfg) {
  if (const auto* chain = dynamic_cast<const ChainWorld*>(&truth)) {
    auto labels = three_window_policy(chain->params(), cfg);
    labels.resize(truth.n_states(), AiAction::NoOp);
    return labels;
  }
  return solve_ai(truth, cfg).marginal;
}

}  // namespace

std::unique_ptr<Estimator> make_estimator(
    const std::string& name, const World& truth,
    const std::optional<ChainAbstraction>& abstraction, const AiConfig& ai_cfg,
    const FitConfig& fit_cfg) {
  if (name == "oracle")
    return std::make_unique<LabelledEstimator>(oracle_labels(truth, ai_cfg));
  if (name == "always_gamma")
    return std::make_unique<FixedEstimator>(AiAction::InterveneGamma);
  if (name == "always_burden")
    return std::make_unique<FixedEstimator>(AiAction::InterveneBurden);
  if (name == "random") return std::make_unique<RandomEstimator>();

  if (name == "chainworld") {
    FitConfig fc = fit_cfg;
    if (abstraction) {
      fc.n_states = abstraction->chain.n_states;
      return std::make_unique<ChainworldEstimator>(abstraction->mapping, fc, ai_cfg);
    }
    const auto* chain = dynamic_cast<const ChainWorld*>(&truth);
    if (!chain)
      throw std::invalid_argument(
          "chainworld estimator needs a mapping for non-chain worlds");
    fc.n_states = chain->params().n_states;
    return std::make_unique<ChainworldEstimator>(identity_mapping(truth), fc, ai_cfg);
  }

  if (name == "model_based" || name == "model_free") {
    AiStateSpace space{truth.n_states(), truth.n_actions()};
    std::vector<char> terminal(space.size(), 0);
    std::vector<double> terminal_value(space.size(), 0.0);
    for (int id = 0; id < space.size(); ++id) {
      const int s = id == space.sentinel() ? truth.start_state() : space.state_of(id);
      const StateKind k = truth.kind(s);
      if (k != StateKind::Progress) {
        terminal[id] = 1;
        terminal_value[id] = k == StateKind::Goal ? ai_cfg.r_goal : ai_cfg.r_disengage;
      }
    }
    if (name == "model_based")
      return std::make_unique<ModelBasedEstimator>(space, std::move(terminal),
                                                   std::move(terminal_value), ai_cfg);
    return std::make_unique<QLearningEstimator>(space, std::move(terminal), ai_cfg);
  }

  throw std::invalid_argument("unknown estimator: " + name);
}

}  // namespace bmrl
