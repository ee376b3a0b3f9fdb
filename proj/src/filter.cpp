#include "detpf/filter.hpp"

#include <cmath>
#include <ostream>

#include "detpf/primitives.hpp"

namespace detpf {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Atz: return "atz";
    case Variant::Nested: return "nested";
    case Variant::Naive: return "naive";
    case Variant::Sequential: return "sequential";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "atz") return Variant::Atz;
  if (name == "nested") return Variant::Nested;
  if (name == "naive") return Variant::Naive;
  if (name == "sequential") return Variant::Sequential;
  throw std::invalid_argument("unknown variant: " + name);
}

void FilterConfig::validate() const {
  model.validate();
  if (particles == 0) throw std::invalid_argument("particle count must be >= 1");
  if (variant == Variant::Sequential) {
    if (workers != 1) throw std::invalid_argument("sequential variant runs with one worker");
  } else {
    if (particles < 2 || !is_pow2(particles))
      throw std::invalid_argument("parallel variants need a power-of-two particle count >= 2");
  }
  if (workers < 1 || static_cast<std::size_t>(workers) > particles)
    throw std::invalid_argument("worker count must satisfy 1 <= P <= N");
  const double nt = threshold();
  if (!(nt >= 0.0) || nt > static_cast<double>(particles))
    throw std::invalid_argument("resampling threshold must lie in [0, N]");
}

DistVector<double> normalize(Pass& pass, const DistVector<double>& w_star) {
  for (std::size_t i = 0; i < w_star.size(); ++i)
    if (!std::isfinite(w_star[i]) || w_star[i] < 0.0)
      throw std::runtime_error("normalize: weights collapsed (non-finite or negative)");
  const double total = tree_reduce_sum(pass, w_star);
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error("normalize: weights collapsed (zero or non-finite sum)");
  auto denom = expand(pass, total, w_star.size());
  return ew_zip(pass, w_star, denom, [](double a, double b) { return a / b; });
}

double ess(Pass& pass, const DistVector<double>& w) {
  auto sq = ew_map(pass, w, [](double x) { return x * x; });
  return 1.0 / tree_reduce_sum(pass, sq);
}

double estimate(Pass& pass, const DistVector<double>& w, const DistVector<double>& x) {
  auto prod = ew_zip(pass, w, x, [](double a, double b) { return a * b; });
  return tree_reduce_sum(pass, prod);
}

Ensemble init_ensemble(Pass& pass, const FilterConfig& cfg) {
  Ensemble ens;
  const std::size_t n = cfg.particles;
  ens.keys.resize(n);
  pass.map(ens.keys, 0, [](std::size_t i) { return static_cast<long long>(i); });
  ens.states = prior_sample(pass, n, cfg.model, cfg.seed);
  ens.logw.resize(n);
  const double lw0 = -std::log(static_cast<double>(n));
  pass.map(ens.logw, 0, [&](std::size_t) { return lw0; });
  return ens;
}

namespace {

// Fully sequential reference step: plain left-to-right arithmetic everywhere,
// with the same noise streams as the parallel path.
StepResult sequential_step(const Ensemble& ens, double z, const FilterConfig& cfg, int k) {
  const std::size_t n = cfg.particles;
  StepResult res;
  res.diag.k = k;

  std::vector<double> states(n), logw(n);
  const double sv = std::sqrt(cfg.model.process_var);
  for (std::size_t i = 0; i < n; ++i) {
    states[i] = growth_dynamics_mean(ens.states[i], k) +
                sv * stream_gauss(cfg.seed, Stream::Dynamics, static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(ens.keys[i]) + 1);
    const double predicted = states[i] * states[i] / 20.0;
    const double r = z - predicted;
    logw[i] = ens.logw[i] - r * r / (2.0 * cfg.model.meas_var);
  }

  double mx = logw[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logw[i]);
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (w[i] = std::exp(logw[i] - mx));
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error("normalize: weights collapsed (zero or non-finite sum)");
  double sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] /= total;
    sumsq += w[i] * w[i];
  }
  res.diag.ess = 1.0 / sumsq;

  res.ensemble.keys.resize(n);
  res.ensemble.states.resize(n);
  res.ensemble.logw.resize(n);
  if (res.diag.ess <= cfg.threshold()) {
    res.diag.resampled = true;
    const double eps = draw_epsilon(cfg.seed, static_cast<std::uint64_t>(k), n);
    DistVector<double> wv(n);
    DistVector<Particle> xv(n);
    for (std::size_t i = 0; i < n; ++i) {
      wv[i] = w[i];
      xv[i] = Particle{states[i], ens.keys[i]};
    }
    auto [m, resampled] = sequential_oracle(wv, eps, xv);
    const double lw0 = -std::log(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      res.ensemble.states[i] = resampled[i].state;
      res.ensemble.keys[i] = resampled[i].key;
      res.ensemble.logw[i] = lw0;
    }
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += res.ensemble.states[i];
    res.diag.estimate = mu / static_cast<double>(n);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      res.ensemble.states[i] = states[i];
      res.ensemble.keys[i] = ens.keys[i];
      res.ensemble.logw[i] = std::log(w[i]);
    }
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += w[i] * states[i];
    res.diag.estimate = mu;
  }
  return res;
}

}  // namespace

StepResult sir_step(const Ensemble& ens, double z, const FilterConfig& cfg, int k) {
  cfg.validate();
  if (cfg.variant == Variant::Sequential) return sequential_step(ens, z, cfg, k);

  const std::size_t n = cfg.particles;
  Pass pass("sir_step", cfg.workers);
  StepResult res;
  res.diag.k = k;

  auto states = propagate(pass, ens.states, ens.keys, k, cfg.model, cfg.seed);
  auto loglik = log_likelihood(pass, states, z, cfg.model);
  auto logw = ew_zip(pass, ens.logw, loglik, [](double a, double b) { return a + b; });

  const double mx = tree_reduce_max(pass, logw);
  if (!std::isfinite(mx)) throw std::runtime_error("weights collapsed: max log-weight not finite");
  auto shifted = ew_map(pass, logw, [&](double lw) { return std::exp(lw - mx); });
  auto w = normalize(pass, shifted);
  res.diag.ess = ess(pass, w);

  if (res.diag.ess <= cfg.threshold()) {
    res.diag.resampled = true;
    const double eps = draw_epsilon(cfg.seed, static_cast<std::uint64_t>(k), n);
    auto m = mvr_counts(pass, w, eps);
    DistVector<Particle> xv(n);
    pass.map(xv, 2, [&](std::size_t i) { return Particle{states[i], ens.keys[i]}; });
    DistVector<Particle> resampled;
    switch (cfg.variant) {
      case Variant::Atz: resampled = redistribute_atz(pass, m, xv); break;
      case Variant::Nested: resampled = redistribute_nested(pass, m, xv); break;
      case Variant::Naive: resampled = redistribute_naive(pass, m, xv); break;
      case Variant::Sequential: break;  // handled above
    }
    res.ensemble.states.resize(n);
    pass.map(res.ensemble.states, 1, [&](std::size_t i) { return resampled[i].state; });
    res.ensemble.keys.resize(n);
    pass.map(res.ensemble.keys, 1, [&](std::size_t i) { return resampled[i].key; });
    res.ensemble.logw = expand(pass, -std::log(static_cast<double>(n)), n);
    auto uniform = expand(pass, 1.0 / static_cast<double>(n), n);
    res.diag.estimate = estimate(pass, uniform, res.ensemble.states);
  } else {
    res.ensemble.states = std::move(states);
    res.ensemble.keys = ens.keys;
    res.ensemble.logw = ew_map(pass, w, [](double x) { return std::log(x); });
    res.diag.estimate = estimate(pass, w, res.ensemble.states);
  }
  res.diag.stats = pass.finish();
  return res;
}

std::vector<StepDiagnostics> run_filter(const FilterConfig& cfg, const Trajectory& trajectory) {
  cfg.validate();
  std::vector<StepDiagnostics> diags;
  diags.reserve(trajectory.steps());

  Ensemble ens;
  if (cfg.variant == Variant::Sequential) {
    const std::size_t n = cfg.particles;
    ens.keys.resize(n);
    ens.states.resize(n);
    ens.logw.resize(n);
    const double s0 = std::sqrt(cfg.model.prior_var);
    const double lw0 = -std::log(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      ens.keys[i] = static_cast<long long>(i);
      ens.states[i] = s0 * stream_gauss(cfg.seed, Stream::Prior, 0, i);
      ens.logw[i] = lw0;
    }
  } else {
    Pass init("init", cfg.workers);
    ens = init_ensemble(init, cfg);
  }

  for (std::size_t step = 0; step < trajectory.steps(); ++step) {
    auto res = sir_step(ens, trajectory.z[step], cfg, static_cast<int>(step) + 1);
    ens = std::move(res.ensemble);
    diags.push_back(std::move(res.diag));
  }
  return diags;
}

void diagnostics_to_csv(const std::vector<StepDiagnostics>& diags, std::ostream& os) {
  os << "#schema=1\nk,ess,resampled,mu,supersteps,moved\n";
  os.precision(17);
  for (const auto& d : diags)
    os << d.k << ',' << d.ess << ',' << (d.resampled ? 1 : 0) << ',' << d.estimate << ','
       << d.stats.supersteps << ',' << d.stats.moved << '\n';
}

}  // namespace detpf
