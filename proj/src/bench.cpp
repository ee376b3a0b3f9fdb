#include "detpf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "detpf/rng.hpp"

namespace detpf {

const char* scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::RandomWeights: return "random-weights";
    case ScenarioKind::SkewedWeights: return "skewed-weights";
    case ScenarioKind::SingleSurvivor: return "single-survivor";
    case ScenarioKind::Uniform: return "uniform";
  }
  return "?";
}

ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "random-weights") return ScenarioKind::RandomWeights;
  if (name == "skewed-weights") return ScenarioKind::SkewedWeights;
  if (name == "single-survivor") return ScenarioKind::SingleSurvivor;
  if (name == "uniform") return ScenarioKind::Uniform;
  throw std::invalid_argument("unknown scenario: " + name);
}

namespace {

CopyCounts counts_from_weights(const DistVector<double>& w, double eps) {
  const std::size_t n = w.size();
  const double dn = static_cast<double>(n);
  CopyCounts m(n);
  auto prev = static_cast<long long>(std::floor(dn * eps));
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == n) {
      m[i] = static_cast<long long>(n) - prev;
    } else {
      cum += w[i];
      const auto fi = static_cast<long long>(std::floor(dn * (eps + cum)));
      m[i] = fi - prev;
      prev = fi;
    }
  }
  return m;
}

}  // namespace

ScenarioData scenario_generate(ScenarioKind kind, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("scenario size must be >= 1");
  ScenarioData d;
  d.kind = kind;
  d.n = n;
  d.seed = seed;
  d.particles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double state =
        10.0 * stream_gauss(seed, Stream::Scenario, 1, i);
    d.particles[i] = Particle{state, static_cast<long long>(i)};
  }
  d.epsilon = draw_epsilon(seed, 0, n);

  switch (kind) {
    case ScenarioKind::RandomWeights: {
      d.weights.resize(n);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += (d.weights[i] = stream_u01(seed, Stream::Scenario, 2, i));
      for (std::size_t i = 0; i < n; ++i) d.weights[i] /= sum;
      d.has_weights = true;
      d.counts = counts_from_weights(d.weights, d.epsilon);
      break;
    }
    case ScenarioKind::SkewedWeights: {
      d.weights.resize(n);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        sum += (d.weights[i] = std::exp(4.0 * stream_gauss(seed, Stream::Scenario, 3, i)));
      for (std::size_t i = 0; i < n; ++i) d.weights[i] /= sum;
      d.has_weights = true;
      d.counts = counts_from_weights(d.weights, d.epsilon);
      break;
    }
    case ScenarioKind::SingleSurvivor: {
      d.counts.resize(n);
      for (std::size_t i = 0; i < n; ++i) d.counts[i] = 0;
      d.counts[0] = static_cast<long long>(n);
      break;
    }
    case ScenarioKind::Uniform: {
      d.counts.resize(n);
      for (std::size_t i = 0; i < n; ++i) d.counts[i] = 1;
      d.weights.resize(n);
      for (std::size_t i = 0; i < n; ++i) d.weights[i] = 1.0 / static_cast<double>(n);
      d.has_weights = true;
      break;
    }
  }
  return d;
}

namespace {

bool multiset_matches_oracle(const DistVector<Particle>& variant_out,
                             const DistVector<Particle>& oracle_out) {
  if (variant_out.size() != oracle_out.size()) return false;
  const std::size_t n = variant_out.size();
  std::vector<Particle> sorted(variant_out.begin(), variant_out.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Particle& a, const Particle& b) { return a.key < b.key; });
  for (std::size_t i = 0; i < n; ++i) {
    if (sorted[i].key != oracle_out[i].key || sorted[i].state != oracle_out[i].state) return false;
  }
  return true;
}

struct TrialOutcome {
  bool mismatch = false;
  bool conservation = false;
  std::string detail;
};

TrialOutcome run_verify_trial(std::size_t n, std::uint64_t seed, int workers) {
  TrialOutcome out;
  // random normalized weights and an epsilon from the trial's own stream
  DistVector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += (w[i] = stream_u01(seed, Stream::Scenario, 11, i));
  for (std::size_t i = 0; i < n; ++i) w[i] /= sum;
  const double eps = draw_epsilon(seed, 12, n);

  DistVector<Particle> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = Particle{stream_gauss(seed, Stream::Scenario, 13, i), static_cast<long long>(i)};

  auto [oracle_m, oracle_x] = sequential_oracle(w, eps, x);

  long long total = 0;
  for (std::size_t i = 0; i < n; ++i) total += oracle_m[i];
  if (total != static_cast<long long>(n)) {
    out.conservation = true;
    out.detail = "oracle count sum != N";
    return out;
  }

  Pass mvr_pass("mvr", workers);
  auto m = mvr_counts(mvr_pass, w, eps);
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i] != oracle_m[i]) {
      out.mismatch = true;
      out.detail = "mvr_counts differs from grid-point counts";
      return out;
    }
  }

  {
    Pass pass("redistribute_atz", workers);
    auto got = redistribute_atz(pass, m, x);
    if (!multiset_matches_oracle(got, oracle_x)) {
      out.mismatch = true;
      out.detail = "atz multiset mismatch";
      return out;
    }
  }
  {
    Pass pass("redistribute_nested", workers);
    auto got = redistribute_nested(pass, m, x);
    if (!multiset_matches_oracle(got, oracle_x)) {
      out.mismatch = true;
      out.detail = "nested multiset mismatch";
      return out;
    }
  }
  {
    Pass pass("redistribute_naive", workers);
    auto got = redistribute_naive(pass, m, x);
    if (!multiset_matches_oracle(got, oracle_x)) {
      out.mismatch = true;
      out.detail = "naive multiset mismatch";
      return out;
    }
  }
  return out;
}

}  // namespace

VerifyReport verify_sweep(const VerifyOptions& opt) {
  VerifyReport report;
  std::vector<std::size_t> sizes = opt.sizes;
  if (sizes.empty()) {
    for (std::size_t n : {std::size_t{8}, std::size_t{64}, std::size_t{1024}, std::size_t{65536}})
      if (n <= opt.n_max) sizes.push_back(n);
  }
  std::mutex mu;
  for (std::size_t n : sizes) {
    std::atomic<std::size_t> next{0};
    const int nthreads = std::max(1, opt.threads);
    std::vector<std::thread> pool;
    auto worker = [&]() {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= opt.trials) break;
        const std::uint64_t trial_seed =
            stream_bits(opt.seed, Stream::Scenario, n, t);
        auto outcome = run_verify_trial(n, trial_seed, opt.workers);
        std::lock_guard<std::mutex> lock(mu);
        ++report.trials;
        if (outcome.mismatch) ++report.mismatches;
        if (outcome.conservation) ++report.conservation_failures;
        if ((outcome.mismatch || outcome.conservation) && report.first_failure.empty()) {
          std::ostringstream os;
          os << "n=" << n << " trial=" << t << ": " << outcome.detail;
          report.first_failure = os.str();
        }
      }
    };
    if (nthreads == 1) {
      worker();
    } else {
      pool.reserve(static_cast<std::size_t>(nthreads));
      for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
  }
  return report;
}

std::vector<BenchRow> bench_redistribute(const BenchOptions& opt) {
  std::vector<BenchRow> rows;
  for (auto scenario : opt.scenarios) {
    for (std::size_t n : opt.sizes) {
      auto data = scenario_generate(scenario, n, opt.seed);
      for (int p : opt.workers) {
        for (auto variant : opt.variants) {
          BenchRow row;
          row.scenario = scenario_name(scenario);
          row.variant = variant_name(variant);
          row.n = n;
          row.p = p;
          row.iterations = opt.iterations;
          const auto t0 = std::chrono::steady_clock::now();
          PassStats last;
          for (std::size_t it = 0; it < opt.iterations; ++it) {
            if (variant == Variant::Sequential) {
              auto out = sequential_redistribute(data.counts, data.particles);
              (void)out;
              continue;
            }
            Pass pass(std::string("redistribute_") + variant_name(variant), p);
            DistVector<Particle> out;
            switch (variant) {
              case Variant::Atz: out = redistribute_atz(pass, data.counts, data.particles); break;
              case Variant::Nested:
                out = redistribute_nested(pass, data.counts, data.particles);
                break;
              case Variant::Naive: out = redistribute_naive(pass, data.counts, data.particles); break;
              case Variant::Sequential: break;
            }
            last = pass.finish();
          }
          row.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          row.pps = row.wall_seconds > 0.0
                        ? static_cast<double>(n) * static_cast<double>(opt.iterations) /
                              row.wall_seconds
                        : 0.0;
          row.supersteps = last.supersteps;
          row.moved = last.moved;
          row.max_load = last.max_step_writes;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

void bench_to_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
  os << "#schema=1\nscenario,variant,n,p,iterations,pps,supersteps,moved,max_load,wall_seconds\n";
  os.precision(12);
  for (const auto& r : rows)
    os << r.scenario << ',' << r.variant << ',' << r.n << ',' << r.p << ',' << r.iterations << ','
       << r.pps << ',' << r.supersteps << ',' << r.moved << ',' << r.max_load << ','
       << r.wall_seconds << '\n';
}

void bench_to_json(const std::vector<BenchRow>& rows, std::ostream& os) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"scenario", r.scenario},
                   {"variant", r.variant},
                   {"n", r.n},
                   {"p", r.p},
                   {"iterations", r.iterations},
                   {"pps", r.pps},
                   {"supersteps", r.supersteps},
                   {"moved", r.moved},
                   {"max_load", r.max_load},
                   {"wall_seconds", r.wall_seconds}});
  }
  os << arr.dump(2) << '\n';
}

void speedup_report(const std::vector<BenchRow>& rows, std::ostream& os) {
  using CellKey = std::tuple<std::string, std::string, std::size_t, int>;
  std::map<CellKey, const BenchRow*> cells;
  for (const auto& r : rows) cells[{r.scenario, r.variant, r.n, r.p}] = &r;

  os << "#schema=1\nkind,scenario,variant,n,p,pps_ratio,count_ratio\n";
  os.precision(12);

  // speedup of atz relative to nested at each (scenario, n, p) present
  for (const auto& [key, row] : cells) {
    const auto& [scenario, variant, n, p] = key;
    if (variant != "atz") continue;
    auto it = cells.find({scenario, "nested", n, p});
    if (it == cells.end()) throw std::invalid_argument("speedup_report: missing nested cell");
    const BenchRow* nested = it->second;
    const double pps_ratio = nested->pps > 0.0 ? row->pps / nested->pps : 0.0;
    const double count_ratio = row->supersteps > 0
                                   ? static_cast<double>(nested->supersteps) /
                                         static_cast<double>(row->supersteps)
                                   : 0.0;
    os << "speedup," << scenario << ",atz-vs-nested," << n << ',' << p << ',' << pps_ratio << ','
       << count_ratio << '\n';
  }

  // strong scaling pps(P)/pps(1) per (scenario, variant, n)
  for (const auto& [key, row] : cells) {
    const auto& [scenario, variant, n, p] = key;
    auto it = cells.find({scenario, variant, n, 1});
    if (it == cells.end()) throw std::invalid_argument("speedup_report: missing P=1 cell");
    const double base = it->second->pps;
    os << "scaling," << scenario << ',' << variant << ',' << n << ',' << p << ','
       << (base > 0.0 ? row->pps / base : 0.0) << ",\n";
  }
}

}  // namespace detpf
