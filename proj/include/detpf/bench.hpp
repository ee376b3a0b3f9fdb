#pragma once

// Benchmark scenarios, oracle verification sweeps, throughput measurement
// (particles per second), and the derived speedup / strong-scaling report.
// Wall-clock numbers are reported, never asserted; instrumented counts are
// the deterministic contract.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "detpf/filter.hpp"
#include "detpf/resampling.hpp"

namespace detpf {

enum class ScenarioKind { RandomWeights, SkewedWeights, SingleSurvivor, Uniform };

const char* scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(const std::string& name);

struct ScenarioData {
  ScenarioKind kind = ScenarioKind::RandomWeights;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  DistVector<double> weights;  // normalized; present for weight-driven kinds
  bool has_weights = false;
  double epsilon = 0.0;
  CopyCounts counts;  // always present (derived for weight kinds)
  DistVector<Particle> particles;
};

ScenarioData scenario_generate(ScenarioKind kind, std::size_t n, std::uint64_t seed);

struct VerifyOptions {
  std::vector<std::size_t> sizes;  // defaults to {8, 64, 1024, 65536} capped by n_max
  std::size_t n_max = 65536;
  std::size_t trials = 1000;
  std::uint64_t seed = 7;
  int workers = 4;
  int threads = 1;
};

struct VerifyReport {
  std::uint64_t trials = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t conservation_failures = 0;
  std::string first_failure;
};

VerifyReport verify_sweep(const VerifyOptions& opt);

struct BenchRow {
  std::string scenario;
  std::string variant;
  std::size_t n = 0;
  int p = 1;
  std::size_t iterations = 1;
  double pps = 0.0;
  std::size_t supersteps = 0;
  std::uint64_t moved = 0;
  std::uint64_t max_load = 0;  // max per-worker writes in one superstep
  double wall_seconds = 0.0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes{1024, 4096};
  std::vector<int> workers{1, 2, 4};
  std::vector<Variant> variants{Variant::Atz, Variant::Nested};
  std::vector<ScenarioKind> scenarios{ScenarioKind::RandomWeights};
  std::size_t iterations = 3;
  std::uint64_t seed = 1;
};

std::vector<BenchRow> bench_redistribute(const BenchOptions& opt);

void bench_to_csv(const std::vector<BenchRow>& rows, std::ostream& os);
void bench_to_json(const std::vector<BenchRow>& rows, std::ostream& os);

// Derived report: count- and pps-based speedup of atz over nested per
// (scenario, N, P), and strong scaling pps(P)/pps(1) per (scenario,
// variant, N). Throws when a required cell is missing.
void speedup_report(const std::vector<BenchRow>& rows, std::ostream& os);

}  // namespace detpf
