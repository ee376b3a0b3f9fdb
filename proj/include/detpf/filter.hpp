#pragma once

// The SIR loop: propose, weight, normalize, effective-sample-size test,
// conditional resampling, estimate. Weights are carried in log space and
// exponentiated with max-subtraction before normalization. After any
// resampling all weights are reset to 1/N and the new population carries
// the canonical keys produced by redistribution, so estimates agree across
// redistribution variants up to reduction-order rounding.

#include <cstdint>
#include <string>
#include <vector>

#include "detpf/dist_vector.hpp"
#include "detpf/engine.hpp"
#include "detpf/model.hpp"
#include "detpf/resampling.hpp"

namespace detpf {

enum class Variant { Atz, Nested, Naive, Sequential };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct FilterConfig {
  std::size_t particles = 4096;
  int workers = 1;
  double resample_threshold = -1.0;  // < 0 means N/2
  Variant variant = Variant::Atz;
  std::uint64_t seed = 1;
  ModelParams model;

  double threshold() const {
    return resample_threshold < 0.0 ? static_cast<double>(particles) / 2.0 : resample_threshold;
  }
  void validate() const;
};

struct Ensemble {
  DistVector<long long> keys;
  DistVector<double> states;
  DistVector<double> logw;
};

struct StepDiagnostics {
  int k = 0;
  double ess = 0.0;
  bool resampled = false;
  double estimate = 0.0;
  PassStats stats;
};

// w = w* / sum(w*) via reduce + expand + element-wise divide.
DistVector<double> normalize(Pass& pass, const DistVector<double>& w_star);

double ess(Pass& pass, const DistVector<double>& w);

double estimate(Pass& pass, const DistVector<double>& w, const DistVector<double>& x);

Ensemble init_ensemble(Pass& pass, const FilterConfig& cfg);

struct StepResult {
  Ensemble ensemble;
  StepDiagnostics diag;
};
StepResult sir_step(const Ensemble& ens, double z, const FilterConfig& cfg, int k);

std::vector<StepDiagnostics> run_filter(const FilterConfig& cfg, const Trajectory& trajectory);

void diagnostics_to_csv(const std::vector<StepDiagnostics>& diags, std::ostream& os);

}  // namespace detpf
