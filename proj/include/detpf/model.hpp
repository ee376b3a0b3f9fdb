#pragma once

// Scalar benchmark state-space model (univariate nonstationary growth):
//   x_k = x_{k-1}/2 + 25 x_{k-1}/(1 + x_{k-1}^2) + 8 cos(1.2 k) + v_k
//   z_k = x_k^2 / 20 + n_k
// with v_k ~ N(0, process_var), n_k ~ N(0, meas_var), x_0 ~ N(0, prior_var).
// The likelihood is cheap on purpose: the benchmark stresses resampling.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "detpf/dist_vector.hpp"
#include "detpf/engine.hpp"

namespace detpf {

struct ModelParams {
  double process_var = 10.0;
  double meas_var = 1.0;
  double prior_var = 10.0;
  int horizon = 50;

  void validate() const;
};

struct Trajectory {
  std::vector<double> x_true;  // x_1..x_T
  std::vector<double> z;       // z_1..z_T
  std::uint64_t seed = 0;

  std::size_t steps() const { return z.size(); }
};

double growth_dynamics_mean(double x_prev, int k);

Trajectory simulate_truth(const ModelParams& params, std::uint64_t seed);

DistVector<double> prior_sample(Pass& pass, std::size_t n, const ModelParams& params,
                                std::uint64_t seed);

// Bootstrap proposal: each particle moves through the dynamics with fresh
// noise drawn from its own key's stream, so results are order-independent.
DistVector<double> propagate(Pass& pass, const DistVector<double>& states,
                             const DistVector<long long>& keys, int k, const ModelParams& params,
                             std::uint64_t seed);

// Per-particle log-likelihood increment, up to a common constant.
DistVector<double> log_likelihood(Pass& pass, const DistVector<double>& states, double z,
                                  const ModelParams& params);

void trajectory_to_csv(const Trajectory& t, std::ostream& os);
Trajectory trajectory_from_csv(std::istream& is);
void save_trajectory(const Trajectory& t, const std::string& path);
Trajectory load_trajectory(const std::string& path);

}  // namespace detpf
