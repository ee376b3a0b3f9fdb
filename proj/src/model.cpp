#include "detpf/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "detpf/rng.hpp"

namespace detpf {

void ModelParams::validate() const {
  if (!(process_var > 0.0) || !(meas_var > 0.0) || !(prior_var > 0.0))
    throw std::invalid_argument("model variances must be positive");
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
}

double growth_dynamics_mean(double x_prev, int k) {
  return 0.5 * x_prev + 25.0 * x_prev / (1.0 + x_prev * x_prev) +
         8.0 * std::cos(1.2 * static_cast<double>(k));
}

Trajectory simulate_truth(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  Trajectory t;
  t.seed = seed;
  t.x_true.reserve(static_cast<std::size_t>(params.horizon));
  t.z.reserve(static_cast<std::size_t>(params.horizon));
  const double sv = std::sqrt(params.process_var);
  const double sn = std::sqrt(params.meas_var);
  double x = std::sqrt(params.prior_var) * stream_gauss(seed, Stream::InitState, 0, 0);
  for (int k = 1; k <= params.horizon; ++k) {
    x = growth_dynamics_mean(x, k) +
        sv * stream_gauss(seed, Stream::Dynamics, static_cast<std::uint64_t>(k), 0);
    const double z = x * x / 20.0 +
                     sn * stream_gauss(seed, Stream::MeasNoise, static_cast<std::uint64_t>(k), 0);
    t.x_true.push_back(x);
    t.z.push_back(z);
  }
  return t;
}

DistVector<double> prior_sample(Pass& pass, std::size_t n, const ModelParams& params,
                                std::uint64_t seed) {
  params.validate();
  const double s0 = std::sqrt(params.prior_var);
  DistVector<double> out(n);
  pass.map(out, 0, [&](std::size_t i) { return s0 * stream_gauss(seed, Stream::Prior, 0, i); });
  return out;
}

DistVector<double> propagate(Pass& pass, const DistVector<double>& states,
                             const DistVector<long long>& keys, int k, const ModelParams& params,
                             std::uint64_t seed) {
  if (states.size() != keys.size()) throw std::invalid_argument("states/keys length mismatch");
  const double sv = std::sqrt(params.process_var);
  DistVector<double> out(states.size());
  pass.map(out, 2, [&](std::size_t i) {
    return growth_dynamics_mean(states[i], k) +
           sv * stream_gauss(seed, Stream::Dynamics, static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(keys[i]) + 1);
  });
  return out;
}

DistVector<double> log_likelihood(Pass& pass, const DistVector<double>& states, double z,
                                  const ModelParams& params) {
  if (!(params.meas_var > 0.0)) throw std::invalid_argument("measurement variance must be positive");
  const double inv2v = 1.0 / (2.0 * params.meas_var);
  DistVector<double> out(states.size());
  pass.map(out, 1, [&](std::size_t i) {
    const double predicted = states[i] * states[i] / 20.0;
    const double r = z - predicted;
    return -r * r * inv2v;
  });
  return out;
}

void trajectory_to_csv(const Trajectory& t, std::ostream& os) {
  os << "#schema=1\nk,x_true,z\n";
  os.precision(17);
  for (std::size_t i = 0; i < t.steps(); ++i)
    os << (i + 1) << ',' << t.x_true[i] << ',' << t.z[i] << '\n';
}

Trajectory trajectory_from_csv(std::istream& is) {
  Trajectory t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("k,", 0) == 0) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // k
    std::getline(row, cell, ',');
    t.x_true.push_back(std::stod(cell));
    std::getline(row, cell, ',');
    t.z.push_back(std::stod(cell));
  }
  return t;
}

void save_trajectory(const Trajectory& t, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  trajectory_to_csv(t, os);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return trajectory_from_csv(is);
}

}  // namespace detpf
