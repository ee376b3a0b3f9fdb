// detpf command line: end-to-end filter runs, oracle verification sweeps,
// redistribution benchmarks and scenario inspection.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "detpf/bench.hpp"
#include "detpf/filter.hpp"

namespace {

// "1024..65536" expands by doubling; "1024,2048" is an explicit list.
std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  const auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    const std::size_t lo = std::stoull(text.substr(0, range_pos));
    const std::size_t hi = std::stoull(text.substr(range_pos + 2));
    for (std::size_t n = lo; n <= hi; n <<= 1) sizes.push_back(n);
    return sizes;
  }
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) sizes.push_back(std::stoull(cell));
  return sizes;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> vals;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) vals.push_back(std::stoi(cell));
  return vals;
}

int force_p(int p) {
  const char* force = std::getenv("DETPF_FORCE_P1");
  if (force != nullptr && std::string(force) == "1") return 1;
  return p;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic data-parallel particle filter benchmark engine"};
  app.require_subcommand(1);

  // ---- filter ----
  auto* filter_cmd = app.add_subcommand("filter", "run the SIR filter and write diagnostics");
  std::size_t f_n = 4096;
  int f_p = 1, f_t = 50;
  std::string f_variant = "atz", f_out, f_format = "csv", f_trajectory, f_stats;
  double f_threshold = -1.0;
  std::uint64_t f_seed = 1;
  filter_cmd->add_option("--n", f_n, "particle count (power of two for parallel variants)");
  filter_cmd->add_option("--p", f_p, "worker count");
  filter_cmd->add_option("--variant", f_variant, "atz|nested|naive|sequential");
  filter_cmd->add_option("--seed", f_seed, "random seed");
  filter_cmd->add_option("--t", f_t, "time steps");
  filter_cmd->add_option("--threshold", f_threshold, "ESS resampling threshold (default N/2)");
  filter_cmd->add_option("--trajectory", f_trajectory, "trajectory CSV to filter (default: simulate)");
  filter_cmd->add_option("--out", f_out, "diagnostics output path (default stdout)");
  filter_cmd->add_option("--stats-json", f_stats, "write per-step pass stats as JSON lines");
  filter_cmd->add_option("--format", f_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  // ---- verify ----
  auto* verify_cmd = app.add_subcommand("verify", "oracle-equivalence sweep; nonzero exit on mismatch");
  std::size_t v_nmax = 65536, v_trials = 1000;
  std::uint64_t v_seed = 7;
  int v_p = 4, v_threads = 1;
  verify_cmd->add_option("--n-max", v_nmax, "largest population size in the sweep");
  verify_cmd->add_option("--trials", v_trials, "trials per population size");
  verify_cmd->add_option("--seed", v_seed, "sweep seed");
  verify_cmd->add_option("--p", v_p, "worker count");
  verify_cmd->add_option("--threads", v_threads, "host threads for the sweep");

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "redistribution benchmark sweep");
  std::string b_n = "1024..4096", b_p = "1,2,4", b_variants = "atz,nested",
              b_scenarios = "random-weights", b_out, b_speedup, b_format = "csv";
  std::size_t b_iters = 3;
  std::uint64_t b_seed = 1;
  bench_cmd->add_option("--n", b_n, "sizes: list '1024,2048' or doubling range '1024..65536'");
  bench_cmd->add_option("--p", b_p, "worker counts, comma separated");
  bench_cmd->add_option("--variant", b_variants, "variants, comma separated");
  bench_cmd->add_option("--scenario", b_scenarios, "scenarios, comma separated");
  bench_cmd->add_option("--iters", b_iters, "iterations per cell");
  bench_cmd->add_option("--seed", b_seed, "scenario seed");
  bench_cmd->add_option("--out", b_out, "rows output path (default stdout)");
  bench_cmd->add_option("--speedup-out", b_speedup, "also write the derived speedup/scaling CSV");
  bench_cmd->add_option("--format", b_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  // ---- scenario ----
  auto* scen_cmd = app.add_subcommand("scenario", "print a generated benchmark input");
  std::string s_kind = "single-survivor";
  std::size_t s_n = 8;
  std::uint64_t s_seed = 1;
  scen_cmd->add_option("--kind", s_kind, "random-weights|skewed-weights|single-survivor|uniform");
  scen_cmd->add_option("--n", s_n, "population size");
  scen_cmd->add_option("--seed", s_seed, "scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (filter_cmd->parsed()) {
      detpf::FilterConfig cfg;
      cfg.particles = f_n;
      cfg.workers = force_p(f_p);
      cfg.variant = detpf::variant_from_name(f_variant);
      cfg.seed = f_seed;
      cfg.resample_threshold = f_threshold;
      cfg.model.horizon = f_t;
      cfg.validate();

      detpf::Trajectory traj = f_trajectory.empty()
                                   ? detpf::simulate_truth(cfg.model, cfg.seed)
                                   : detpf::load_trajectory(f_trajectory);
      auto diags = detpf::run_filter(cfg, traj);

      std::ofstream file;
      auto& os = open_out(file, f_out);
      if (f_format == "csv") {
        detpf::diagnostics_to_csv(diags, os);
      } else {
        os << "[\n";
        for (std::size_t i = 0; i < diags.size(); ++i)
          os << "  {\"k\":" << diags[i].k << ",\"ess\":" << diags[i].ess
             << ",\"resampled\":" << (diags[i].resampled ? "true" : "false")
             << ",\"mu\":" << diags[i].estimate << "}" << (i + 1 < diags.size() ? ",\n" : "\n");
        os << "]\n";
      }
      if (!f_stats.empty()) {
        std::ofstream sf(f_stats);
        if (!sf) throw std::runtime_error("cannot open " + f_stats);
        for (const auto& d : diags) sf << d.stats.to_json() << '\n';
      }
      return 0;
    }

    if (verify_cmd->parsed()) {
      detpf::VerifyOptions opt;
      opt.n_max = v_nmax;
      opt.trials = v_trials;
      opt.seed = v_seed;
      opt.workers = force_p(v_p);
      opt.threads = v_threads;
      auto report = detpf::verify_sweep(opt);
      std::cout << report.trials << " trials, " << report.mismatches << " mismatches, "
                << report.conservation_failures << " conservation failures\n";
      if (!report.first_failure.empty()) std::cout << "first failure: " << report.first_failure << '\n';
      return (report.mismatches + report.conservation_failures) == 0 ? 0 : 1;
    }

    if (bench_cmd->parsed()) {
      detpf::BenchOptions opt;
      opt.sizes = parse_sizes(b_n);
      opt.workers = parse_ints(b_p);
      if (const char* force = std::getenv("DETPF_FORCE_P1"); force && std::string(force) == "1")
        opt.workers = {1};
      opt.variants.clear();
      {
        std::istringstream is(b_variants);
        std::string cell;
        while (std::getline(is, cell, ',')) opt.variants.push_back(detpf::variant_from_name(cell));
      }
      opt.scenarios.clear();
      {
        std::istringstream is(b_scenarios);
        std::string cell;
        while (std::getline(is, cell, ',')) opt.scenarios.push_back(detpf::scenario_from_name(cell));
      }
      opt.iterations = b_iters;
      opt.seed = b_seed;
      auto rows = detpf::bench_redistribute(opt);

      std::ofstream file;
      auto& os = open_out(file, b_out);
      if (b_format == "csv")
        detpf::bench_to_csv(rows, os);
      else
        detpf::bench_to_json(rows, os);
      if (!b_speedup.empty()) {
        std::ofstream sf(b_speedup);
        if (!sf) throw std::runtime_error("cannot open " + b_speedup);
        detpf::speedup_report(rows, sf);
      }
      return 0;
    }

    if (scen_cmd->parsed()) {
      auto data = detpf::scenario_generate(detpf::scenario_from_name(s_kind), s_n, s_seed);
      std::cout << "#scenario=" << s_kind << " n=" << s_n << " seed=" << s_seed
                << " epsilon=" << data.epsilon << '\n';
      std::cout << "i,count,weight,state\n";
      std::cout.precision(17);
      for (std::size_t i = 0; i < s_n; ++i) {
        std::cout << i << ',' << data.counts[i] << ',';
        if (data.has_weights)
          std::cout << data.weights[i];
        std::cout << ',' << data.particles[i].state << '\n';
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
