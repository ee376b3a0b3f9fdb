#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "detpf/bench.hpp"

using namespace detpf;

TEST_CASE("scenario_generate shapes") {
  auto single = scenario_generate(ScenarioKind::SingleSurvivor, 8, 1);
  CHECK(single.counts.vec() == std::vector<long long>{8, 0, 0, 0, 0, 0, 0, 0});

  auto uniform = scenario_generate(ScenarioKind::Uniform, 8, 1);
  CHECK(uniform.counts.vec() == std::vector<long long>{1, 1, 1, 1, 1, 1, 1, 1});

  auto random = scenario_generate(ScenarioKind::RandomWeights, 64, 3);
  REQUIRE(random.has_weights);
  double sum = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(random.weights[i] >= 0.0);
    sum += random.weights[i];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  long long csum = 0;
  for (std::size_t i = 0; i < 64; ++i) csum += random.counts[i];
  CHECK(csum == 64);

  auto skew = scenario_generate(ScenarioKind::SkewedWeights, 64, 3);
  long long mx = 0;
  for (std::size_t i = 0; i < 64; ++i) mx = std::max(mx, skew.counts[i]);
  CHECK(mx >= 4);  // heavy tail concentrates copies

  // reproducible per seed
  auto again = scenario_generate(ScenarioKind::RandomWeights, 64, 3);
  CHECK(again.weights == random.weights);
}

TEST_CASE("verify_sweep is clean on small sizes") {
  VerifyOptions opt;
  opt.sizes = {8, 64};
  opt.trials = 50;
  opt.seed = 7;
  opt.workers = 4;
  auto report = verify_sweep(opt);
  CHECK(report.trials == 100);
  CHECK(report.mismatches == 0);
  CHECK(report.conservation_failures == 0);
}

TEST_CASE("bench rows carry deterministic counts and the csv schema") {
  BenchOptions opt;
  opt.sizes = {256};
  opt.workers = {1, 2};
  opt.variants = {Variant::Atz, Variant::Nested, Variant::Naive};
  opt.scenarios = {ScenarioKind::RandomWeights, ScenarioKind::SingleSurvivor};
  opt.iterations = 2;
  auto rows = bench_redistribute(opt);
  REQUIRE(rows.size() == 2 * 1 * 2 * 3);

  for (const auto& r : rows) {
    CHECK(r.pps > 0.0);
    if (r.variant != "naive") CHECK(r.supersteps > 0);
  }

  std::ostringstream os;
  bench_to_csv(rows, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("#schema=1\n", 0) == 0);
  CHECK(csv.find("scenario,variant,n,p,iterations,pps,supersteps,moved,max_load,wall_seconds") !=
        std::string::npos);
  CHECK(csv.find("single-survivor,naive") != std::string::npos);

  // identical counts cells across the two scenarios for atz (data independence)
  std::size_t atz_steps = 0;
  bool seen = false;
  for (const auto& r : rows) {
    if (r.variant != "atz") continue;
    if (!seen) {
      atz_steps = r.supersteps;
      seen = true;
    } else {
      CHECK(r.supersteps == atz_steps);
    }
  }
}

TEST_CASE("speedup report emits ratios and flags missing cells") {
  BenchOptions opt;
  opt.sizes = {64, 256};
  opt.workers = {1, 2};
  opt.variants = {Variant::Atz, Variant::Nested};
  opt.scenarios = {ScenarioKind::Uniform};
  opt.iterations = 1;
  auto rows = bench_redistribute(opt);

  std::ostringstream os;
  speedup_report(rows, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("#schema=1\n", 0) == 0);
  CHECK(csv.find("speedup,uniform,atz-vs-nested,64,1,") != std::string::npos);
  CHECK(csv.find("scaling,uniform,atz,256,2,") != std::string::npos);

  // scaling at P=1 is 1 by definition
  std::istringstream is(csv);
  std::string line;
  bool saw_scaling_p1 = false;
  while (std::getline(is, line)) {
    if (line.rfind("scaling,", 0) == 0 && line.find(",1,1,") == std::string::npos) {
      // parse: kind,scenario,variant,n,p,ratio,
      std::istringstream row(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      if (cells.size() >= 6 && cells[4] == "1") {
        saw_scaling_p1 = true;
        CHECK(std::stod(cells[5]) == doctest::Approx(1.0));
      }
    }
  }
  CHECK(saw_scaling_p1);

  // dropping the nested rows breaks the speedup section
  std::vector<BenchRow> partial;
  for (const auto& r : rows)
    if (r.variant == "atz") partial.push_back(r);
  std::ostringstream os2;
  CHECK_THROWS_AS(speedup_report(partial, os2), std::invalid_argument);
}

TEST_CASE("count-based speedup column exceeds one and grows with N") {
  BenchOptions opt;
  opt.sizes = {64, 1024};
  opt.workers = {1};
  opt.variants = {Variant::Atz, Variant::Nested};
  opt.scenarios = {ScenarioKind::RandomWeights};
  opt.iterations = 1;
  auto rows = bench_redistribute(opt);

  double ratio_small = 0.0, ratio_large = 0.0;
  std::size_t atz_small = 0, nested_small = 0, atz_large = 0, nested_large = 0;
  for (const auto& r : rows) {
    if (r.n == 64 && r.variant == "atz") atz_small = r.supersteps;
    if (r.n == 64 && r.variant == "nested") nested_small = r.supersteps;
    if (r.n == 1024 && r.variant == "atz") atz_large = r.supersteps;
    if (r.n == 1024 && r.variant == "nested") nested_large = r.supersteps;
  }
  ratio_small = static_cast<double>(nested_small) / static_cast<double>(atz_small);
  ratio_large = static_cast<double>(nested_large) / static_cast<double>(atz_large);
  CHECK(ratio_small > 1.0);
  CHECK(ratio_large > ratio_small);
}
