#include "regkit/errors.hpp"
#include "regkit/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace regkit;

namespace {

const char* kDsm1Config = R"({
  "problem": {"family": "diagonal_power", "size": 200, "p": 1, "source_gamma": 1, "seed": 3},
  "deltas": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
  "methods": ["dsm1"],
  "repetitions": 3,
  "base_seed": 10,
  "params": {"gamma": 0.5, "mu": 0.75}
})";

std::string csv_without_runtime(const RateReport& r) {
  std::ostringstream out;
  write_rates_csv(out, r);
  std::istringstream in(out.str());
  std::string line, kept;
  while (std::getline(in, line)) kept += line.substr(0, line.rfind(',')) + "\n";
  return kept;
}

}  // namespace

TEST(Methods, ParseRoundTrip) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(all_methods().size(), 9u);
  EXPECT_THROW(parse_method("landweber"), PreconditionError);
}

TEST(ExperimentConfig, ParsesAndValidates) {
  const ExperimentConfig cfg = parse_experiment_config(kDsm1Config);
  EXPECT_EQ(cfg.problem.family, Family::DiagonalPower);
  EXPECT_EQ(cfg.problem.size, 200);
  EXPECT_EQ(*cfg.problem.source_gamma, 1.0);
  EXPECT_EQ(cfg.deltas.size(), 5u);
  EXPECT_EQ(cfg.repetitions, 3);
  EXPECT_EQ(cfg.base_seed, 10u);
  EXPECT_EQ(cfg.methods, std::vector<Method>{Method::Dsm1});

  EXPECT_THROW(parse_experiment_config(R"({"problem":{"family":"hilbert"},"deltas":[1e-3,1e-2],
    "methods":["dsm1"]})"),
               PreconditionError);
  EXPECT_THROW(parse_experiment_config(R"({"problem":{"family":"hilbert"},"deltas":[1e-3],
    "methods":["dsm1"],"repetitions":0})"),
               PreconditionError);
  EXPECT_THROW(parse_experiment_config(R"({"deltas":[1e-3],"methods":["dsm1"]})"),
               PreconditionError);
}

TEST(Rates, Dsm1SlopeOnSourceConditionProblem) {
  const RateReport r = run_rates(parse_experiment_config(kDsm1Config), 2);
  EXPECT_TRUE(r.all_ok());
  EXPECT_EQ(r.rows.size(), 15u);
  const auto& s = r.summary.at("dsm1");
  ASSERT_TRUE(s.fit.has_value());
  EXPECT_NEAR(s.fit->slope, 0.5, 0.15);
  EXPECT_EQ(s.fit->points, 5);
}

TEST(Rates, DeterministicAcrossThreadCounts) {
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "problem": {"family": "hilbert", "size": 10, "seed": 1},
    "deltas": [1e-1, 1e-2, 1e-3, 1e-4],
    "methods": ["tikhonov_discrepancy", "dsm3", "iterate_min"],
    "repetitions": 3
  })");
  const RateReport one = run_rates(cfg, 1);
  const RateReport many = run_rates(cfg, 4);
  EXPECT_EQ(csv_without_runtime(one), csv_without_runtime(many));
  // Three rows per cell with distinct seeds.
  EXPECT_EQ(one.rows[0].seed + 1, one.rows[1].seed);
  EXPECT_NE(one.rows[0].error, one.rows[1].error);
  const auto& td = one.summary.at("tikhonov_discrepancy").mean_error;
  for (std::size_t i = 1; i < td.size(); ++i) EXPECT_LT(td[i], td[i - 1]);
}

TEST(Rates, CsvSchema) {
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "problem": {"family": "diagonal_power", "size": 20},
    "deltas": [1e-2, 1e-3],
    "methods": ["tikhonov_apriori"]
  })");
  std::ostringstream out;
  write_rates_csv(out, run_rates(cfg, 1));
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header, "method,delta,rep,error,residual,param,runtime_ms");
  std::getline(in, row);
  EXPECT_EQ(row.rfind("tikhonov_apriori,0.01,0,", 0), 0u);
  // Error column: 17 significant digits.
  const std::string err = row.substr(24, row.find(',', 24) - 24);
  std::size_t digits = 0;
  for (char c : err) digits += std::isdigit(static_cast<unsigned char>(c)) ? 1 : 0;
  EXPECT_GE(digits, 12u);
}

TEST(Rates, FailuresAreRecordedPerRow) {
  // Balance rule on a Hilbert problem has no crossing with n_max = 5.
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "problem": {"family": "hilbert", "size": 10},
    "deltas": [1e-4, 1e-5],
    "methods": ["iterate_balance", "tikhonov_discrepancy"],
    "params": {"n_max": 5}
  })");
  const RateReport r = run_rates(cfg, 2);
  EXPECT_FALSE(r.all_ok());
  EXPECT_FALSE(r.rows[0].ok);
  EXPECT_FALSE(r.rows[0].message.empty());
  EXPECT_TRUE(std::isnan(r.rows[0].error));
  EXPECT_TRUE(r.rows[2].ok);
  EXPECT_NE(rates_summary_json(r).find("failures"), std::string::npos);
}

TEST(SlopeFit, ExactPowerLaw) {
  const std::vector<double> d = {1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> e;
  for (double x : d) e.push_back(3.0 * std::pow(x, 0.7));
  const SlopeFit fit = fit_loglog_slope(d, e);
  EXPECT_NEAR(fit.slope, 0.7, 1e-12);
  EXPECT_NEAR(fit.std_error, 0.0, 1e-10);
  EXPECT_THROW(fit_loglog_slope({1e-1, 1e-2, 1e-3}, {1, 2, 3}), PreconditionError);
}

TEST(WorkerCount, HonorsEnvironmentCap) {
  setenv("REGKIT_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  unsetenv("REGKIT_THREADS");
  EXPECT_GE(worker_count(), 1u);
}

TEST(RunMethod, EveryMethodRunsWithDefaults) {
  ProblemSpec spec;
  spec.family = Family::DiagonalPower;
  spec.size = 50;
  spec.seed = 2;
  const ForwardProblem p = generate(spec);
  const SpectralModel m = decompose(p.op);
  const NoisyData noisy = add_noise(p, 1e-3, 1);
  for (Method method : all_methods()) {
    const SolveReport r = run_method(method, p, m, noisy, {});
    EXPECT_EQ(r.method, to_string(method));
    EXPECT_TRUE(r.error_norm.has_value());
    EXPECT_TRUE(std::isfinite(*r.error_norm));
  }
}

TEST(CounterexampleTable, RatiosAndLimit) {
  const auto rows = counterexample_table(1.5, {1e-1, 1e-2, 1e-3, 1e-4}, 1000000);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.ok);
    EXPECT_GT(r.ratio, 0.5);
  }
  EXPECT_NEAR(rows.back().ratio, 2.0 / 3.0, 0.05 * 2.0 / 3.0);
}
