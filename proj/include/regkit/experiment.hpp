#pragma once

#include "regkit/dsm.hpp"
#include "regkit/iterative.hpp"
#include "regkit/problems.hpp"
#include "regkit/report.hpp"
#include "regkit/spectral.hpp"
#include "regkit/variational.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regkit {

enum class Method {
  TikhonovApriori,
  TikhonovDiscrepancy,
  TikhonovRelaxed,
  Dsm1,
  Dsm2,
  Dsm3,
  DsmDiscrepancy,
  IterateMin,
  IterateBalance,
};

std::string to_string(Method method);
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

/// Per-method parameters. Defaults are runnable on any problem.
struct MethodParams {
  double apriori_gamma = 0.5;
  DiscrepancyConfig discrepancy;
  double dsm1_gamma = 0.5;
  double dsm1_mu = 0.75;
  double schedule_c0 = 1.0;
  double schedule_c1 = 1.0;
  double schedule_b = 0.75;
  std::optional<double> iterate_a;
  long iterate_n_max = 10000;
  /// Explicit a / stopping time, used for δ = 0 runs of the flows.
  std::optional<double> a_override;
  std::optional<double> t_override;

  Schedule schedule() const { return Schedule::power(schedule_c0, schedule_c1, schedule_b); }
};

/// Runs one method once; error_norm is filled from the problem's exact solution.
SolveReport run_method(Method method, const ForwardProblem& problem, const SpectralModel& model,
                       const NoisyData& noisy, const MethodParams& params);

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<double> deltas;  // strictly decreasing
  std::vector<Method> methods;
  MethodParams params;
  int repetitions = 1;
  std::uint64_t base_seed = 1;

  void validate() const;
};

/// Parses the JSON experiment configuration.
ExperimentConfig parse_experiment_config(const std::string& text);

struct RateRow {
  Method method;
  double delta = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double error = 0.0;
  double residual = 0.0;
  double param = 0.0;
  double runtime_ms = 0.0;
  std::string message;
};

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  int points = 0;
};

/// Least-squares fit of log(error) = c + slope·log(δ). Needs at least 4 points.
SlopeFit fit_loglog_slope(const std::vector<double>& deltas, const std::vector<double>& errors);

struct MethodSummary {
  std::vector<double> deltas;
  std::vector<double> mean_error;
  std::vector<double> mean_residual;
  std::vector<double> mean_param;
  std::optional<SlopeFit> fit;
};

struct RateReport {
  std::vector<RateRow> rows;  // config order: method, δ, repetition
  std::map<std::string, MethodSummary> summary;
  bool all_ok() const;
};

/// Worker count: REGKIT_THREADS if set, else hardware concurrency.
unsigned worker_count();

RateReport run_rates(const ExperimentConfig& cfg, unsigned threads = 0);

void write_rates_csv(std::ostream& out, const RateReport& report);
std::string rates_summary_json(const RateReport& report);

struct CounterexampleRow {
  double delta = 0.0;
  bool ok = false;
  double a = 0.0;
  double ratio = 0.0;
  double relative_residual = 0.0;
  std::string message;
};

std::vector<CounterexampleRow> counterexample_table(double C, const std::vector<double>& deltas,
                                                    long terms);

}  // namespace regkit
