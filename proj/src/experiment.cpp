#include "regkit/experiment.hpp"

#include "regkit/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

namespace regkit {

namespace {

constexpr std::array<std::pair<Method, const char*>, 9> kMethods = {{
    {Method::TikhonovApriori, "tikhonov_apriori"},
    {Method::TikhonovDiscrepancy, "tikhonov_discrepancy"},
    {Method::TikhonovRelaxed, "tikhonov_relaxed"},
    {Method::Dsm1, "dsm1"},
    {Method::Dsm2, "dsm2"},
    {Method::Dsm3, "dsm3"},
    {Method::DsmDiscrepancy, "dsm_discrepancy"},
    {Method::IterateMin, "iterate_min"},
    {Method::IterateBalance, "iterate_balance"},
}};

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(Method method) {
  for (const auto& [m, name] : kMethods)
    if (m == method) return name;
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethods)
    if (name == n) return m;
  std::string valid;
  for (const auto& [m, n] : kMethods) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw PreconditionError("unknown method '" + std::string(name) + "'; valid methods: " + valid);
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> v;
    for (const auto& entry : kMethods) v.push_back(entry.first);
    return v;
  }();
  return methods;
}

SolveReport run_method(Method method, const ForwardProblem& problem, const SpectralModel& model,
                       const NoisyData& noisy, const MethodParams& params) {
  const LinearOperator& op = problem.op;
  SolveReport rep;
  switch (method) {
    case Method::TikhonovApriori:
      rep = tikhonov(op, noisy, params.a_override.value_or(apriori_a(noisy.delta, params.apriori_gamma)));
      rep.method = to_string(method);
      break;
    case Method::TikhonovDiscrepancy:
      rep = discrepancy_solve(op, model, noisy, params.discrepancy);
      break;
    case Method::TikhonovRelaxed:
      if (noisy.delta == 0.0)
        rep = discrepancy_solve(op, model, noisy, params.discrepancy);
      else
        rep = relaxed_discrepancy(op, model, noisy, params.discrepancy,
                                  truncated_cg_inner_solver(op, noisy.data));
      break;
    case Method::Dsm1: {
      Dsm1Params p;
      p.gamma = params.dsm1_gamma;
      p.mu = params.dsm1_mu;
      p.a = params.a_override;
      p.t_stop = params.t_override;
      rep = dsm1_solve(problem, noisy, p);
      break;
    }
    case Method::Dsm2: {
      Dsm2Params p{params.schedule(), params.t_override};
      rep = dsm2_solve(problem, noisy, p);
      break;
    }
    case Method::Dsm3: {
      Dsm3Params p;
      p.schedule = params.schedule();
      p.t_stop = params.t_override;
      rep = dsm3_solve(problem, model, noisy, p);
      break;
    }
    case Method::DsmDiscrepancy: {
      Dsm3Params p;
      p.schedule = params.schedule();
      rep = dsm_discrepancy_stop(problem, model, noisy, p, params.discrepancy);
      break;
    }
    case Method::IterateMin:
    case Method::IterateBalance: {
      IterationParams p;
      p.a = params.iterate_a;
      p.n_max = params.iterate_n_max;
      p.rule = method == Method::IterateMin ? StoppingRule::Minimize : StoppingRule::Balance;
      rep = iterate_with_stopping(op, model, noisy, p, problem.exact_solution);
      break;
    }
  }
  rep.set_reference(problem.exact_solution);
  return rep;
}

void ExperimentConfig::validate() const {
  problem.validate();
  if (deltas.empty()) throw PreconditionError("experiment needs at least one δ");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw PreconditionError("experiment δ values must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw PreconditionError("experiment δ values must be strictly decreasing");
  }
  if (methods.empty()) throw PreconditionError("experiment needs at least one method");
  if (repetitions < 1) throw PreconditionError("repetitions must be at least 1");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  using nlohmann::json;
  ExperimentConfig cfg;
  try {
    const json j = json::parse(text);
    const json& p = j.at("problem");
    cfg.problem.family = parse_family(p.at("family").get<std::string>());
    cfg.problem.size = p.value("size", Eigen::Index{100});
    cfg.problem.power_p = p.value("p", 1.0);
    cfg.problem.seed = p.value("seed", std::uint64_t{0});
    cfg.problem.sigma = p.value("sigma", 0.1);
    if (p.contains("source_gamma")) cfg.problem.source_gamma = p.at("source_gamma").get<double>();

    cfg.deltas = j.at("deltas").get<std::vector<double>>();
    for (const auto& m : j.at("methods")) cfg.methods.push_back(parse_method(m.get<std::string>()));
    cfg.repetitions = j.value("repetitions", 1);
    cfg.base_seed = j.value("base_seed", std::uint64_t{1});

    if (j.contains("params")) {
      const json& q = j.at("params");
      MethodParams& mp = cfg.params;
      mp.apriori_gamma = q.value("apriori_gamma", mp.apriori_gamma);
      mp.discrepancy.C = q.value("C", mp.discrepancy.C);
      mp.discrepancy.b_slack = q.value("b", mp.discrepancy.b_slack);
      mp.discrepancy.root_tol = q.value("root_tol", mp.discrepancy.root_tol);
      mp.dsm1_gamma = q.value("gamma", mp.dsm1_gamma);
      mp.dsm1_mu = q.value("mu", mp.dsm1_mu);
      if (q.contains("schedule")) {
        const auto s = q.at("schedule").get<std::vector<double>>();
        if (s.size() != 3) throw PreconditionError("schedule needs three values c0, c1, b");
        mp.schedule_c0 = s[0];
        mp.schedule_c1 = s[1];
        mp.schedule_b = s[2];
      }
      if (q.contains("iterate_a")) mp.iterate_a = q.at("iterate_a").get<double>();
      mp.iterate_n_max = q.value("n_max", mp.iterate_n_max);
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("experiment config: ") + e.what());
  }
  cfg.params.discrepancy.validate();
  (void)cfg.params.schedule();
  cfg.validate();
  return cfg;
}

SlopeFit fit_loglog_slope(const std::vector<double>& deltas, const std::vector<double>& errors) {
  if (deltas.size() != errors.size()) throw DimensionError("slope fit: length mismatch");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] > 0.0 && errors[i] > 0.0 && std::isfinite(errors[i])) {
      x.push_back(std::log(deltas[i]));
      y.push_back(std::log(errors[i]));
    }
  }
  const auto n = static_cast<int>(x.size());
  if (n < 4) throw PreconditionError("slope fit needs at least 4 valid δ values");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.std_error = std::sqrt(rss / (n - 2) / sxx);
  return fit;
}

bool RateReport::all_ok() const {
  for (const auto& r : rows)
    if (!r.ok) return false;
  return true;
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("REGKIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

RateReport run_rates(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  const ForwardProblem problem = generate(cfg.problem);
  const SpectralModel model = decompose(problem.op);

  RateReport report;
  for (Method m : cfg.methods)
    for (double d : cfg.deltas)
      for (int r = 0; r < cfg.repetitions; ++r) {
        RateRow row;
        row.method = m;
        row.delta = d;
        row.rep = r;
        row.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
        report.rows.push_back(row);
      }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < report.rows.size(); i = next++) {
      RateRow& row = report.rows[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        const NoisyData noisy = add_noise(problem, row.delta, row.seed);
        const SolveReport rep = run_method(row.method, problem, model, noisy, cfg.params);
        row.error = rep.error_norm.value_or(std::numeric_limits<double>::quiet_NaN());
        row.residual = rep.residual_norm;
        row.param = rep.parameter();
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = row.residual = row.param = std::numeric_limits<double>::quiet_NaN();
        row.message = e.what();
      }
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads ? threads : worker_count(),
                                                             static_cast<unsigned>(report.rows.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (Method m : cfg.methods) {
    MethodSummary s;
    for (double d : cfg.deltas) {
      double e = 0.0, res = 0.0, par = 0.0;
      int count = 0;
      for (const auto& row : report.rows) {
        if (row.method != m || row.delta != d || !row.ok) continue;
        e += row.error;
        res += row.residual;
        par += row.param;
        ++count;
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.deltas.push_back(d);
      s.mean_error.push_back(count ? e / count : nan);
      s.mean_residual.push_back(count ? res / count : nan);
      s.mean_param.push_back(count ? par / count : nan);
    }
    try {
      s.fit = fit_loglog_slope(s.deltas, s.mean_error);
    } catch (const Error&) {
      s.fit.reset();
    }
    report.summary[to_string(m)] = std::move(s);
  }
  return report;
}

void write_rates_csv(std::ostream& out, const RateReport& report) {
  out << "method,delta,rep,error,residual,param,runtime_ms\n";
  for (const auto& r : report.rows) {
    out << to_string(r.method) << ',' << format_number(r.delta) << ',' << r.rep << ','
        << format_number(r.error) << ',' << format_number(r.residual) << ','
        << format_number(r.param) << ',' << format_number(r.runtime_ms) << '\n';
  }
}

std::string rates_summary_json(const RateReport& report) {
  nlohmann::json j;
  for (const auto& [name, s] : report.summary) {
    nlohmann::json m;
    m["deltas"] = s.deltas;
    m["mean_error"] = s.mean_error;
    m["mean_residual"] = s.mean_residual;
    m["mean_param"] = s.mean_param;
    if (s.fit) {
      m["slope"] = s.fit->slope;
      m["slope_std_error"] = s.fit->std_error;
      m["slope_points"] = s.fit->points;
    }
    j["methods"][name] = std::move(m);
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : report.rows)
    if (!r.ok)
      failures.push_back({{"method", to_string(r.method)}, {"delta", r.delta}, {"rep", r.rep},
                          {"message", r.message}});
  j["failures"] = std::move(failures);
  return j.dump(2);
}

std::vector<CounterexampleRow> counterexample_table(double C, const std::vector<double>& deltas,
                                                    long terms) {
  std::vector<CounterexampleRow> rows;
  for (double d : deltas) {
    CounterexampleRow row;
    row.delta = d;
    try {
      const CounterexampleResult r = counterexample_t8(terms, C, d);
      row.ok = true;
      row.a = r.a;
      row.ratio = r.ratio;
      row.relative_residual = r.relative_residual;
    } catch (const std::exception& e) {
      row.message = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace regkit
