// regkit: command-line harness for the regularization library.
//
//   regkit generate --family hilbert --size 8 --out h8.json
//   regkit solve --problem h8.json --method tikhonov_discrepancy --delta 1e-3
//   regkit rates --config sweep.json --out rates.csv
//   regkit counterexample --C 1.5 --deltas 1e-1,1e-2,1e-3,1e-4
//   regkit compare --problem h8.json --delta 1e-3

#include "regkit/errors.hpp"
#include "regkit/experiment.hpp"
#include "regkit/problem_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace regkit;

struct SolveFlags {
  std::string problem;
  std::string method = "tikhonov_discrepancy";
  double delta = 1e-3;
  std::uint64_t seed = 1;
  double C = 1.5;
  double b = 0.5;
  double gamma = 0.5;
  double mu = 0.75;
  double apriori_gamma = 0.5;
  std::vector<double> schedule{1.0, 1.0, 0.75};
  std::optional<double> a;
  std::optional<double> t;
  long n_max = 10000;
};

MethodParams to_params(const SolveFlags& f) {
  MethodParams p;
  p.apriori_gamma = f.apriori_gamma;
  p.discrepancy.C = f.C;
  p.discrepancy.b_slack = f.b;
  p.dsm1_gamma = f.gamma;
  p.dsm1_mu = f.mu;
  if (f.schedule.size() != 3) throw PreconditionError("--schedule expects c0,c1,b");
  p.schedule_c0 = f.schedule[0];
  p.schedule_c1 = f.schedule[1];
  p.schedule_b = f.schedule[2];
  p.iterate_a = f.a;
  p.a_override = f.a;
  p.t_override = f.t;
  p.iterate_n_max = f.n_max;
  return p;
}

void add_method_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--problem", f.problem, "Problem file (JSON)")->required();
  cmd->add_option("--delta", f.delta, "Noise level δ ≥ 0");
  cmd->add_option("--seed", f.seed, "Noise seed");
  cmd->add_option("--C", f.C, "Discrepancy constant, 1 < C < 2");
  cmd->add_option("--b", f.b, "Certificate slack b, C² > 1 + b");
  cmd->add_option("--gamma", f.gamma, "dsm1: a = δ^γ");
  cmd->add_option("--mu", f.mu, "dsm1: t = δ^{−μ}");
  cmd->add_option("--apriori-gamma", f.apriori_gamma, "tikhonov_apriori: a = δ^γ");
  cmd->add_option("--schedule", f.schedule, "Power schedule c0,c1,b")->delimiter(',');
  cmd->add_option("--a", f.a, "Fixed a (iteration; flows with δ = 0)");
  cmd->add_option("--t", f.t, "Fixed stopping time for the flows");
  cmd->add_option("--n-max", f.n_max, "Iteration cap");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void print_report(std::ostream& out, const SolveReport& rep) {
  out << "method        " << rep.method << '\n';
  if (rep.stop_index) out << "n(δ)          " << *rep.stop_index << '\n';
  if (rep.stop_time) out << "t_δ           " << fmt(*rep.stop_time) << '\n';
  out << "a             " << fmt(rep.a_chosen) << '\n';
  out << "residual      " << fmt(rep.residual_norm) << '\n';
  if (rep.error_norm) out << "error vs y    " << fmt(*rep.error_norm) << '\n';
  out << "‖u‖           " << fmt(rep.solution.norm()) << '\n';
  if (rep.solution_imag) out << "‖Im u‖        " << fmt(rep.imag_norm()) << '\n';
  out << "F(u)          " << fmt(rep.f_value) << '\n';
  if (!rep.notice.empty()) out << "notice        " << rep.notice << '\n';
}

nlohmann::json report_record(const SolveReport& rep, double delta) {
  nlohmann::json j;
  j["method"] = rep.method;
  j["delta"] = delta;
  j["a"] = rep.a_chosen;
  j["param"] = rep.parameter();
  j["residual"] = rep.residual_norm;
  if (rep.error_norm) j["error"] = *rep.error_norm;
  if (rep.stop_time) j["t_stop"] = *rep.stop_time;
  if (rep.stop_index) j["n_stop"] = *rep.stop_index;
  j["f_value"] = rep.f_value;
  j["imag_norm"] = rep.imag_norm();
  if (!rep.notice.empty()) j["notice"] = rep.notice;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regkit: regularization methods for linear ill-posed problems"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a benchmark problem file");
  std::string family = "diagonal_power";
  ProblemSpec spec;
  std::optional<double> source_gamma;
  std::string gen_out;
  gen->add_option("--family", family,
                  "diagonal_power | hilbert | fredholm_gauss | counterexample_t8");
  gen->add_option("--size", spec.size, "Dimension n");
  gen->add_option("--p", spec.power_p, "diagonal_power exponent: d_k = k^{-p}");
  gen->add_option("--source-gamma", source_gamma, "Source condition y = |A|^γ z");
  gen->add_option("--sigma", spec.sigma, "fredholm_gauss kernel width");
  gen->add_option("--seed", spec.seed, "RNG seed");
  gen->add_option("--out", gen_out, "Output path")->required();

  // solve / compare
  auto* solve = app.add_subcommand("solve", "Run one method on a problem file");
  SolveFlags solve_flags;
  add_method_flags(solve, solve_flags);
  solve->add_option("--method", solve_flags.method, "Method tag");
  std::string record_path;
  solve->add_option("--record", record_path, "Write the machine-readable record here");

  auto* compare = app.add_subcommand("compare", "Run every method on a problem file");
  SolveFlags cmp_flags;
  add_method_flags(compare, cmp_flags);

  // rates
  auto* rates = app.add_subcommand("rates", "δ-sweep with log-log rate fits");
  std::string config_path, csv_out, summary_out;
  rates->add_option("--config", config_path, "Experiment config (JSON)")->required();
  rates->add_option("--out", csv_out, "CSV output path (default: stdout)");
  rates->add_option("--summary", summary_out, "Summary JSON path (default: stderr)");

  // counterexample
  auto* cex = app.add_subcommand("counterexample", "Discrepancy-principle non-uniformity table");
  double cex_C = 1.5;
  std::vector<double> cex_deltas{1e-1, 1e-2, 1e-3, 1e-4};
  long cex_terms = 1000000;
  cex->add_option("--C", cex_C, "Discrepancy constant, 1 < C < 2");
  cex->add_option("--deltas", cex_deltas, "Comma-separated δ values")->delimiter(',');
  cex->add_option("--J", cex_terms, "Number of explicit series terms");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      spec.family = parse_family(family);
      spec.source_gamma = source_gamma;
      ProblemFile file{generate(spec), spec};
      save_problem(gen_out, file);
      std::cout << "wrote " << gen_out << " (" << to_string(spec.family) << ", n = " << spec.size
                << ", null_dim = " << file.problem.null_dim << ")\n";
      return 0;
    }

    if (solve->parsed()) {
      const Method method = parse_method(solve_flags.method);
      const ProblemFile file = load_problem(solve_flags.problem);
      const SpectralModel model = decompose(file.problem.op);
      const NoisyData noisy = add_noise(file.problem, solve_flags.delta, solve_flags.seed);
      const SolveReport rep = run_method(method, file.problem, model, noisy, to_params(solve_flags));
      print_report(std::cout, rep);
      const std::string record = report_record(rep, noisy.delta).dump();
      if (record_path.empty()) {
        std::cout << record << '\n';
      } else {
        std::ofstream(record_path) << record << '\n';
      }
      return 0;
    }

    if (compare->parsed()) {
      const ProblemFile file = load_problem(cmp_flags.problem);
      const SpectralModel model = decompose(file.problem.op);
      const NoisyData noisy = add_noise(file.problem, cmp_flags.delta, cmp_flags.seed);
      const MethodParams params = to_params(cmp_flags);
      bool ok = true;
      std::printf("%-22s %-16s %-16s %-16s %s\n", "method", "error", "residual", "param", "note");
      for (Method m : all_methods()) {
        try {
          const SolveReport rep = run_method(m, file.problem, model, noisy, params);
          std::printf("%-22s %-16s %-16s %-16s %s\n", to_string(m).c_str(),
                      fmt(rep.error_norm.value_or(NAN)).c_str(), fmt(rep.residual_norm).c_str(),
                      fmt(rep.parameter()).c_str(), rep.notice.c_str());
        } catch (const std::exception& e) {
          ok = false;
          std::printf("%-22s failed: %s\n", to_string(m).c_str(), e.what());
        }
      }
      return ok ? 0 : 1;
    }

    if (rates->parsed()) {
      const ExperimentConfig cfg = parse_experiment_config(read_file(config_path));
      const RateReport report = run_rates(cfg);
      if (csv_out.empty()) {
        write_rates_csv(std::cout, report);
      } else {
        std::ofstream out(csv_out);
        if (!out) throw Error("cannot open '" + csv_out + "' for writing");
        write_rates_csv(out, report);
      }
      const std::string summary = rates_summary_json(report);
      if (summary_out.empty())
        std::cerr << summary << '\n';
      else
        std::ofstream(summary_out) << summary << '\n';
      for (const auto& r : report.rows)
        if (!r.ok)
          std::cerr << "run failed: " << to_string(r.method) << " δ=" << r.delta << " rep=" << r.rep
                    << ": " << r.message << '\n';
      return report.all_ok() ? 0 : 1;
    }

    if (cex->parsed()) {
      const auto rows = counterexample_table(cex_C, cex_deltas, cex_terms);
      bool ok = true;
      std::cout << "delta,a,ratio,relative_residual\n";
      for (const auto& r : rows) {
        if (!r.ok) {
          ok = false;
          std::cerr << "δ = " << r.delta << ": " << r.message << '\n';
          std::cout << fmt(r.delta) << ",nan,nan,nan\n";
          continue;
        }
        std::cout << fmt(r.delta) << ',' << fmt(r.a) << ',' << fmt(r.ratio) << ','
                  << fmt(r.relative_residual) << '\n';
      }
      if (!rows.empty() && rows.back().ok)
        std::cout << "# ratio at smallest δ: " << fmt(rows.back().ratio)
                  << "  (limit 1/C = " << fmt(1.0 / cex_C) << ")\n";
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
