#include "regkit/problem_io.hpp"

#include "regkit/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <vector>

namespace regkit {

namespace {

using nlohmann::json;

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array())
    throw PreconditionError(std::string("problem file: missing array field '") + field + "'");
  const auto values = j.at(field).get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

const char* kind_name(LinearOperator::Kind kind) {
  switch (kind) {
    case LinearOperator::Kind::Dense:
      return "dense";
    case LinearOperator::Kind::Diagonal:
      return "diagonal";
    case LinearOperator::Kind::Symmetric:
      return "symmetric";
  }
  return "dense";
}

}  // namespace

std::string problem_to_json(const ProblemFile& file) {
  const ForwardProblem& p = file.problem;
  json j;
  j["kind"] = kind_name(p.op.kind());
  j["rows"] = p.op.rows();
  j["cols"] = p.op.cols();
  if (p.op.kind() == LinearOperator::Kind::Diagonal) {
    j["entries"] = to_std(p.op.diagonal_entries());
  } else {
    const Matrix& m = p.op.matrix();
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index k = 0; k < m.cols(); ++k) entries.push_back(m(i, k));
    j["entries"] = std::move(entries);
  }
  j["exact_solution"] = to_std(p.exact_solution);
  j["exact_data"] = to_std(p.exact_data);
  j["null_dim"] = p.null_dim;
  if (file.origin) {
    const ProblemSpec& s = *file.origin;
    json o;
    o["family"] = to_string(s.family);
    o["size"] = s.size;
    o["p"] = s.power_p;
    o["seed"] = s.seed;
    o["sigma"] = s.sigma;
    if (s.source_gamma) o["source_gamma"] = *s.source_gamma;
    j["origin"] = std::move(o);
  }
  return j.dump(1);
}

ProblemFile problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("problem file is not valid JSON: ") + e.what());
  }
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const Vector entries = to_vector(j, "entries");

    std::optional<LinearOperator> op;
    if (kind == "diagonal") {
      if (rows != cols || entries.size() != rows)
        throw DimensionError("diagonal problem needs rows = cols = number of entries");
      op = LinearOperator::diagonal(entries);
    } else if (kind == "dense" || kind == "symmetric") {
      if (entries.size() != rows * cols)
        throw DimensionError("dense problem needs rows·cols entries");
      Matrix m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          entries.data(), rows, cols);
      op = kind == "dense" ? LinearOperator::dense(std::move(m)) : LinearOperator::symmetric(std::move(m));
    } else {
      throw PreconditionError("problem file: unknown operator kind '" + kind + "'");
    }

    ProblemFile out{ForwardProblem{std::move(*op), to_vector(j, "exact_solution"),
                                   to_vector(j, "exact_data"), j.at("null_dim").get<Eigen::Index>()},
                    std::nullopt};
    if (out.problem.exact_solution.size() != cols || out.problem.exact_data.size() != rows)
      throw DimensionError("problem file: solution/data lengths do not match the operator");
    if (j.contains("origin")) {
      const json& o = j.at("origin");
      ProblemSpec s;
      s.family = parse_family(o.at("family").get<std::string>());
      s.size = o.at("size").get<Eigen::Index>();
      s.power_p = o.value("p", 1.0);
      s.seed = o.value("seed", std::uint64_t{0});
      s.sigma = o.value("sigma", 0.1);
      if (o.contains("source_gamma")) s.source_gamma = o.at("source_gamma").get<double>();
      out.origin = s;
    }
    return out;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("problem file: ") + e.what());
  }
}

void save_problem(const std::filesystem::path& path, const ProblemFile& file) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << problem_to_json(file) << '\n';
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ProblemFile file = problem_from_json(buf.str());
  check_problem(file.problem);
  return file;
}

}  // namespace regkit
