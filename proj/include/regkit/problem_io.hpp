#pragma once

#include "regkit/operators.hpp"
#include "regkit/problems.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace regkit {

/// A problem file: the forward problem plus, when it was generated, the spec.
struct ProblemFile {
  ForwardProblem problem;
  std::optional<ProblemSpec> origin;
};

/// JSON document with fields kind, rows, cols, entries (row-major for dense
/// and symmetric kinds, the diagonal for the diagonal kind), exact_solution,
/// exact_data, null_dim and an optional "origin" block. Doubles are written
/// in shortest round-trip form, so load(save(p)) reproduces p bitwise.
std::string problem_to_json(const ProblemFile& file);
ProblemFile problem_from_json(const std::string& text);

void save_problem(const std::filesystem::path& path, const ProblemFile& file);
/// Loads and checks the forward-problem invariants.
ProblemFile load_problem(const std::filesystem::path& path);

}  // namespace regkit
