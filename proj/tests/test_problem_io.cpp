#include "regkit/errors.hpp"
#include "regkit/problem_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace regkit;

namespace {

void expect_bitwise_equal(const ForwardProblem& a, const ForwardProblem& b) {
  EXPECT_EQ(a.op.kind(), b.op.kind());
  EXPECT_EQ(a.op.to_dense(), b.op.to_dense());
  EXPECT_EQ(a.exact_solution, b.exact_solution);
  EXPECT_EQ(a.exact_data, b.exact_data);
  EXPECT_EQ(a.null_dim, b.null_dim);
}

}  // namespace

TEST(ProblemIo, RoundTripEveryFamilyBitwise) {
  for (Family f : {Family::DiagonalPower, Family::Hilbert, Family::FredholmGauss,
                   Family::CounterexampleT8}) {
    ProblemSpec s;
    s.family = f;
    s.size = 8;
    s.seed = 4;
    const ProblemFile file{generate(s), s};
    const ProblemFile back = problem_from_json(problem_to_json(file));
    expect_bitwise_equal(file.problem, back.problem);
    ASSERT_TRUE(back.origin.has_value());
    EXPECT_EQ(back.origin->family, f);
    EXPECT_EQ(back.origin->seed, 4u);
  }
}

TEST(ProblemIo, DenseRowMajorLayout) {
  const auto op = LinearOperator::dense((Matrix(2, 3) << 1, 2, 3, 4, 5, 6).finished());
  const Vector y = (Vector(3) << 1, 0, 0).finished();
  const ProblemFile file{ForwardProblem{op, y, op.apply(y), 0}, std::nullopt};
  const std::string text = problem_to_json(file);
  EXPECT_NE(text.find("\"kind\": \"dense\""), std::string::npos);
  const ProblemFile back = problem_from_json(text);
  EXPECT_EQ(back.problem.op.matrix()(0, 2), 3.0);
  EXPECT_EQ(back.problem.op.matrix()(1, 0), 4.0);
  EXPECT_FALSE(back.origin.has_value());
}

TEST(ProblemIo, SaveLoadChecksInvariants) {
  const auto dir = std::filesystem::temp_directory_path() / "regkit_io_test";
  std::filesystem::create_directories(dir);
  ProblemSpec s;
  s.family = Family::Hilbert;
  s.size = 8;
  ProblemFile file{generate(s), s};
  save_problem(dir / "h8.json", file);
  expect_bitwise_equal(load_problem(dir / "h8.json").problem, file.problem);

  file.problem.exact_data(0) += 1e-3;
  save_problem(dir / "bad.json", file);
  EXPECT_THROW(load_problem(dir / "bad.json"), InconsistentDataError);
  EXPECT_THROW(load_problem(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}

TEST(ProblemIo, MalformedDocuments) {
  EXPECT_THROW(problem_from_json("{"), PreconditionError);
  EXPECT_THROW(problem_from_json(R"({"kind":"banded","rows":1,"cols":1,"entries":[1],
    "exact_solution":[1],"exact_data":[1],"null_dim":0})"),
               PreconditionError);
  EXPECT_THROW(problem_from_json(R"({"kind":"dense","rows":2,"cols":2,"entries":[1,2,3],
    "exact_solution":[1,1],"exact_data":[1,1],"null_dim":0})"),
               DimensionError);
  EXPECT_THROW(problem_from_json(R"({"kind":"symmetric","rows":2,"cols":2,"entries":[1,2,3,4],
    "exact_solution":[1,1],"exact_data":[3,7],"null_dim":0})"),
               PreconditionError);
}
