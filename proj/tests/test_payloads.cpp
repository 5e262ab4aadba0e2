#include "bsf/payloads.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "bsf/runtime.hpp"
#include "test_support.hpp"

using namespace bsf;
using testsupport::max_abs_diff;
using testsupport::record_states;
using testsupport::solve_dense;

TEST_CASE("Jacobi on the identity hits the solution in one iteration") {
  LinearSystem sys;
  sys.a = identity_matrix(5);
  sys.b = {3.0, -1.5, 0.25, 9.0, -2.0};
  sys.x0.assign(5, 0.0);
  auto program = jacobi_program(sys, 1e-10);
  auto r = run_bsf(program, 1);
  CHECK(r.outcome == RunOutcome::converged);
  CHECK(r.iterations == 1);
  CHECK(max_abs_diff(r.output.x, sys.b) == 0.0);
}

TEST_CASE("Jacobi solves the worked 2x2 system") {
  LinearSystem sys;
  sys.a.rows = 2;
  sys.a.cols = 2;
  sys.a.values = {4.0, 1.0, 2.0, 5.0};
  sys.b = {9.0, 12.0};
  sys.x0.assign(2, 0.0);

  auto r = run_bsf(jacobi_program(sys, 1e-10), 2);
  CHECK(r.outcome == RunOutcome::converged);
  const auto oracle = solve_dense(sys.a, sys.b);
  CHECK(std::abs(oracle[0] - 33.0 / 18.0) < 1e-14);
  CHECK(std::abs(oracle[1] - 30.0 / 18.0) < 1e-14);
  CHECK(max_abs_diff(r.output.x, oracle) < 1e-9);
  CHECK(r.output.residual_inf < 1e-10);
}

TEST_CASE("Jacobi converges to the direct solve on a seeded 64x64 system") {
  LinearSystem sys = make_diagonally_dominant_system(64, 42);
  auto program = jacobi_program(sys, 1e-11);
  std::vector<JacobiState> states;
  record_states(program, states);
  auto r = run_bsf(program, 1);
  CHECK(r.outcome == RunOutcome::converged);

  const auto oracle = solve_dense(sys.a, sys.b);
  CHECK(max_abs_diff(r.output.x, oracle) < 1e-8);

  // Residual strictly decreases until convergence.
  REQUIRE(states.size() >= 3);
  for (std::size_t i = 1; i < states.size(); ++i) {
    CHECK(states[i].residual_inf < states[i - 1].residual_inf);
  }
}

TEST_CASE("Jacobi iterates do not depend on the worker count") {
  LinearSystem sys = make_diagonally_dominant_system(64, 7);
  std::vector<std::vector<JacobiState>> runs;
  for (int k : {1, 2, 4, 8}) {
    auto program = jacobi_program(sys, 1e-10);
    std::vector<JacobiState> states;
    record_states(program, states);
    auto r = run_bsf(program, k);
    CHECK(r.outcome == RunOutcome::converged);
    runs.push_back(std::move(states));
  }
  for (std::size_t k = 1; k < runs.size(); ++k) {
    REQUIRE(runs[k].size() == runs[0].size());
    for (std::size_t i = 0; i < runs[k].size(); ++i) {
      CHECK(max_abs_diff(runs[k][i].x, runs[0][i].x) <= 1e-12);
    }
  }
}

TEST_CASE("Jacobi construction rejects unusable systems") {
  LinearSystem sys;
  sys.a.rows = 2;
  sys.a.cols = 2;
  sys.a.values = {0.0, 1.0, 2.0, 5.0};
  sys.b = {1.0, 2.0};
  CHECK_THROWS_WITH_AS(jacobi_program(sys, 1e-8),
                       doctest::Contains("zero diagonal"),
                       std::invalid_argument);

  sys.a.values = {1.0, 3.0, 2.0, 5.0};
  CHECK_THROWS_WITH_AS(jacobi_program(sys, 1e-8),
                       doctest::Contains("dominant"), std::invalid_argument);

  sys.a.values = {4.0, 1.0, 2.0, 5.0};
  sys.b = {1.0};
  CHECK_THROWS_AS(jacobi_program(sys, 1e-8), std::invalid_argument);

  sys.b = {1.0, 2.0};
  CHECK_THROWS_AS(jacobi_program(sys, 0.0), std::invalid_argument);

  LinearSystem rect;
  rect.a.rows = 2;
  rect.a.cols = 3;
  rect.a.values.assign(6, 1.0);
  rect.b = {1.0, 2.0};
  CHECK_THROWS_AS(jacobi_program(rect, 1e-8), std::invalid_argument);
}

TEST_CASE("gradient descent on the identity recovers the target") {
  DenseMatrix a = identity_matrix(8);
  std::vector<double> b = {1.0, -2.0, 3.0, -4.0, 5.0, -6.0, 7.0, -8.0};
  auto problem = make_least_squares(a, b);
  auto r = run_bsf(gradient_descent_program(problem, 1e-9), 2);
  CHECK(r.outcome == RunOutcome::converged);
  // For A = I the gradient at x is x - b, so the exit bound transfers.
  CHECK(max_abs_diff(r.output.x, b) < 1e-8);
}

TEST_CASE("gradient descent converged at init runs zero iterations") {
  DenseMatrix a = identity_matrix(4);
  std::vector<double> b = {1.0, 2.0, 3.0, 4.0};
  auto problem = make_least_squares(a, b, b);
  auto r = run_bsf(gradient_descent_program(problem, 1e-9), 3);
  CHECK(r.iterations == 0);
  CHECK(r.outcome == RunOutcome::converged);
  CHECK(max_abs_diff(r.output.x, b) == 0.0);
}

TEST_CASE("gradient descent never increases the objective") {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  DenseMatrix a;
  a.rows = 12;
  a.cols = 5;
  a.values.resize(60);
  for (double& v : a.values) v = entry(rng);
  std::vector<double> b(12);
  for (double& v : b) v = entry(rng);

  auto problem = make_least_squares(a, b);
  auto program = gradient_descent_program(problem, 1e-7);
  std::vector<GdState> states;
  record_states(program, states);
  RunOptions opts;
  opts.max_iterations = 20000;
  auto r = run_bsf(program, 2, opts);
  CHECK(r.outcome == RunOutcome::converged);
  REQUIRE(states.size() >= 2);
  double prev = least_squares_objective(a, states[0].x, b);
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double cur = least_squares_objective(a, states[i].x, b);
    CHECK(cur <= prev + 1e-12 * std::max(1.0, prev));
    prev = cur;
  }
}

TEST_CASE("gradient descent iterates do not depend on the worker count") {
  std::mt19937_64 rng(20240902);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  DenseMatrix a;
  a.rows = 32;
  a.cols = 8;
  a.values.resize(256);
  for (double& v : a.values) v = entry(rng);
  std::vector<double> b(32);
  for (double& v : b) v = entry(rng);
  auto problem = make_least_squares(a, b);

  std::vector<std::vector<GdState>> runs;
  for (int k : {1, 2, 4, 8}) {
    auto program = gradient_descent_program(problem, 1e-8);
    std::vector<GdState> states;
    record_states(program, states);
    RunOptions opts;
    opts.max_iterations = 50000;
    auto r = run_bsf(program, k, opts);
    CHECK(r.outcome == RunOutcome::converged);
    runs.push_back(std::move(states));
  }
  for (std::size_t k = 1; k < runs.size(); ++k) {
    REQUIRE(runs[k].size() == runs[0].size());
    for (std::size_t i = 0; i < runs[k].size(); ++i) {
      CHECK(max_abs_diff(runs[k][i].x, runs[0][i].x) <= 1e-12);
    }
  }
}

TEST_CASE("gradient descent construction rejects bad problems") {
  LeastSquaresProblem p;
  p.a = identity_matrix(3);
  p.b = {1.0, 2.0};  // wrong length
  p.step_size = 0.5;
  CHECK_THROWS_AS(gradient_descent_program(p, 1e-8), std::invalid_argument);

  p.b = {1.0, 2.0, 3.0};
  p.step_size = 0.0;
  CHECK_THROWS_AS(gradient_descent_program(p, 1e-8), std::invalid_argument);

  p.step_size = 0.5;
  CHECK_THROWS_AS(gradient_descent_program(p, -1.0), std::invalid_argument);
  CHECK_NOTHROW(gradient_descent_program(p, 1e-8));
}

TEST_CASE("power iteration estimates the top eigenvalue of A^T A") {
  CHECK(std::abs(estimate_lambda_max(identity_matrix(6)) - 1.0) < 1e-9);

  DenseMatrix d;
  d.rows = 2;
  d.cols = 2;
  d.values = {3.0, 0.0, 0.0, 1.0};
  CHECK(std::abs(estimate_lambda_max(d) - 9.0) < 1e-6);

  DenseMatrix z;
  z.rows = 3;
  z.cols = 3;
  z.values.assign(9, 0.0);
  CHECK(estimate_lambda_max(z) == 0.0);
}

TEST_CASE("the safe step size sits below the descent threshold") {
  DenseMatrix d;
  d.rows = 3;
  d.cols = 3;
  d.values = {5.0, 0, 0, 0, 2.0, 0, 0, 0, 1.0};
  std::vector<double> b = {1.0, 1.0, 1.0};
  auto p = make_least_squares(d, b);
  // lambda_max(A^T A) = 25 exactly for this diagonal matrix.
  CHECK(p.step_size * 25.0 < 2.0);
  CHECK(p.step_size > 0.0);
  CHECK(p.x0 == std::vector<double>(3, 0.0));
}

TEST_CASE("synthetic payload runs its fixed iteration count") {
  SyntheticSpec spec;
  spec.iterations = 3;
  auto r = run_bsf(synthetic_program(spec), 2);
  CHECK(r.outcome == RunOutcome::converged);
  CHECK(r.iterations == 3);
  CHECK(r.output == 3);

  spec.iterations = 0;
  auto zero = run_bsf(synthetic_program(spec), 2);
  CHECK(zero.iterations == 0);
}

TEST_CASE("synthetic wire sizes are honored exactly for any worker count") {
  SyntheticSpec spec;
  spec.iterations = 2;
  spec.order_bytes = 4096;
  spec.result_bytes = 10001;  // odd on purpose: must still split exactly
  for (int k : {1, 3, 4, 7}) {
    auto r = run_bsf(synthetic_program(spec), k);
    REQUIRE(r.timing.size() == 2);
    for (const auto& t : r.timing) {
      CHECK(t.order_bytes == 4096);
      CHECK(t.result_bytes == 10001);
    }
  }
}

TEST_CASE("synthetic compute time is self-timed") {
  SyntheticSpec spec;
  spec.iterations = 1;
  spec.compute_ms = 20.0;
  auto r = run_bsf(synthetic_program(spec), 1);
  REQUIRE(r.timing.size() == 1);
  CHECK(r.timing[0].compute_max_s >= 0.018);
  CHECK(r.timing[0].compute_max_s <= 0.1);

  SyntheticSpec bad;
  bad.compute_ms = -1.0;
  CHECK_THROWS_AS(synthetic_program(bad), std::invalid_argument);
  SyntheticSpec neg;
  neg.iterations = -1;
  CHECK_THROWS_AS(synthetic_program(neg), std::invalid_argument);
}

TEST_CASE("the random dominant-system generator is reproducible") {
  LinearSystem a = make_diagonally_dominant_system(16, 5);
  LinearSystem b = make_diagonally_dominant_system(16, 5);
  CHECK(a.a.values == b.a.values);
  CHECK(a.b == b.b);

  LinearSystem c = make_diagonally_dominant_system(16, 6);
  CHECK(a.a.values != c.a.values);

  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    LinearSystem sys = make_diagonally_dominant_system(24, seed);
    for (std::size_t r = 0; r < 24; ++r) {
      double off = 0.0;
      for (std::size_t col = 0; col < 24; ++col) {
        if (col != r) off += std::abs(sys.a(r, col));
      }
      CHECK(std::abs(sys.a(r, r)) > off);
    }
  }
  CHECK_THROWS_AS(make_diagonally_dominant_system(0, 1),
                  std::invalid_argument);
}
