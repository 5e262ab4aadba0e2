#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bsf/runtime.hpp"

// Reference iterative programs expressed against the skeleton: a Jacobi
// linear-system solver, least-squares gradient descent, and a synthetic
// self-timed payload for calibration experiments. Both numerical payloads
// reduce partials in worker-rank order over fixed slice boundaries, so
// their iterates are K-independent to at least 1e-12 componentwise.

namespace bsf {

/// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double& operator()(std::size_t r, std::size_t c) {
    return values[r * cols + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values[r * cols + c];
  }
};

DenseMatrix identity_matrix(std::size_t n);

/// Square system Ax = b with a starting iterate.
struct LinearSystem {
  DenseMatrix a;
  std::vector<double> b;
  std::vector<double> x0;
};

/// min_x ||Ax - b||^2 with a fixed gradient-descent step.
struct LeastSquaresProblem {
  DenseMatrix a;
  std::vector<double> b;
  double step_size = 1.0;
  std::vector<double> x0;
};

// ---- Jacobi ----

struct JacobiState {
  std::vector<double> x;
  double residual_inf = 0.0;  // ||Ax - b||_inf at this iterate
};

struct JacobiPartial {
  std::size_t offset = 0;
  std::vector<double> values;
};

using JacobiProgram =
    BsfProgram<JacobiState, std::vector<double>, JacobiPartial, JacobiState>;

/// Each worker recomputes the x components of its row slice from the
/// broadcast iterate; the master assembles the new iterate and its
/// residual norm. Exit: ||Ax - b||_inf < tol.
/// Construction throws std::invalid_argument on a zero diagonal entry,
/// a non strictly diagonally dominant matrix, or mismatched shapes.
JacobiProgram jacobi_program(LinearSystem sys, double tol);

// ---- Least-squares gradient descent ----

struct GdState {
  std::vector<double> x;
  double grad_norm = 0.0;  // ||A^T (Ax - b)||_2 at this iterate
};

using GdProgram =
    BsfProgram<GdState, std::vector<double>, std::vector<double>, GdState>;

/// Workers compute partial gradients over row slices; the master sums them
/// in rank order and takes the step (only while the gradient norm is still
/// at or above tol, so the converged iterate is left in place).
/// Exit: ||grad||_2 < tol. Throws std::invalid_argument on shape mismatch
/// or a non-positive step size.
GdProgram gradient_descent_program(LeastSquaresProblem problem, double tol);

/// Largest eigenvalue of A^T A estimated by seeded power iteration.
/// Returns 0 for an all-zero matrix.
double estimate_lambda_max(const DenseMatrix& a, int iterations = 300,
                           std::uint64_t seed = 17);

/// Safe constructor: picks step_size = 0.95 / lambda_max_estimate, which
/// satisfies the descent condition step < 2 / lambda_max with margin.
/// An empty x0 becomes the zero vector.
LeastSquaresProblem make_least_squares(DenseMatrix a, std::vector<double> b,
                                       std::vector<double> x0 = {},
                                       std::uint64_t seed = 17);

// ---- Synthetic calibration payload ----

struct SyntheticSpec {
  double compute_ms = 0.0;       // total busy-spin per iteration, split over workers
  std::size_t order_bytes = 0;   // wire size of one broadcast order
  std::size_t result_bytes = 0;  // wire size of all results combined
  long long iterations = 1;      // fixed iteration count
};

struct SyntheticOrder {
  long long iteration = 0;
  std::vector<std::uint8_t> padding;
};

struct SyntheticPartial {
  double spun_s = 0.0;
  std::vector<std::uint8_t> payload;
};

using SyntheticProgram =
    BsfProgram<long long, SyntheticOrder, SyntheticPartial, long long>;

/// Busy-spins compute_ms scaled by each worker's share of the items, pads
/// orders to order_bytes and splits result_bytes over the workers so the
/// per-iteration totals match the spec exactly, and stops after the fixed
/// iteration count. Wire-size hooks are pre-wired for calibration.
SyntheticProgram synthetic_program(const SyntheticSpec& spec);

// ---- Generators and dense helpers ----

/// Random system with off-diagonal entries in [-1, 1] and each diagonal
/// entry exceeding twice its off-diagonal row sum: strictly diagonally
/// dominant with a Jacobi contraction factor below one half. x0 is zero.
LinearSystem make_diagonally_dominant_system(std::size_t n,
                                             std::uint64_t seed);

/// ||Ax - b||_inf
double residual_inf_norm(const DenseMatrix& a, const std::vector<double>& x,
                         const std::vector<double>& b);

/// A^T (Ax - b), the least-squares gradient up to a factor of 2.
std::vector<double> least_squares_gradient(const DenseMatrix& a,
                                           const std::vector<double>& x,
                                           const std::vector<double>& b);

/// ||Ax - b||^2
double least_squares_objective(const DenseMatrix& a,
                               const std::vector<double>& x,
                               const std::vector<double>& b);

}  // namespace bsf
