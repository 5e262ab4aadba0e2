#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bsf/payloads.hpp"

// Shared helpers for payload and acceptance tests: an independent dense
// direct solver used as the convergence oracle, and an iterate recorder.

namespace testsupport {

/// Gaussian elimination with partial pivoting; throws on singular input.
inline std::vector<double> solve_dense(bsf::DenseMatrix a,
                                       std::vector<double> b) {
  const std::size_t n = a.rows;
  if (a.cols != n || b.size() != n) {
    throw std::invalid_argument("solve_dense needs a square system");
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(pivot, k))) pivot = r;
    }
    if (a(pivot, k) == 0.0) {
      throw std::runtime_error("singular matrix");
    }
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
      std::swap(b[k], b[pivot]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a(r, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double sum = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) sum -= a(ri, c) * x[c];
    x[ri] = sum / a(ri, ri);
  }
  return x;
}

/// Wraps a program's exit condition so every checked state is recorded
/// (the initial state first, then one state per iteration).
template <class Program, class State>
void record_states(Program& program, std::vector<State>& out) {
  auto inner = program.exit_condition;
  program.exit_condition = [inner, &out](const State& s) {
    out.push_back(s);
    return inner(s);
  };
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("length mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace testsupport
