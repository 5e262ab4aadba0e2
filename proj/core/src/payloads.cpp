#include "bsf/payloads.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace bsf {

namespace {

void require_shapes(const DenseMatrix& a, const std::vector<double>& b,
                    const std::vector<double>& x0, std::size_t x_dim) {
  if (a.values.size() != a.rows * a.cols) {
    throw std::invalid_argument("matrix storage does not match its shape");
  }
  if (b.size() != a.rows) {
    throw std::invalid_argument("right-hand side length must equal the row count");
  }
  if (!x0.empty() && x0.size() != x_dim) {
    throw std::invalid_argument("starting iterate has the wrong length");
  }
}

void busy_spin(double seconds) {
  if (seconds <= 0.0) return;
  const auto t0 = std::chrono::steady_clock::now();
  while (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count() < seconds) {
  }
}

}  // namespace

DenseMatrix identity_matrix(std::size_t n) {
  DenseMatrix m;
  m.rows = n;
  m.cols = n;
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

double residual_inf_norm(const DenseMatrix& a, const std::vector<double>& x,
                         const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows; ++r) {
    double dot = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) {
      dot += a(r, c) * x[c];
    }
    worst = std::max(worst, std::abs(dot - b[r]));
  }
  return worst;
}

std::vector<double> least_squares_gradient(const DenseMatrix& a,
                                           const std::vector<double>& x,
                                           const std::vector<double>& b) {
  std::vector<double> grad(a.cols, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    double dot = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) {
      dot += a(r, c) * x[c];
    }
    const double resid = dot - b[r];
    for (std::size_t c = 0; c < a.cols; ++c) {
      grad[c] += a(r, c) * resid;
    }
  }
  return grad;
}

double least_squares_objective(const DenseMatrix& a,
                               const std::vector<double>& x,
                               const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t r = 0; r < a.rows; ++r) {
    double dot = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) {
      dot += a(r, c) * x[c];
    }
    const double resid = dot - b[r];
    sum += resid * resid;
  }
  return sum;
}

JacobiProgram jacobi_program(LinearSystem sys, double tol) {
  if (sys.a.rows != sys.a.cols) {
    throw std::invalid_argument("Jacobi needs a square matrix");
  }
  require_shapes(sys.a, sys.b, sys.x0, sys.a.cols);
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("tolerance must be finite and positive");
  }
  const std::size_t n = sys.a.rows;
  for (std::size_t r = 0; r < n; ++r) {
    if (sys.a(r, r) == 0.0) {
      throw std::invalid_argument("zero diagonal entry at row " +
                                  std::to_string(r));
    }
    double off = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (c != r) off += std::abs(sys.a(r, c));
    }
    if (!(std::abs(sys.a(r, r)) > off)) {
      throw std::invalid_argument(
          "matrix is not strictly diagonally dominant at row " +
          std::to_string(r));
    }
  }
  if (sys.x0.empty()) {
    sys.x0.assign(n, 0.0);
  }

  auto shared = std::make_shared<const LinearSystem>(std::move(sys));

  JacobiProgram p;
  p.name = "jacobi";
  p.n_items = n;
  p.init = [shared] {
    JacobiState s;
    s.x = shared->x0;
    s.residual_inf = residual_inf_norm(shared->a, s.x, shared->b);
    return s;
  };
  p.make_order = [](const JacobiState& s) { return s.x; };
  p.worker_step = [shared](const std::vector<double>& x, Slice slice, int) {
    const DenseMatrix& a = shared->a;
    JacobiPartial part;
    part.offset = slice.offset;
    part.values.reserve(slice.length);
    for (std::size_t r = slice.offset; r < slice.offset + slice.length; ++r) {
      double sum = shared->b[r];
      for (std::size_t c = 0; c < a.cols; ++c) {
        if (c != r) sum -= a(r, c) * x[c];
      }
      part.values.push_back(sum / a(r, r));
    }
    return part;
  };
  p.reduce = [shared](const std::vector<JacobiPartial>& parts,
                      const JacobiState& s) {
    JacobiState next;
    next.x.resize(s.x.size());
    for (const auto& part : parts) {
      std::copy(part.values.begin(), part.values.end(),
                next.x.begin() + static_cast<std::ptrdiff_t>(part.offset));
    }
    next.residual_inf = residual_inf_norm(shared->a, next.x, shared->b);
    return next;
  };
  p.exit_condition = [tol](const JacobiState& s) {
    return s.residual_inf < tol;
  };
  p.finalize = [](const JacobiState& s) { return s; };
  p.order_size = [](const std::vector<double>& x) {
    return x.size() * sizeof(double);
  };
  p.result_size = [](const JacobiPartial& part) {
    return part.values.size() * sizeof(double) + sizeof(std::size_t);
  };
  return p;
}

GdProgram gradient_descent_program(LeastSquaresProblem problem, double tol) {
  require_shapes(problem.a, problem.b, problem.x0, problem.a.cols);
  if (!(problem.step_size > 0.0) || !std::isfinite(problem.step_size)) {
    throw std::invalid_argument("step size must be finite and positive");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("tolerance must be finite and positive");
  }
  if (problem.x0.empty()) {
    problem.x0.assign(problem.a.cols, 0.0);
  }

  auto shared = std::make_shared<const LeastSquaresProblem>(std::move(problem));

  GdProgram p;
  p.name = "gd";
  p.n_items = shared->a.rows;
  p.init = [shared] {
    GdState s;
    s.x = shared->x0;
    const auto grad = least_squares_gradient(shared->a, s.x, shared->b);
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    s.grad_norm = std::sqrt(sq);
    return s;
  };
  p.make_order = [](const GdState& s) { return s.x; };
  p.worker_step = [shared](const std::vector<double>& x, Slice slice, int) {
    const DenseMatrix& a = shared->a;
    std::vector<double> grad(a.cols, 0.0);
    for (std::size_t r = slice.offset; r < slice.offset + slice.length; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < a.cols; ++c) {
        dot += a(r, c) * x[c];
      }
      const double resid = dot - shared->b[r];
      for (std::size_t c = 0; c < a.cols; ++c) {
        grad[c] += a(r, c) * resid;
      }
    }
    return grad;
  };
  p.reduce = [shared, tol](const std::vector<std::vector<double>>& parts,
                           const GdState& s) {
    std::vector<double> grad(s.x.size(), 0.0);
    for (const auto& part : parts) {
      for (std::size_t c = 0; c < grad.size(); ++c) {
        grad[c] += part[c];
      }
    }
    double sq = 0.0;
    for (double g : grad) sq += g * g;

    GdState next;
    next.grad_norm = std::sqrt(sq);
    if (next.grad_norm < tol) {
      next.x = s.x;  // converged: leave the iterate where it is
    } else {
      next.x.resize(s.x.size());
      for (std::size_t c = 0; c < next.x.size(); ++c) {
        next.x[c] = s.x[c] - shared->step_size * grad[c];
      }
    }
    return next;
  };
  p.exit_condition = [tol](const GdState& s) { return s.grad_norm < tol; };
  p.finalize = [](const GdState& s) { return s; };
  p.order_size = [](const std::vector<double>& x) {
    return x.size() * sizeof(double);
  };
  p.result_size = [](const std::vector<double>& part) {
    return part.size() * sizeof(double);
  };
  return p;
}

double estimate_lambda_max(const DenseMatrix& a, int iterations,
                           std::uint64_t seed) {
  if (a.rows == 0 || a.cols == 0) return 0.0;
  if (iterations < 1) {
    throw std::invalid_argument("iterations must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(a.cols);
  double norm = 0.0;
  for (double& vi : v) {
    vi = unit(rng);
    norm += vi * vi;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v[0] = 1.0;
    norm = 1.0;
  }
  for (double& vi : v) vi /= norm;

  std::vector<double> av(a.rows);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t r = 0; r < a.rows; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < a.cols; ++c) {
        dot += a(r, c) * v[c];
      }
      av[r] = dot;
    }
    std::vector<double> w(a.cols, 0.0);
    for (std::size_t r = 0; r < a.rows; ++r) {
      for (std::size_t c = 0; c < a.cols; ++c) {
        w[c] += a(r, c) * av[r];
      }
    }
    double wnorm = 0.0;
    for (double wc : w) wnorm += wc * wc;
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0.0) return 0.0;  // v in the null space: A^T A v = 0
    lambda = wnorm;                // Rayleigh estimate, since ||v|| = 1
    for (std::size_t c = 0; c < a.cols; ++c) {
      v[c] = w[c] / wnorm;
    }
  }
  return lambda;
}

LeastSquaresProblem make_least_squares(DenseMatrix a, std::vector<double> b,
                                       std::vector<double> x0,
                                       std::uint64_t seed) {
  require_shapes(a, b, x0, a.cols);
  LeastSquaresProblem p;
  const double lambda = estimate_lambda_max(a, 300, seed);
  p.step_size = lambda > 0.0 ? 0.95 / lambda : 1.0;
  if (x0.empty()) {
    x0.assign(a.cols, 0.0);
  }
  p.a = std::move(a);
  p.b = std::move(b);
  p.x0 = std::move(x0);
  return p;
}

SyntheticProgram synthetic_program(const SyntheticSpec& spec) {
  if (!(spec.compute_ms >= 0.0) || !std::isfinite(spec.compute_ms)) {
    throw std::invalid_argument("compute_ms must be finite and nonnegative");
  }
  if (spec.iterations < 0) {
    throw std::invalid_argument("iterations must be nonnegative");
  }

  // Work is measured in quanta so uneven worker counts still split the
  // spin time and the result bytes proportionally and exactly.
  constexpr std::size_t quanta = std::size_t{1} << 20;
  const double spin_total_s = spec.compute_ms / 1000.0;
  const std::size_t result_bytes = spec.result_bytes;
  const long long limit = spec.iterations;

  SyntheticProgram p;
  p.name = "synthetic";
  p.n_items = quanta;
  p.init = [] { return 0LL; };
  p.make_order = [order_bytes = spec.order_bytes](const long long& s) {
    SyntheticOrder order;
    order.iteration = s;
    order.padding.assign(order_bytes, std::uint8_t{0});
    return order;
  };
  p.worker_step = [spin_total_s, result_bytes](const SyntheticOrder&,
                                               Slice slice, int) {
    SyntheticPartial part;
    const double share =
        static_cast<double>(slice.length) / static_cast<double>(quanta);
    busy_spin(spin_total_s * share);
    part.spun_s = spin_total_s * share;
    // Prefix-difference split: the per-worker byte counts of contiguous
    // slices always sum to exactly result_bytes.
    const std::size_t hi = result_bytes * (slice.offset + slice.length) / quanta;
    const std::size_t lo = result_bytes * slice.offset / quanta;
    part.payload.assign(hi - lo, std::uint8_t{0});
    return part;
  };
  p.reduce = [](const std::vector<SyntheticPartial>&, const long long& s) {
    return s + 1;
  };
  p.exit_condition = [limit](const long long& s) { return s >= limit; };
  p.finalize = [](const long long& s) { return s; };
  p.order_size = [](const SyntheticOrder& o) { return o.padding.size(); };
  p.result_size = [](const SyntheticPartial& part) {
    return part.payload.size();
  };
  return p;
}

LinearSystem make_diagonally_dominant_system(std::size_t n,
                                             std::uint64_t seed) {
  if (n == 0) {
    throw std::invalid_argument("system size must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  std::uniform_real_distribution<double> slack(1.0, 2.0);

  LinearSystem sys;
  sys.a.rows = n;
  sys.a.cols = n;
  sys.a.values.assign(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double row_sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == r) continue;
      const double v = off(rng);
      sys.a(r, c) = v;
      row_sum += std::abs(v);
    }
    sys.a(r, r) = 2.0 * row_sum + slack(rng);
  }
  sys.b.resize(n);
  for (double& bi : sys.b) {
    bi = off(rng);
  }
  sys.x0.assign(n, 0.0);
  return sys;
}

}  // namespace bsf
