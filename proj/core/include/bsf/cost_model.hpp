#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

// Analytic cost model for bulk-synchronous farm (BSF) programs: one master,
// K homogeneous workers, iterations made of a send phase, a compute phase,
// a receive phase and an evaluation phase. All quantities are abstract time
// units (seconds by convention) held in doubles; no unit enforcement.

namespace bsf {

/// The model parameters of a BSF iteration.
///
///   workers      (K)   number of worker nodes
///   latency      (L)   per-message latency upper bound
///   send_cost    (t_s) master time to send one order to one worker, excluding latency
///   work_cost    (t_w) time a one-worker farm needs to perform one order
///   receive_cost (t_r) total master time to receive the results of all workers, excluding latency
///   process_cost (t_p) total master time to evaluate the received results
///
/// All five time parameters must be finite and nonnegative; workers >= 1.
/// Analysis functions take the worker count as a separate real argument
/// (>= 1) so curves and derivatives can be evaluated between integers.
struct BsfParams {
  int workers = 1;
  double latency = 0.0;
  double send_cost = 0.0;
  double work_cost = 0.0;
  double receive_cost = 0.0;
  double process_cost = 0.0;
};

/// Throws std::invalid_argument if any field violates the BsfParams contract.
void validate_params(const BsfParams& params);

/// Per-phase breakdown of one predicted iteration on K workers.
/// total is evaluated in the closed polynomial form
///   T_K = (K^2 (2L + t_s) + K (t_r + t_p) + t_w) / K
/// and equals the sum of the five components up to floating-point rounding.
struct CostBreakdown {
  double send_total = 0.0;     // K t_s
  double compute = 0.0;        // t_w / K
  double receive_total = 0.0;  // t_r
  double evaluate = 0.0;       // t_p
  double latency_total = 0.0;  // 2 K L
  double total = 0.0;

  double component_sum() const {
    return send_total + compute + receive_total + evaluate + latency_total;
  }
};

/// Where the speedup curve a(K) peaks.
///
/// k_star is the real maximizer sqrt(t_w / (2L + t_s)). Degenerate cases:
/// t_w = 0 gives k_star = 0 and k_opt = 1 (nothing to distribute);
/// 2L + t_s = 0 with t_w > 0 gives an unbounded curve: k_star = +inf,
/// unbounded = true, k_opt = 0, and peak_speedup holds the supremum of
/// a(K) (never attained) with efficiency_at_opt its limit 0.
struct ScalabilityReport {
  double k_star = 0.0;
  bool unbounded = false;
  long long k_opt = 1;            // best integer worker count; 0 when unbounded
  double peak_speedup = 1.0;      // a(k_opt), ties broken toward smaller K
  double efficiency_at_opt = 1.0; // peak_speedup / k_opt
};

/// Predicted time of one iteration on a single worker:
///   T_1 = 2L + t_s + t_w + t_p + t_r.
double predict_t1(const BsfParams& params);

/// Predicted per-phase times of one iteration on `workers` (real >= 1) nodes.
CostBreakdown predict_tk(const BsfParams& params, double workers);

/// Speedup as a ratio of two measured or predicted times; both must be > 0.
double speedup_from_times(double t1, double tk);

/// Closed-form speedup
///   a(K) = K (2L + t_s + t_r + t_p + t_w) / (K^2 (2L + t_s) + K (t_r + t_p) + t_w).
/// Requires predict_t1(params) > 0.
double predict_speedup(const BsfParams& params, double workers);

/// Derivative of a(K) with respect to K:
///   a'(K) = (2L + t_s + t_r + t_p + t_w)(t_w / K^2 - 2L - t_s)
///           / (K (2L + t_s) + t_r + t_p + t_w / K)^2.
/// Positive below the peak, zero at k_star, negative above it.
double speedup_derivative(const BsfParams& params, double workers);

/// Location and height of the speedup maximum; see ScalabilityReport.
ScalabilityReport scalability_bound(const BsfParams& params);

/// Parallel efficiency e(K) = a(K) / K.
double efficiency_exact(const BsfParams& params, double workers);

/// Large-K efficiency approximation
///   e(K) ~ 1 / (1 + (K^2 (2L + t_s) + K (t_r + t_p)) / t_w).
/// Undefined for t_w = 0 (throws).
double efficiency_approx(const BsfParams& params, double workers);

/// One sampled point of the prediction curves.
struct SweepRow {
  long long workers = 1;
  double t_k = 0.0;
  double speedup = 0.0;
  double efficiency_exact = 0.0;
  double efficiency_approx = 0.0;
};

/// Evaluates every curve at a single integer worker count.
SweepRow evaluate_point(const BsfParams& params, long long workers);

/// Samples k_min, k_min + step, ... up to k_max (inclusive when hit).
/// Requires 1 <= k_min <= k_max, step >= 1 and t_w > 0.
std::vector<SweepRow> sweep(const BsfParams& params, long long k_min,
                            long long k_max, long long step = 1);

/// CSV with the fixed header K,T_K,speedup,efficiency_exact,efficiency_approx.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// The same rows as a JSON array of objects keyed like the CSV columns.
void write_sweep_json(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace bsf
