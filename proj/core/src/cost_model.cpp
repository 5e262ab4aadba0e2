#include "bsf/cost_model.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "bsf/text.hpp"

namespace bsf {

namespace {

// NaN fails every comparison, so the negated form catches it too.
void require_finite_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) +
                                " must be finite and nonnegative");
  }
}

void require_worker_arg(double workers) {
  if (!(workers >= 1.0) || !std::isfinite(workers)) {
    throw std::invalid_argument("workers must be finite and >= 1");
  }
}

}  // namespace

void validate_params(const BsfParams& params) {
  if (params.workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
  require_finite_nonneg(params.latency, "latency");
  require_finite_nonneg(params.send_cost, "send_cost");
  require_finite_nonneg(params.work_cost, "work_cost");
  require_finite_nonneg(params.receive_cost, "receive_cost");
  require_finite_nonneg(params.process_cost, "process_cost");
}

double predict_t1(const BsfParams& params) {
  validate_params(params);
  return 2.0 * params.latency + params.send_cost + params.work_cost +
         params.process_cost + params.receive_cost;
}

CostBreakdown predict_tk(const BsfParams& params, double workers) {
  validate_params(params);
  require_worker_arg(workers);
  const double k = workers;
  CostBreakdown b;
  b.send_total = k * params.send_cost;
  b.compute = params.work_cost / k;
  b.receive_total = params.receive_cost;
  b.evaluate = params.process_cost;
  b.latency_total = 2.0 * k * params.latency;
  b.total = (k * k * (2.0 * params.latency + params.send_cost) +
             k * (params.receive_cost + params.process_cost) +
             params.work_cost) /
            k;
  return b;
}

double speedup_from_times(double t1, double tk) {
  if (!(t1 > 0.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("t1 must be finite and positive");
  }
  if (!(tk > 0.0) || !std::isfinite(tk)) {
    throw std::invalid_argument("tk must be finite and positive");
  }
  return t1 / tk;
}

double predict_speedup(const BsfParams& params, double workers) {
  validate_params(params);
  require_worker_arg(workers);
  const double k = workers;
  const double num = k * (2.0 * params.latency + params.send_cost +
                          params.receive_cost + params.process_cost +
                          params.work_cost);
  const double den = k * k * (2.0 * params.latency + params.send_cost) +
                     k * (params.receive_cost + params.process_cost) +
                     params.work_cost;
  if (!(den > 0.0)) {
    throw std::invalid_argument("speedup undefined: all costs are zero");
  }
  return num / den;
}

double speedup_derivative(const BsfParams& params, double workers) {
  validate_params(params);
  require_worker_arg(workers);
  const double k = workers;
  const double s = 2.0 * params.latency + params.send_cost;
  const double rp = params.receive_cost + params.process_cost;
  const double tw = params.work_cost;
  const double den = k * s + rp + tw / k;
  if (!(den > 0.0)) {
    throw std::invalid_argument("derivative undefined: all costs are zero");
  }
  return (s + rp + tw) * (tw / (k * k) - s) / (den * den);
}

ScalabilityReport scalability_bound(const BsfParams& params) {
  validate_params(params);
  ScalabilityReport r;
  const double s = 2.0 * params.latency + params.send_cost;
  const double rp = params.receive_cost + params.process_cost;
  const double tw = params.work_cost;

  if (tw == 0.0) {
    // Nothing to distribute: a(K) is nonincreasing, best at K = 1.
    r.k_star = 0.0;
    r.unbounded = false;
    r.k_opt = 1;
    r.peak_speedup = 1.0;
    r.efficiency_at_opt = 1.0;
    return r;
  }
  if (s == 0.0) {
    // a(K) = K (rp + tw) / (K rp + tw) grows monotonically; its supremum
    // as K -> inf is (rp + tw) / rp, infinite when rp = 0 too.
    r.k_star = std::numeric_limits<double>::infinity();
    r.unbounded = true;
    r.k_opt = 0;
    r.peak_speedup = rp > 0.0 ? (rp + tw) / rp
                              : std::numeric_limits<double>::infinity();
    r.efficiency_at_opt = 0.0;
    return r;
  }

  r.k_star = std::sqrt(tw / s);
  r.unbounded = false;
  const double lo_d = std::max(std::floor(r.k_star), 1.0);
  const double hi_d = std::max(std::ceil(r.k_star), 1.0);
  const long long lo = static_cast<long long>(lo_d);
  const long long hi = static_cast<long long>(hi_d);
  const double a_lo = predict_speedup(params, lo_d);
  const double a_hi = hi == lo ? a_lo : predict_speedup(params, hi_d);
  if (hi != lo && a_hi > a_lo) {
    r.k_opt = hi;
    r.peak_speedup = a_hi;
  } else {
    r.k_opt = lo;
    r.peak_speedup = a_lo;
  }
  r.efficiency_at_opt = r.peak_speedup / static_cast<double>(r.k_opt);
  return r;
}

double efficiency_exact(const BsfParams& params, double workers) {
  return predict_speedup(params, workers) / workers;
}

double efficiency_approx(const BsfParams& params, double workers) {
  validate_params(params);
  require_worker_arg(workers);
  if (!(params.work_cost > 0.0)) {
    throw std::invalid_argument(
        "efficiency approximation undefined for work_cost = 0");
  }
  const double k = workers;
  const double overhead = (k * k * (2.0 * params.latency + params.send_cost) +
                           k * (params.receive_cost + params.process_cost)) /
                          params.work_cost;
  return 1.0 / (1.0 + overhead);
}

SweepRow evaluate_point(const BsfParams& params, long long workers) {
  const double k = static_cast<double>(workers);
  SweepRow row;
  row.workers = workers;
  row.t_k = predict_tk(params, k).total;
  row.speedup = predict_speedup(params, k);
  row.efficiency_exact = efficiency_exact(params, k);
  row.efficiency_approx = efficiency_approx(params, k);
  return row;
}

std::vector<SweepRow> sweep(const BsfParams& params, long long k_min,
                            long long k_max, long long step) {
  validate_params(params);
  if (k_min < 1 || k_max < k_min) {
    throw std::invalid_argument("need 1 <= k_min <= k_max");
  }
  if (step < 1) {
    throw std::invalid_argument("step must be >= 1");
  }
  if (!(params.work_cost > 0.0)) {
    throw std::invalid_argument("sweep requires work_cost > 0");
  }
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>((k_max - k_min) / step + 1));
  for (long long k = k_min; k <= k_max; k += step) {
    rows.push_back(evaluate_point(params, k));
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "K,T_K,speedup,efficiency_exact,efficiency_approx\n";
  for (const auto& row : rows) {
    os << row.workers << ',' << format_double(row.t_k) << ','
       << format_double(row.speedup) << ','
       << format_double(row.efficiency_exact) << ','
       << format_double(row.efficiency_approx) << '\n';
  }
}

void write_sweep_json(std::ostream& os, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    obj["K"] = row.workers;
    obj["T_K"] = row.t_k;
    obj["speedup"] = row.speedup;
    obj["efficiency_exact"] = row.efficiency_exact;
    obj["efficiency_approx"] = row.efficiency_approx;
    arr.push_back(std::move(obj));
  }
  os << arr.dump(2) << '\n';
}

}  // namespace bsf
