#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsf/cost_model.hpp"
#include "bsf/runtime.hpp"
#include "bsf/simulator.hpp"

// Calibration measures BsfParams from real single-worker runs of a payload;
// validation then compares the resulting analytic predictions, simulated
// schedules, and instrumented multi-worker executions side by side.

namespace bsf {

/// Affine wire-cost model turning message byte counts into times. The
/// in-process transport has no real network cost, so these are configured
/// rather than measured: cost(bytes) = per_message + per_byte * bytes,
/// with `latency` used directly as the model's L.
struct CommCostSpec {
  double latency = 0.0;
  double per_message = 0.0;
  double per_byte = 0.0;
};

void validate_comm(const CommCostSpec& comm);

double message_cost(const CommCostSpec& comm, std::size_t bytes);

/// One entry per sampled iteration, in sampling order. work and process
/// are measured wall times; send and receive are the modeled costs of that
/// iteration's order/result messages; wall is the full iteration time.
struct CalibrationSamples {
  std::vector<double> work;
  std::vector<double> process;
  std::vector<double> send;
  std::vector<double> receive;
  std::vector<double> wall;
};

/// Durations under this are indistinguishable from instrumentation
/// overhead and get flagged (never zeroed or altered).
inline constexpr double timer_resolution_floor_s = 1e-6;

struct CalibrationResult {
  BsfParams params;  // workers = 1; every field the median of its samples
  int repetitions = 0;
  CalibrationSamples raw_samples;
  std::vector<std::string> flags;
};

/// Median of a nonempty sample list (midpoint average for even counts).
double median(std::vector<double> values);

namespace detail {

template <class State, class Order, class Partial, class Output>
CalibrationSamples collect_samples(
    const BsfProgram<State, Order, Partial, Output>& program, int workers,
    int repetitions, const CommCostSpec& comm, ExecutionPolicy policy) {
  CalibrationSamples acc;
  while (acc.wall.size() < static_cast<std::size_t>(repetitions)) {
    RunOptions opts;
    opts.max_iterations =
        repetitions - static_cast<long long>(acc.wall.size());
    opts.policy = policy;
    auto run = run_bsf(program, workers, opts);
    if (run.timing.empty()) {
      throw std::invalid_argument(
          "program converges at init and yields no iterations to measure");
    }
    for (const auto& t : run.timing) {
      acc.work.push_back(t.compute_max_s);
      acc.process.push_back(t.reduce_s);
      acc.send.push_back(message_cost(comm, t.order_bytes));
      acc.receive.push_back(message_cost(comm, t.result_bytes));
      acc.wall.push_back(t.wall_s);
    }
  }
  return acc;
}

void flag_below_resolution(CalibrationResult& result);

}  // namespace detail

/// Runs the program on one worker until `repetitions` iterations have been
/// sampled (re-running converging programs as needed) and takes medians:
/// t_w from the worker-step times, t_p from the reduce times, t_s and t_r
/// from the order/result byte sizes through `comm`, L = comm.latency.
template <class State, class Order, class Partial, class Output>
CalibrationResult calibrate(
    const BsfProgram<State, Order, Partial, Output>& program, int repetitions,
    const CommCostSpec& comm,
    ExecutionPolicy policy = ExecutionPolicy::threaded) {
  if (repetitions < 1) {
    throw std::invalid_argument("repetitions must be >= 1");
  }
  validate_comm(comm);
  CalibrationResult result;
  result.raw_samples =
      detail::collect_samples(program, 1, repetitions, comm, policy);
  result.repetitions = repetitions;
  result.params.workers = 1;
  result.params.latency = comm.latency;
  result.params.send_cost = median(result.raw_samples.send);
  result.params.work_cost = median(result.raw_samples.work);
  result.params.receive_cost = median(result.raw_samples.receive);
  result.params.process_cost = median(result.raw_samples.process);
  detail::flag_below_resolution(result);
  return result;
}

/// One worker count of the side-by-side comparison. Relative errors are
/// against t_predicted; speedup_measured is the measured K = 1 wall median
/// over this row's wall median.
struct ValidationRow {
  long long workers = 1;
  double t_predicted = 0.0;
  double t_simulated = 0.0;
  double t_measured = 0.0;
  double sim_rel_error = 0.0;
  double measured_rel_error = 0.0;
  double speedup_predicted = 1.0;
  double speedup_measured = 1.0;
};

struct ValidationReport {
  std::string payload;
  ScheduleMode mode = ScheduleMode::serialized;
  int repetitions = 0;
  CalibrationResult calibration;
  ScalabilityReport scalability;
  std::vector<ValidationRow> rows;
};

namespace detail {

ValidationRow build_validation_row(const BsfParams& params, ScheduleMode mode,
                                   long long workers, double wall_median,
                                   double baseline_wall);

}  // namespace detail

/// Calibrates on one worker, then for each K in k_list predicts, simulates
/// and actually runs the program, filling one ValidationRow per K. The
/// K = 1 measurement reuses the calibration runs' wall times.
template <class State, class Order, class Partial, class Output>
ValidationReport validate_program(
    const BsfProgram<State, Order, Partial, Output>& program,
    const std::vector<long long>& k_list, int repetitions,
    const CommCostSpec& comm, ScheduleMode mode = ScheduleMode::serialized,
    ExecutionPolicy policy = ExecutionPolicy::threaded) {
  if (k_list.empty()) {
    throw std::invalid_argument("k_list must be nonempty");
  }
  for (long long k : k_list) {
    if (k < 1) {
      throw std::invalid_argument("every K must be >= 1");
    }
  }
  ValidationReport report;
  report.payload = program.name;
  report.mode = mode;
  report.repetitions = repetitions;
  report.calibration = calibrate(program, repetitions, comm, policy);
  report.scalability = scalability_bound(report.calibration.params);
  const double baseline_wall = median(report.calibration.raw_samples.wall);
  report.rows.reserve(k_list.size());
  for (long long k : k_list) {
    const double wall =
        k == 1 ? baseline_wall
               : median(detail::collect_samples(program, static_cast<int>(k),
                                                repetitions, comm, policy)
                            .wall);
    report.rows.push_back(detail::build_validation_row(
        report.calibration.params, mode, k, wall, baseline_wall));
  }
  return report;
}

/// JSON object with params, repetitions, flags and samples; the same
/// encoding a validation report embeds as its "calibration" block.
void write_calibration_json(std::ostream& os, const CalibrationResult& result);

/// JSON document with payload, mode, repetitions, calibration (params,
/// flags, samples), scalability and rows. Infinite k_star/peak_speedup
/// serialize as null next to "unbounded": true.
void write_validation_json(std::ostream& os, const ValidationReport& report);

/// Parses write_validation_json output back; values round-trip exactly.
ValidationReport read_validation_json(std::istream& is);

}  // namespace bsf
