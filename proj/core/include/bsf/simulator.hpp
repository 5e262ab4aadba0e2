#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsf/cost_model.hpp"

// Deterministic discrete-event simulation of BSF iterations on a virtual
// cluster of one master and K workers. Serialized mode reproduces the
// analytic schedule exactly: send, compute, receive and evaluate phases do
// not overlap. Pipelined mode lets each worker start on order arrival and
// the master ingest results as they arrive; it lower-bounds the serialized
// time and quantifies how conservative the serialized schedule is.

namespace bsf {

enum class ScheduleMode { serialized, pipelined };

const char* schedule_mode_name(ScheduleMode mode);

/// Inverse of schedule_mode_name; throws std::invalid_argument on
/// anything but "serialized" or "pipelined".
ScheduleMode parse_schedule_mode(const std::string& name);

/// Virtual cluster description for one iteration.
/// receive_cost is the master's total ingest work across all workers;
/// per_worker_compute is each worker's compute time (work_cost / K when
/// built via from_params). A nonempty compute_overrides (length exactly
/// workers) replaces the uniform value per worker.
struct ClusterConfig {
  int workers = 1;
  double latency = 0.0;
  double send_cost = 0.0;
  double per_worker_compute = 0.0;
  double receive_cost = 0.0;
  double process_cost = 0.0;
  std::vector<double> compute_overrides;
  ScheduleMode mode = ScheduleMode::serialized;

  /// Splits params.work_cost evenly over `workers` nodes.
  static ClusterConfig from_params(const BsfParams& params, int workers,
                                   ScheduleMode mode = ScheduleMode::serialized);

  double compute_time(int worker) const {
    return compute_overrides.empty()
               ? per_worker_compute
               : compute_overrides[static_cast<std::size_t>(worker)];
  }
};

/// Throws std::invalid_argument on violation of the ClusterConfig contract.
void validate_cluster(const ClusterConfig& cfg);

/// Lifecycle order of events inside one iteration; used to break timestamp
/// ties so equal-time events list in causal order.
enum class EventKind {
  send_start,     // master starts serializing one order onto the wire
  send_end,       // master finishes sending that order
  order_arrive,   // order lands at its worker (send_end + latency)
  compute_start,  // worker begins its slice
  compute_end,    // worker finishes its slice
  result_depart,  // result leaves the worker
  result_arrive,  // result lands at the master (depart + latency)
  receive_end,    // master finished ingesting: one block event in serialized
                  // mode, one event per worker result in pipelined mode
  barrier_pass,   // all results in; synchronization itself costs nothing
  evaluate_start, // master begins evaluating the combined result
  evaluate_end,   // iteration over; timestamp equals t_measured
};

const char* event_kind_name(EventKind kind);

/// Node index of the master in SimEvent records; workers are 0-based.
inline constexpr int master_node = -1;

struct SimEvent {
  double time = 0.0;
  int node = master_node;
  EventKind kind = EventKind::send_start;
};

/// One simulated iteration: every event, sorted by (time, kind, node),
/// plus the iteration makespan.
struct IterationTimeline {
  std::vector<SimEvent> events;
  double t_measured = 0.0;
};

/// Identical iterations chained together; total_time accumulates the
/// per-iteration makespans in order.
struct RunTrace {
  std::vector<IterationTimeline> iterations;
  double total_time = 0.0;

  std::size_t iteration_count() const { return iterations.size(); }
};

/// Simulates a single iteration under cfg.mode.
///
/// Serialized mode: the master emits K sends back to back (t_s each, landing
/// latency later), every worker computes only once the last order has
/// landed, all results depart together and the return path plus ingest is
/// charged as one block of K*latency + receive_cost, then process_cost of
/// evaluation. With a uniform split the makespan is exactly
///   K (latency + t_s) + t_w / K + K latency + t_r + t_p.
/// Pipelined mode: worker i starts at its own order_arrive, results are
/// ingested in arrival order at receive_cost / K each; never slower than
/// serialized mode and identical to it when K = 1.
IterationTimeline simulate_iteration(const ClusterConfig& cfg);

/// Replays `iterations` (>= 1) identical iterations.
RunTrace simulate_run(const ClusterConfig& cfg, long long iterations);

/// Speedup curve measured from simulated runs.
struct MeasuredPoint {
  long long workers = 1;
  double t_measured = 0.0;
  double speedup = 1.0;
};

/// Simulates params at K = 1 as the baseline, then at every K in k_list,
/// splitting params.work_cost evenly each time. speedup = T(1) / T(K).
std::vector<MeasuredPoint> measured_speedup(const BsfParams& params,
                                            const std::vector<long long>& k_list,
                                            ScheduleMode mode);

/// "master" or "w<index>".
std::string node_name(int node);

/// JSON object: mode, workers, t_measured and the events array.
void write_timeline_json(std::ostream& os, const ClusterConfig& cfg,
                         const IterationTimeline& timeline);

/// CSV with header timestamp,node,kind and one event per row.
void write_timeline_csv(std::ostream& os, const IterationTimeline& timeline);

}  // namespace bsf
