#include "bsf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "bsf/text.hpp"

namespace bsf {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) +
                                " must be finite and nonnegative");
  }
}

}  // namespace

const char* schedule_mode_name(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::serialized: return "serialized";
    case ScheduleMode::pipelined: return "pipelined";
  }
  return "unknown";
}

ScheduleMode parse_schedule_mode(const std::string& name) {
  if (name == "serialized") return ScheduleMode::serialized;
  if (name == "pipelined") return ScheduleMode::pipelined;
  throw std::invalid_argument("unknown schedule mode \"" + name +
                              "\" (expected serialized or pipelined)");
}

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::send_start: return "send_start";
    case EventKind::send_end: return "send_end";
    case EventKind::order_arrive: return "order_arrive";
    case EventKind::compute_start: return "compute_start";
    case EventKind::compute_end: return "compute_end";
    case EventKind::result_depart: return "result_depart";
    case EventKind::result_arrive: return "result_arrive";
    case EventKind::receive_end: return "receive_end";
    case EventKind::barrier_pass: return "barrier_pass";
    case EventKind::evaluate_start: return "evaluate_start";
    case EventKind::evaluate_end: return "evaluate_end";
  }
  return "unknown";
}

std::string node_name(int node) {
  return node == master_node ? std::string("master")
                             : "w" + std::to_string(node);
}

ClusterConfig ClusterConfig::from_params(const BsfParams& params, int workers,
                                         ScheduleMode mode) {
  validate_params(params);
  if (workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
  ClusterConfig cfg;
  cfg.workers = workers;
  cfg.latency = params.latency;
  cfg.send_cost = params.send_cost;
  cfg.per_worker_compute = params.work_cost / static_cast<double>(workers);
  cfg.receive_cost = params.receive_cost;
  cfg.process_cost = params.process_cost;
  cfg.mode = mode;
  return cfg;
}

void validate_cluster(const ClusterConfig& cfg) {
  if (cfg.workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
  require_finite_nonneg(cfg.latency, "latency");
  require_finite_nonneg(cfg.send_cost, "send_cost");
  require_finite_nonneg(cfg.per_worker_compute, "per_worker_compute");
  require_finite_nonneg(cfg.receive_cost, "receive_cost");
  require_finite_nonneg(cfg.process_cost, "process_cost");
  if (!cfg.compute_overrides.empty()) {
    if (cfg.compute_overrides.size() != static_cast<std::size_t>(cfg.workers)) {
      throw std::invalid_argument(
          "compute_overrides must list exactly one time per worker");
    }
    for (double c : cfg.compute_overrides) {
      require_finite_nonneg(c, "compute_overrides entry");
    }
  }
  if (cfg.mode != ScheduleMode::serialized &&
      cfg.mode != ScheduleMode::pipelined) {
    throw std::invalid_argument("unknown schedule mode");
  }
}

IterationTimeline simulate_iteration(const ClusterConfig& cfg) {
  validate_cluster(cfg);
  const int k = cfg.workers;
  const double kd = static_cast<double>(k);
  const double lat = cfg.latency;
  const double ts = cfg.send_cost;
  const double tr = cfg.receive_cost;
  const double tp = cfg.process_cost;

  IterationTimeline tl;
  tl.events.reserve(static_cast<std::size_t>(8 * k + 4));
  auto push = [&tl](double t, int node, EventKind kind) {
    tl.events.push_back(SimEvent{t, node, kind});
  };

  // Send phase, identical in both modes: K back-to-back sends on the
  // master, each order landing one latency after its send_end.
  std::vector<double> order_arrive(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double start = static_cast<double>(i) * ts;
    const double end = static_cast<double>(i + 1) * ts;
    order_arrive[static_cast<std::size_t>(i)] = end + lat;
    push(start, master_node, EventKind::send_start);
    push(end, master_node, EventKind::send_end);
    push(end + lat, i, EventKind::order_arrive);
  }

  double work_done = 0.0;  // time the master holds all ingested results

  if (cfg.mode == ScheduleMode::serialized) {
    // Every worker waits for the last order: the compute phase opens at
    // K (latency + t_s), which is never earlier than any order_arrive.
    const double phase_start = kd * (lat + ts);
    double compute_max = 0.0;
    for (int i = 0; i < k; ++i) {
      const double c = cfg.compute_time(i);
      compute_max = std::max(compute_max, c);
      push(phase_start, i, EventKind::compute_start);
      push(phase_start + c, i, EventKind::compute_end);
    }
    const double compute_done = phase_start + compute_max;
    for (int i = 0; i < k; ++i) {
      push(compute_done, i, EventKind::result_depart);
      push(compute_done + lat, i, EventKind::result_arrive);
    }
    // Return latencies overlap in the network; the master's ingest is one
    // serialized block charged K * latency + t_r in total.
    work_done = compute_done + kd * lat + tr;
    push(work_done, master_node, EventKind::receive_end);
  } else {
    // Pipelined: workers start on their own order_arrive, results are
    // ingested in arrival order at t_r / K of master work apiece.
    std::vector<double> arrive(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const std::size_t ui = static_cast<std::size_t>(i);
      const double start = order_arrive[ui];
      const double end = start + cfg.compute_time(i);
      arrive[ui] = end + lat;
      push(start, i, EventKind::compute_start);
      push(end, i, EventKind::compute_end);
      push(end, i, EventKind::result_depart);
      push(arrive[ui], i, EventKind::result_arrive);
    }
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&arrive](int a, int b) {
      const double ta = arrive[static_cast<std::size_t>(a)];
      const double tb = arrive[static_cast<std::size_t>(b)];
      return ta != tb ? ta < tb : a < b;
    });
    const double per_result = tr / kd;
    double busy = 0.0;
    for (int i : order) {
      busy = std::max(busy, arrive[static_cast<std::size_t>(i)]);
      busy += per_result;
      push(busy, i, EventKind::receive_end);
    }
    work_done = busy;
  }

  push(work_done, master_node, EventKind::barrier_pass);
  push(work_done, master_node, EventKind::evaluate_start);
  tl.t_measured = work_done + tp;
  push(tl.t_measured, master_node, EventKind::evaluate_end);

  std::sort(tl.events.begin(), tl.events.end(),
            [](const SimEvent& a, const SimEvent& b) {
              return std::tie(a.time, a.kind, a.node) <
                     std::tie(b.time, b.kind, b.node);
            });
  return tl;
}

RunTrace simulate_run(const ClusterConfig& cfg, long long iterations) {
  if (iterations < 1) {
    throw std::invalid_argument("iterations must be >= 1");
  }
  RunTrace trace;
  IterationTimeline one = simulate_iteration(cfg);
  trace.iterations.assign(static_cast<std::size_t>(iterations), one);
  trace.total_time = 0.0;
  for (const auto& it : trace.iterations) {
    trace.total_time += it.t_measured;
  }
  return trace;
}

std::vector<MeasuredPoint> measured_speedup(const BsfParams& params,
                                            const std::vector<long long>& k_list,
                                            ScheduleMode mode) {
  if (k_list.empty()) {
    throw std::invalid_argument("k_list must be nonempty");
  }
  for (long long k : k_list) {
    if (k < 1) {
      throw std::invalid_argument("every K must be >= 1");
    }
  }
  const double t1 =
      simulate_iteration(ClusterConfig::from_params(params, 1, mode))
          .t_measured;
  if (!(t1 > 0.0)) {
    throw std::invalid_argument("speedup undefined: zero-time iteration");
  }
  std::vector<MeasuredPoint> points;
  points.reserve(k_list.size());
  for (long long k : k_list) {
    MeasuredPoint p;
    p.workers = k;
    p.t_measured = simulate_iteration(ClusterConfig::from_params(
                                          params, static_cast<int>(k), mode))
                       .t_measured;
    p.speedup = t1 / p.t_measured;
    points.push_back(p);
  }
  return points;
}

void write_timeline_json(std::ostream& os, const ClusterConfig& cfg,
                         const IterationTimeline& timeline) {
  nlohmann::ordered_json doc;
  doc["mode"] = schedule_mode_name(cfg.mode);
  doc["workers"] = cfg.workers;
  doc["t_measured"] = timeline.t_measured;
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const auto& ev : timeline.events) {
    nlohmann::ordered_json obj;
    obj["timestamp"] = ev.time;
    obj["node"] = node_name(ev.node);
    obj["kind"] = event_kind_name(ev.kind);
    events.push_back(std::move(obj));
  }
  doc["events"] = std::move(events);
  os << doc.dump(2) << '\n';
}

void write_timeline_csv(std::ostream& os, const IterationTimeline& timeline) {
  os << "timestamp,node,kind\n";
  for (const auto& ev : timeline.events) {
    os << format_double(ev.time) << ',' << node_name(ev.node) << ','
       << event_kind_name(ev.kind) << '\n';
  }
}

}  // namespace bsf
