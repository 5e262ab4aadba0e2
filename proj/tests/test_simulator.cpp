#include "bsf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "bsf/cost_model.hpp"

using namespace bsf;

namespace {

BsfParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> small(0.05, 5.0);
  std::uniform_real_distribution<double> scale(1.0, 100.0);
  BsfParams p;
  p.latency = small(rng);
  p.send_cost = small(rng);
  p.receive_cost = small(rng);
  p.process_cost = small(rng);
  p.work_cost = scale(rng) * (2.0 * p.latency + p.send_cost +
                              p.receive_cost + p.process_cost);
  return p;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

std::vector<SimEvent> events_of_kind(const IterationTimeline& tl,
                                     EventKind kind) {
  std::vector<SimEvent> out;
  for (const auto& ev : tl.events) {
    if (ev.kind == kind) out.push_back(ev);
  }
  return out;
}

double time_for_node(const std::vector<SimEvent>& evs, int node) {
  for (const auto& ev : evs) {
    if (ev.node == node) return ev.time;
  }
  REQUIRE(false);
  return 0.0;
}

ClusterConfig example_config(int k, ScheduleMode mode) {
  BsfParams p;
  p.latency = 0.5;
  p.send_cost = 1.0;
  p.work_cost = 100.0;
  p.receive_cost = 4.0;
  p.process_cost = 5.0;
  return ClusterConfig::from_params(p, k, mode);
}

}  // namespace

TEST_CASE("single-worker serialized iteration matches the hand value") {
  ClusterConfig cfg;
  cfg.workers = 1;
  cfg.latency = 0.5;
  cfg.send_cost = 1.0;
  cfg.per_worker_compute = 100.0;
  cfg.receive_cost = 4.0;
  cfg.process_cost = 5.0;
  IterationTimeline tl = simulate_iteration(cfg);
  CHECK(tl.t_measured == 111.0);
}

TEST_CASE("ten-worker serialized iteration matches the hand value") {
  IterationTimeline tl =
      simulate_iteration(example_config(10, ScheduleMode::serialized));
  CHECK(tl.t_measured == 39.0);
}

TEST_CASE("serialized makespan tracks the analytic per-iteration time") {
  std::mt19937_64 rng(20240701);
  for (int i = 0; i < 100; ++i) {
    BsfParams p = random_params(rng);
    for (int k : {1, 2, 3, 8, 37, 128}) {
      ClusterConfig cfg =
          ClusterConfig::from_params(p, k, ScheduleMode::serialized);
      const double want = predict_tk(p, static_cast<double>(k)).total;
      CHECK(rel_err(simulate_iteration(cfg).t_measured, want) < 1e-9);
    }
  }
}

TEST_CASE("timestamps never decrease along the event list") {
  std::mt19937_64 rng(20240702);
  for (int i = 0; i < 40; ++i) {
    BsfParams p = random_params(rng);
    for (auto mode : {ScheduleMode::serialized, ScheduleMode::pipelined}) {
      IterationTimeline tl =
          simulate_iteration(ClusterConfig::from_params(p, 9, mode));
      for (std::size_t j = 1; j < tl.events.size(); ++j) {
        CHECK(tl.events[j - 1].time <= tl.events[j].time);
      }
    }
  }
}

TEST_CASE("every worker computes exactly once for its assigned time") {
  std::mt19937_64 rng(20240703);
  BsfParams p = random_params(rng);
  for (auto mode : {ScheduleMode::serialized, ScheduleMode::pipelined}) {
    ClusterConfig cfg = ClusterConfig::from_params(p, 16, mode);
    IterationTimeline tl = simulate_iteration(cfg);
    auto starts = events_of_kind(tl, EventKind::compute_start);
    auto ends = events_of_kind(tl, EventKind::compute_end);
    REQUIRE(starts.size() == 16);
    REQUIRE(ends.size() == 16);
    const double tol = 1e-12 * std::max(1.0, tl.t_measured);
    for (int w = 0; w < 16; ++w) {
      const double dur = time_for_node(ends, w) - time_for_node(starts, w);
      CHECK(std::abs(dur - cfg.compute_time(w)) <= tol);
    }
  }
}

TEST_CASE("orders and results land exactly one latency after leaving") {
  std::mt19937_64 rng(20240704);
  BsfParams p = random_params(rng);
  for (auto mode : {ScheduleMode::serialized, ScheduleMode::pipelined}) {
    ClusterConfig cfg = ClusterConfig::from_params(p, 12, mode);
    IterationTimeline tl = simulate_iteration(cfg);

    auto send_ends = events_of_kind(tl, EventKind::send_end);
    auto arrives = events_of_kind(tl, EventKind::order_arrive);
    REQUIRE(send_ends.size() == 12);
    REQUIRE(arrives.size() == 12);
    // Sends are back to back, so the i-th send_end belongs to worker i.
    for (int w = 0; w < 12; ++w) {
      CHECK(time_for_node(arrives, w) ==
            send_ends[static_cast<std::size_t>(w)].time + cfg.latency);
    }

    auto departs = events_of_kind(tl, EventKind::result_depart);
    auto result_arrives = events_of_kind(tl, EventKind::result_arrive);
    REQUIRE(departs.size() == 12);
    REQUIRE(result_arrives.size() == 12);
    for (int w = 0; w < 12; ++w) {
      CHECK(time_for_node(result_arrives, w) ==
            time_for_node(departs, w) + cfg.latency);
    }
  }
}

TEST_CASE("synchronization happens after the last result arrival") {
  std::mt19937_64 rng(20240705);
  for (int i = 0; i < 40; ++i) {
    BsfParams p = random_params(rng);
    for (auto mode : {ScheduleMode::serialized, ScheduleMode::pipelined}) {
      IterationTimeline tl =
          simulate_iteration(ClusterConfig::from_params(p, 7, mode));
      auto arrives = events_of_kind(tl, EventKind::result_arrive);
      double last_arrive = 0.0;
      for (const auto& ev : arrives) {
        last_arrive = std::max(last_arrive, ev.time);
      }
      auto barrier = events_of_kind(tl, EventKind::barrier_pass);
      auto eval_start = events_of_kind(tl, EventKind::evaluate_start);
      auto eval_end = events_of_kind(tl, EventKind::evaluate_end);
      REQUIRE(barrier.size() == 1);
      REQUIRE(eval_start.size() == 1);
      REQUIRE(eval_end.size() == 1);
      CHECK(barrier[0].time >= last_arrive);
      CHECK(eval_start[0].time >= last_arrive);
      CHECK(eval_start[0].time >= barrier[0].time);
      CHECK(eval_end[0].time == tl.t_measured);
    }
  }
}

TEST_CASE("simulation is deterministic down to the exported bytes") {
  ClusterConfig cfg = example_config(13, ScheduleMode::pipelined);
  IterationTimeline a = simulate_iteration(cfg);
  IterationTimeline b = simulate_iteration(cfg);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].node == b.events[i].node);
    CHECK(a.events[i].kind == b.events[i].kind);
  }
  std::ostringstream csv_a, csv_b, json_a, json_b;
  write_timeline_csv(csv_a, a);
  write_timeline_csv(csv_b, b);
  write_timeline_json(json_a, cfg, a);
  write_timeline_json(json_b, cfg, b);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(json_a.str() == json_b.str());
}

TEST_CASE("pipelined schedule never loses to the serialized one") {
  std::mt19937_64 rng(20240706);
  for (int i = 0; i < 100; ++i) {
    BsfParams p = random_params(rng);
    for (int k : {2, 3, 5, 16, 64}) {
      const double serial =
          simulate_iteration(
              ClusterConfig::from_params(p, k, ScheduleMode::serialized))
              .t_measured;
      const double pipe =
          simulate_iteration(
              ClusterConfig::from_params(p, k, ScheduleMode::pipelined))
              .t_measured;
      CHECK(pipe <= serial);
    }
  }
}

TEST_CASE("with one worker both schedules agree bit for bit") {
  std::mt19937_64 rng(20240707);
  for (int i = 0; i < 200; ++i) {
    BsfParams p = random_params(rng);
    const double serial =
        simulate_iteration(
            ClusterConfig::from_params(p, 1, ScheduleMode::serialized))
            .t_measured;
    const double pipe =
        simulate_iteration(
            ClusterConfig::from_params(p, 1, ScheduleMode::pipelined))
            .t_measured;
    CHECK(serial == pipe);
  }
}

TEST_CASE("uneven worker loads stretch the serialized compute phase") {
  ClusterConfig cfg;
  cfg.workers = 3;
  cfg.latency = 0.5;
  cfg.send_cost = 1.0;
  cfg.per_worker_compute = 10.0;
  cfg.compute_overrides = {2.0, 30.0, 4.0};
  cfg.receive_cost = 4.0;
  cfg.process_cost = 5.0;
  // 3 * 1.5 + 30 + 3 * 0.5 + 4 + 5
  CHECK(simulate_iteration(cfg).t_measured == 45.0);

  cfg.compute_overrides = {2.0, 30.0};
  CHECK_THROWS_AS(simulate_iteration(cfg), std::invalid_argument);
}

TEST_CASE("run replay is linear in the iteration count") {
  ClusterConfig cfg = example_config(1, ScheduleMode::serialized);
  RunTrace one = simulate_run(cfg, 1);
  CHECK(one.iteration_count() == 1);
  CHECK(one.total_time == one.iterations[0].t_measured);

  RunTrace seven = simulate_run(cfg, 7);
  REQUIRE(seven.iteration_count() == 7);
  CHECK(seven.total_time == 777.0);
  double sum = 0.0;
  for (const auto& it : seven.iterations) {
    sum += it.t_measured;
    CHECK(it.t_measured == one.iterations[0].t_measured);
    CHECK(it.events.size() == one.iterations[0].events.size());
  }
  CHECK(seven.total_time == sum);

  CHECK_THROWS_AS(simulate_run(cfg, 0), std::invalid_argument);
}

TEST_CASE("measured speedup reproduces the analytic curve") {
  BsfParams p;
  p.latency = 0.5;
  p.send_cost = 1.0;
  p.work_cost = 100.0;
  p.receive_cost = 4.0;
  p.process_cost = 5.0;

  auto pts = measured_speedup(p, {1, 10}, ScheduleMode::serialized);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].workers == 1);
  CHECK(pts[0].speedup == 1.0);
  CHECK(pts[1].t_measured == 39.0);
  CHECK(rel_err(pts[1].speedup, 1110.0 / 390.0) < 1e-12);

  std::mt19937_64 rng(20240708);
  for (int i = 0; i < 50; ++i) {
    BsfParams q = random_params(rng);
    auto curve = measured_speedup(q, {2, 5, 33, 100},
                                  ScheduleMode::serialized);
    for (const auto& pt : curve) {
      const double want =
          predict_speedup(q, static_cast<double>(pt.workers));
      CHECK(rel_err(pt.speedup, want) < 1e-12);
    }
  }
}

TEST_CASE("measured speedup rejects bad worker lists") {
  BsfParams p;
  p.work_cost = 10.0;
  CHECK_THROWS_AS(measured_speedup(p, {}, ScheduleMode::serialized),
                  std::invalid_argument);
  CHECK_THROWS_AS(measured_speedup(p, {1, 0}, ScheduleMode::serialized),
                  std::invalid_argument);
  BsfParams zero;
  CHECK_THROWS_AS(measured_speedup(zero, {1}, ScheduleMode::serialized),
                  std::invalid_argument);
}

TEST_CASE("cluster validation rejects malformed configs") {
  ClusterConfig cfg;
  cfg.workers = 0;
  CHECK_THROWS_AS(validate_cluster(cfg), std::invalid_argument);

  cfg = ClusterConfig{};
  cfg.latency = -1.0;
  CHECK_THROWS_AS(validate_cluster(cfg), std::invalid_argument);

  cfg = ClusterConfig{};
  cfg.per_worker_compute = std::nan("");
  CHECK_THROWS_AS(validate_cluster(cfg), std::invalid_argument);

  cfg = ClusterConfig{};
  cfg.compute_overrides = {1.0, -2.0};
  cfg.workers = 2;
  CHECK_THROWS_AS(validate_cluster(cfg), std::invalid_argument);

  CHECK_NOTHROW(validate_cluster(ClusterConfig{}));
  CHECK_THROWS_AS(ClusterConfig::from_params(BsfParams{}, 0,
                                             ScheduleMode::serialized),
                  std::invalid_argument);
}

TEST_CASE("timeline exports carry the documented shape") {
  ClusterConfig cfg = example_config(2, ScheduleMode::serialized);
  IterationTimeline tl = simulate_iteration(cfg);

  std::ostringstream csv;
  write_timeline_csv(csv, tl);
  std::istringstream lines(csv.str());
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "timestamp,node,kind");
  std::size_t rows = 0;
  bool saw_master = false, saw_w1 = false;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.find(",master,") != std::string::npos) saw_master = true;
    if (line.find(",w1,") != std::string::npos) saw_w1 = true;
  }
  CHECK(rows == tl.events.size());
  CHECK(saw_master);
  CHECK(saw_w1);

  std::ostringstream json;
  write_timeline_json(json, cfg, tl);
  const std::string doc = json.str();
  CHECK(doc.find("\"mode\": \"serialized\"") != std::string::npos);
  CHECK(doc.find("\"workers\": 2") != std::string::npos);
  CHECK(doc.find("\"t_measured\"") != std::string::npos);
  CHECK(doc.find("\"evaluate_end\"") != std::string::npos);
}
