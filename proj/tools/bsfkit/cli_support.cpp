#include "cli_support.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bsf/calibration.hpp"
#include "bsf/cost_model.hpp"
#include "bsf/matrix_io.hpp"
#include "bsf/payloads.hpp"
#include "bsf/simulator.hpp"
#include "bsf/text.hpp"

namespace bsfcli {

namespace {

constexpr long long max_k_entries = 1'000'000;

long long parse_count(const std::string& token, const char* what) {
  long long value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw std::invalid_argument(std::string("bad ") + what + " \"" + token +
                                "\" in worker-count spec");
  }
  if (value < 1) {
    throw std::invalid_argument(std::string(what) + " in worker-count spec " +
                                "must be >= 1, got " + token);
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) return parts;
    start = pos + 1;
  }
}

std::string fmt(double v) { return bsf::format_double(v); }

// Output routing shared by every subcommand: with --out the document goes
// to the file and the human summary to stdout; without it the document
// alone goes to stdout (table documents embed their own summary).
void deliver(const CliValues& v, const std::string& summary,
             const std::function<void(std::ostream&)>& write_doc) {
  if (v.out.empty()) {
    write_doc(std::cout);
    return;
  }
  std::ofstream file(v.out);
  if (!file) {
    throw std::invalid_argument("cannot open output file \"" + v.out + "\"");
  }
  write_doc(file);
  if (!file) {
    throw std::invalid_argument("failed writing output file \"" + v.out +
                                "\"");
  }
  std::cout << summary;
}

bsf::BsfParams params_from(const CliValues& v) {
  bsf::BsfParams p;
  p.workers = 1;
  p.latency = v.latency;
  p.send_cost = v.send_cost;
  p.work_cost = v.work_cost;
  p.receive_cost = v.receive_cost;
  p.process_cost = v.process_cost;
  bsf::validate_params(p);
  return p;
}

bsf::CommCostSpec comm_from(const CliValues& v) {
  bsf::CommCostSpec comm;
  comm.latency = v.comm_latency;
  comm.per_message = v.comm_per_message;
  comm.per_byte = v.comm_per_byte;
  bsf::validate_comm(comm);
  return comm;
}

std::vector<long long> require_k(const CliValues& v, const char* cmd) {
  if (v.k_spec.empty()) {
    throw std::invalid_argument(std::string(cmd) + " requires --K");
  }
  return parse_k_spec(v.k_spec);
}

std::string scalability_summary(const bsf::BsfParams& p,
                                const bsf::ScalabilityReport& rep) {
  std::ostringstream os;
  if (rep.unbounded) {
    os << "K_star = unbounded (2L + t_s = 0: adding workers always helps)\n";
  } else {
    os << "K_star = " << fmt(rep.k_star) << "\n";
  }
  if (p.work_cost == 0.0) {
    os << "K_opt = 1 (t_w = 0: there is no work to distribute)\n";
  } else if (rep.unbounded) {
    os << "K_opt = unbounded\n";
  } else {
    os << "K_opt = " << rep.k_opt << "\n";
  }
  os << "a_max = " << fmt(rep.peak_speedup) << "\n";
  os << "e_at_opt = " << fmt(rep.efficiency_at_opt) << "\n";
  return os.str();
}

void write_sweep_table(std::ostream& os,
                       const std::vector<bsf::SweepRow>& points) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(points.size());
  for (const auto& pt : points) {
    rows.push_back({std::to_string(pt.workers), fmt(pt.t_k), fmt(pt.speedup),
                    fmt(pt.efficiency_exact), fmt(pt.efficiency_approx)});
  }
  render_table(
      os, {"K", "T_K", "speedup", "efficiency_exact", "efficiency_approx"},
      rows);
}

std::vector<bsf::SweepRow> sweep_points(const bsf::BsfParams& p,
                                          const std::vector<long long>& ks) {
  std::vector<bsf::SweepRow> points;
  points.reserve(ks.size());
  for (long long k : ks) points.push_back(bsf::evaluate_point(p, k));
  return points;
}

void write_curve_csv(std::ostream& os,
                     const std::vector<bsf::MeasuredPoint>& pts) {
  os << "K,T_measured,speedup\n";
  for (const auto& pt : pts) {
    os << pt.workers << ',' << fmt(pt.t_measured) << ',' << fmt(pt.speedup)
       << '\n';
  }
}

void write_curve_json(std::ostream& os,
                      const std::vector<bsf::MeasuredPoint>& pts) {
  os << "[\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << "  {\"K\": " << pts[i].workers
       << ", \"T_measured\": " << fmt(pts[i].t_measured)
       << ", \"speedup\": " << fmt(pts[i].speedup) << "}"
       << (i + 1 < pts.size() ? "," : "") << "\n";
  }
  os << "]\n";
}

void write_curve_table(std::ostream& os,
                       const std::vector<bsf::MeasuredPoint>& pts) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(pts.size());
  for (const auto& pt : pts) {
    rows.push_back(
        {std::to_string(pt.workers), fmt(pt.t_measured), fmt(pt.speedup)});
  }
  render_table(os, {"K", "T_measured", "speedup"}, rows);
}

void write_timeline_table(std::ostream& os,
                          const bsf::IterationTimeline& timeline) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(timeline.events.size());
  for (const auto& ev : timeline.events) {
    rows.push_back(
        {fmt(ev.time), bsf::node_name(ev.node), bsf::event_kind_name(ev.kind)});
  }
  render_table(os, {"timestamp", "node", "kind"}, rows);
}

std::string calibration_summary(const CliValues& v,
                                const bsf::CalibrationResult& cal) {
  std::ostringstream os;
  os << "payload = " << v.payload << "\n";
  os << "repetitions = " << cal.repetitions << "\n";
  os << "L = " << fmt(cal.params.latency) << "\n";
  os << "t_s = " << fmt(cal.params.send_cost) << "\n";
  os << "t_w = " << fmt(cal.params.work_cost) << "\n";
  os << "t_r = " << fmt(cal.params.receive_cost) << "\n";
  os << "t_p = " << fmt(cal.params.process_cost) << "\n";
  for (const auto& flag : cal.flags) os << "flag: " << flag << "\n";
  return os.str();
}

void write_calibration_csv(std::ostream& os,
                           const bsf::CalibrationResult& cal) {
  os << "param,value\n";
  os << "K," << cal.params.workers << '\n';
  os << "L," << fmt(cal.params.latency) << '\n';
  os << "t_s," << fmt(cal.params.send_cost) << '\n';
  os << "t_w," << fmt(cal.params.work_cost) << '\n';
  os << "t_r," << fmt(cal.params.receive_cost) << '\n';
  os << "t_p," << fmt(cal.params.process_cost) << '\n';
}

void write_validation_csv(std::ostream& os,
                          const bsf::ValidationReport& report) {
  os << "K,t_predicted,t_simulated,t_measured,sim_rel_error,"
        "measured_rel_error,speedup_predicted,speedup_measured\n";
  for (const auto& row : report.rows) {
    os << row.workers << ',' << fmt(row.t_predicted) << ','
       << fmt(row.t_simulated) << ',' << fmt(row.t_measured) << ','
       << fmt(row.sim_rel_error) << ',' << fmt(row.measured_rel_error) << ','
       << fmt(row.speedup_predicted) << ',' << fmt(row.speedup_measured)
       << '\n';
  }
}

void write_validation_table(std::ostream& os,
                            const bsf::ValidationReport& report) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(report.rows.size());
  for (const auto& row : report.rows) {
    rows.push_back({std::to_string(row.workers), fmt(row.t_predicted),
                    fmt(row.t_simulated), fmt(row.t_measured),
                    fmt(row.sim_rel_error), fmt(row.measured_rel_error),
                    fmt(row.speedup_predicted), fmt(row.speedup_measured)});
  }
  render_table(os,
               {"K", "t_predicted", "t_simulated", "t_measured",
                "sim_rel_error", "measured_rel_error", "speedup_predicted",
                "speedup_measured"},
               rows);
}

long long checked_bytes(long long value, const char* flag) {
  if (value < 0) {
    throw std::invalid_argument(std::string(flag) + " must be >= 0");
  }
  return value;
}

// Builds the selected payload program and hands it to `fn`; the three
// program types differ, so the continuation is generic.
template <typename Fn>
auto with_program(const CliValues& v, Fn&& fn) {
  if (v.payload.empty()) {
    throw std::invalid_argument(
        "a payload is required (--payload jacobi|gd|synthetic)");
  }
  if (v.payload == "jacobi" || v.payload == "gd") {
    if (v.matrix_path.empty() != v.rhs_path.empty()) {
      throw std::invalid_argument("--matrix and --rhs must be given together");
    }
    if (v.matrix_path.empty() && !v.x0_path.empty()) {
      throw std::invalid_argument("--x0 needs --matrix and --rhs");
    }
    if (v.matrix_path.empty() && v.n < 1) {
      throw std::invalid_argument("--n must be >= 1");
    }
    bsf::LinearSystem sys =
        v.matrix_path.empty()
            ? bsf::make_diagonally_dominant_system(
                  static_cast<std::size_t>(v.n), v.seed)
            : bsf::load_linear_system(v.matrix_path, v.rhs_path, v.x0_path);
    if (v.payload == "jacobi") {
      return fn(bsf::jacobi_program(std::move(sys), v.tol));
    }
    return fn(bsf::gradient_descent_program(
        bsf::make_least_squares(std::move(sys.a), std::move(sys.b),
                                std::move(sys.x0)),
        v.tol));
  }
  if (v.payload == "synthetic") {
    bsf::SyntheticSpec spec;
    spec.compute_ms = v.compute_ms;
    spec.order_bytes = static_cast<std::size_t>(
        checked_bytes(v.order_bytes, "--order-bytes"));
    spec.result_bytes = static_cast<std::size_t>(
        checked_bytes(v.result_bytes, "--result-bytes"));
    spec.iterations = v.payload_iterations;
    return fn(bsf::synthetic_program(spec));
  }
  throw std::invalid_argument("unknown payload \"" + v.payload +
                              "\" (expected jacobi, gd or synthetic)");
}

}  // namespace

std::vector<long long> parse_k_spec(const std::string& spec) {
  if (spec.empty()) {
    throw std::invalid_argument("empty worker-count spec");
  }
  std::vector<long long> ks;
  if (spec.find(':') != std::string::npos) {
    auto parts = split(spec, ':');
    if (parts.size() > 3) {
      throw std::invalid_argument("worker-count range \"" + spec +
                                  "\" has too many ':' fields");
    }
    const long long lo = parse_count(parts[0], "range lower bound");
    const long long hi = parse_count(parts[1], "range upper bound");
    const long long step =
        parts.size() == 3 ? parse_count(parts[2], "range step") : 1;
    if (hi < lo) {
      throw std::invalid_argument("worker-count range \"" + spec +
                                  "\" runs backwards");
    }
    const long long count = (hi - lo) / step + 1;
    if (count > max_k_entries) {
      throw std::invalid_argument("worker-count range \"" + spec +
                                  "\" expands to more than 1000000 entries");
    }
    ks.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) ks.push_back(lo + i * step);
    return ks;
  }
  for (const auto& token : split(spec, ',')) {
    ks.push_back(parse_count(token, "worker count"));
  }
  return ks;
}

OutputFormat parse_format(const std::string& name) {
  if (name == "table") return OutputFormat::table;
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format \"" + name +
                              "\" (expected table, csv or json)");
}

void render_table(std::ostream& os, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw std::invalid_argument("table row width mismatch");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  auto emit_row = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) line += "  ";
      line += cells[c];
      if (c + 1 < cells.size()) {
        line.append(width[c] - cells[c].size(), ' ');
      }
    }
    os << line << '\n';
  };
  emit_row(header);
  for (const auto& row : rows) emit_row(row);
}

int run_predict(const CliValues& v) {
  const bsf::BsfParams p = params_from(v);
  const bsf::ScalabilityReport rep = bsf::scalability_bound(p);
  const std::string summary = scalability_summary(p, rep);
  const OutputFormat format = parse_format(v.format);

  if (!v.k_spec.empty()) {
    const auto points = sweep_points(p, parse_k_spec(v.k_spec));
    deliver(v, summary, [&](std::ostream& os) {
      switch (format) {
        case OutputFormat::table:
          os << summary << '\n';
          write_sweep_table(os, points);
          break;
        case OutputFormat::csv:
          bsf::write_sweep_csv(os, points);
          break;
        case OutputFormat::json:
          bsf::write_sweep_json(os, points);
          break;
      }
    });
    return 0;
  }

  deliver(v, summary, [&](std::ostream& os) {
    switch (format) {
      case OutputFormat::table:
        os << summary;
        break;
      case OutputFormat::csv:
        os << "k_star,unbounded,k_opt,peak_speedup,efficiency_at_opt\n"
           << fmt(rep.k_star) << ',' << (rep.unbounded ? "true" : "false")
           << ',' << rep.k_opt << ',' << fmt(rep.peak_speedup) << ','
           << fmt(rep.efficiency_at_opt) << '\n';
        break;
      case OutputFormat::json:
        os << "{\n"
           << "  \"k_star\": "
           << (rep.unbounded ? "null" : fmt(rep.k_star)) << ",\n"
           << "  \"unbounded\": " << (rep.unbounded ? "true" : "false")
           << ",\n"
           << "  \"k_opt\": " << rep.k_opt << ",\n"
           << "  \"peak_speedup\": "
           << (std::isinf(rep.peak_speedup) ? "null" : fmt(rep.peak_speedup))
           << ",\n"
           << "  \"efficiency_at_opt\": " << fmt(rep.efficiency_at_opt)
           << "\n}\n";
        break;
    }
  });
  return 0;
}

int run_sweep(const CliValues& v) {
  const bsf::BsfParams p = params_from(v);
  const auto points = sweep_points(p, require_k(v, "sweep"));
  const OutputFormat format = parse_format(v.format);
  deliver(v, "swept " + std::to_string(points.size()) + " worker counts\n",
          [&](std::ostream& os) {
            switch (format) {
              case OutputFormat::table:
                write_sweep_table(os, points);
                break;
              case OutputFormat::csv:
                bsf::write_sweep_csv(os, points);
                break;
              case OutputFormat::json:
                bsf::write_sweep_json(os, points);
                break;
            }
          });
  return 0;
}

int run_simulate(const CliValues& v) {
  const bsf::BsfParams p = params_from(v);
  const bsf::ScheduleMode mode = bsf::parse_schedule_mode(v.mode);
  const auto ks = require_k(v, "simulate");
  const OutputFormat format = parse_format(v.format);

  if (ks.size() == 1) {
    const auto cfg =
        bsf::ClusterConfig::from_params(p, static_cast<int>(ks[0]), mode);
    const auto timeline = bsf::simulate_iteration(cfg);
    std::ostringstream sum;
    sum << "K = " << ks[0] << "\n"
        << "mode = " << bsf::schedule_mode_name(mode) << "\n"
        << "T_measured = " << fmt(timeline.t_measured) << "\n";
    deliver(v, sum.str(), [&](std::ostream& os) {
      switch (format) {
        case OutputFormat::table:
          os << sum.str() << '\n';
          write_timeline_table(os, timeline);
          break;
        case OutputFormat::csv:
          bsf::write_timeline_csv(os, timeline);
          break;
        case OutputFormat::json:
          bsf::write_timeline_json(os, cfg, timeline);
          break;
      }
    });
    return 0;
  }

  const auto pts = bsf::measured_speedup(p, ks, mode);
  const auto peak = std::max_element(
      pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.speedup < b.speedup;
      });
  std::ostringstream sum;
  sum << "peak measured speedup " << fmt(peak->speedup) << " at K = "
      << peak->workers << "\n";
  deliver(v, sum.str(), [&](std::ostream& os) {
    switch (format) {
      case OutputFormat::table:
        os << sum.str() << '\n';
        write_curve_table(os, pts);
        break;
      case OutputFormat::csv:
        write_curve_csv(os, pts);
        break;
      case OutputFormat::json:
        write_curve_json(os, pts);
        break;
    }
  });
  return 0;
}

int run_calibrate(const CliValues& v) {
  const bsf::CommCostSpec comm = comm_from(v);
  const auto cal = with_program(v, [&](const auto& program) {
    return bsf::calibrate(program, v.repetitions, comm);
  });
  const std::string summary = calibration_summary(v, cal);
  const OutputFormat format = parse_format(v.format);
  deliver(v, summary, [&](std::ostream& os) {
    switch (format) {
      case OutputFormat::table:
        os << summary;
        break;
      case OutputFormat::csv:
        write_calibration_csv(os, cal);
        break;
      case OutputFormat::json:
        bsf::write_calibration_json(os, cal);
        break;
    }
  });
  return 0;
}

int run_validate(const CliValues& v) {
  const bsf::CommCostSpec comm = comm_from(v);
  const bsf::ScheduleMode mode = bsf::parse_schedule_mode(v.mode);
  const auto ks = require_k(v, "validate");
  const auto report = with_program(v, [&](const auto& program) {
    return bsf::validate_program(program, ks, v.repetitions, comm, mode);
  });

  std::ostringstream sum;
  sum << "payload = " << report.payload << "\n"
      << "mode = " << bsf::schedule_mode_name(report.mode) << "\n"
      << "repetitions = " << report.repetitions << "\n";
  sum << scalability_summary(report.calibration.params, report.scalability);
  double max_sim = 0.0;
  double max_measured = 0.0;
  for (const auto& row : report.rows) {
    max_sim = std::max(max_sim, row.sim_rel_error);
    max_measured = std::max(max_measured, row.measured_rel_error);
  }
  sum << "max sim_rel_error = " << fmt(max_sim) << "\n"
      << "max measured_rel_error = " << fmt(max_measured) << "\n";

  const OutputFormat format = parse_format(v.format);
  deliver(v, sum.str(), [&](std::ostream& os) {
    switch (format) {
      case OutputFormat::table:
        os << sum.str() << '\n';
        write_validation_table(os, report);
        break;
      case OutputFormat::csv:
        write_validation_csv(os, report);
        break;
      case OutputFormat::json:
        bsf::write_validation_json(os, report);
        break;
    }
  });
  return 0;
}

}  // namespace bsfcli
