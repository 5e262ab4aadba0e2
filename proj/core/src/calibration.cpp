#include "bsf/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

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

double rel_to(double value, double reference) {
  if (reference > 0.0) {
    return std::abs(value - reference) / reference;
  }
  return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

nlohmann::ordered_json params_to_json(const BsfParams& p) {
  nlohmann::ordered_json j;
  j["K"] = p.workers;
  j["L"] = p.latency;
  j["t_s"] = p.send_cost;
  j["t_w"] = p.work_cost;
  j["t_r"] = p.receive_cost;
  j["t_p"] = p.process_cost;
  return j;
}

BsfParams params_from_json(const nlohmann::json& j) {
  BsfParams p;
  p.workers = j.at("K").get<int>();
  p.latency = j.at("L").get<double>();
  p.send_cost = j.at("t_s").get<double>();
  p.work_cost = j.at("t_w").get<double>();
  p.receive_cost = j.at("t_r").get<double>();
  p.process_cost = j.at("t_p").get<double>();
  return p;
}

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double null_as_infinity(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

}  // namespace

void validate_comm(const CommCostSpec& comm) {
  require_finite_nonneg(comm.latency, "latency");
  require_finite_nonneg(comm.per_message, "per_message");
  require_finite_nonneg(comm.per_byte, "per_byte");
}

double message_cost(const CommCostSpec& comm, std::size_t bytes) {
  return comm.per_message + comm.per_byte * static_cast<double>(bytes);
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of an empty sample list");
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) {
    return values[mid];
  }
  return (values[mid - 1] + values[mid]) / 2.0;
}

namespace detail {

void flag_below_resolution(CalibrationResult& result) {
  if (result.params.work_cost < timer_resolution_floor_s) {
    result.flags.push_back(
        "t_w below timer resolution (median " +
        format_double(result.params.work_cost) + "s < " +
        format_double(timer_resolution_floor_s) + "s)");
  }
  if (result.params.process_cost < timer_resolution_floor_s) {
    result.flags.push_back(
        "t_p below timer resolution (median " +
        format_double(result.params.process_cost) + "s < " +
        format_double(timer_resolution_floor_s) + "s)");
  }
}

ValidationRow build_validation_row(const BsfParams& params, ScheduleMode mode,
                                   long long workers, double wall_median,
                                   double baseline_wall) {
  const double k = static_cast<double>(workers);
  ValidationRow row;
  row.workers = workers;
  row.t_predicted = predict_tk(params, k).total;
  row.t_simulated =
      simulate_iteration(
          ClusterConfig::from_params(params, static_cast<int>(workers), mode))
          .t_measured;
  row.t_measured = wall_median;
  row.sim_rel_error = rel_to(row.t_simulated, row.t_predicted);
  row.measured_rel_error = rel_to(row.t_measured, row.t_predicted);
  row.speedup_predicted = predict_speedup(params, k);
  row.speedup_measured =
      wall_median > 0.0 ? baseline_wall / wall_median
                        : std::numeric_limits<double>::infinity();
  return row;
}

}  // namespace detail

namespace {

nlohmann::ordered_json calibration_to_json(const CalibrationResult& result) {
  nlohmann::ordered_json cal;
  cal["params"] = params_to_json(result.params);
  cal["repetitions"] = result.repetitions;
  cal["flags"] = result.flags;
  nlohmann::ordered_json samples;
  samples["work"] = result.raw_samples.work;
  samples["process"] = result.raw_samples.process;
  samples["send"] = result.raw_samples.send;
  samples["receive"] = result.raw_samples.receive;
  samples["wall"] = result.raw_samples.wall;
  cal["samples"] = std::move(samples);
  return cal;
}

}  // namespace

void write_calibration_json(std::ostream& os, const CalibrationResult& result) {
  os << calibration_to_json(result).dump(2) << '\n';
}

void write_validation_json(std::ostream& os, const ValidationReport& report) {
  nlohmann::ordered_json doc;
  doc["payload"] = report.payload;
  doc["mode"] = schedule_mode_name(report.mode);
  doc["repetitions"] = report.repetitions;
  doc["calibration"] = calibration_to_json(report.calibration);

  nlohmann::ordered_json sc;
  sc["k_star"] = finite_or_null(report.scalability.k_star);
  sc["unbounded"] = report.scalability.unbounded;
  sc["k_opt"] = report.scalability.k_opt;
  sc["peak_speedup"] = finite_or_null(report.scalability.peak_speedup);
  sc["efficiency_at_opt"] = report.scalability.efficiency_at_opt;
  doc["scalability"] = std::move(sc);

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["K"] = row.workers;
    r["t_predicted"] = row.t_predicted;
    r["t_simulated"] = row.t_simulated;
    r["t_measured"] = row.t_measured;
    r["sim_rel_error"] = finite_or_null(row.sim_rel_error);
    r["measured_rel_error"] = finite_or_null(row.measured_rel_error);
    r["speedup_predicted"] = row.speedup_predicted;
    r["speedup_measured"] = finite_or_null(row.speedup_measured);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

ValidationReport read_validation_json(std::istream& is) {
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("validation report parse error: ") +
                             e.what());
  }
  try {
    ValidationReport report;
    report.payload = doc.at("payload").get<std::string>();
    report.mode = parse_schedule_mode(doc.at("mode").get<std::string>());
    report.repetitions = doc.at("repetitions").get<int>();

    const auto& cal = doc.at("calibration");
    report.calibration.params = params_from_json(cal.at("params"));
    report.calibration.repetitions = cal.at("repetitions").get<int>();
    report.calibration.flags =
        cal.at("flags").get<std::vector<std::string>>();
    const auto& samples = cal.at("samples");
    report.calibration.raw_samples.work =
        samples.at("work").get<std::vector<double>>();
    report.calibration.raw_samples.process =
        samples.at("process").get<std::vector<double>>();
    report.calibration.raw_samples.send =
        samples.at("send").get<std::vector<double>>();
    report.calibration.raw_samples.receive =
        samples.at("receive").get<std::vector<double>>();
    report.calibration.raw_samples.wall =
        samples.at("wall").get<std::vector<double>>();

    const auto& sc = doc.at("scalability");
    report.scalability.k_star = null_as_infinity(sc.at("k_star"));
    report.scalability.unbounded = sc.at("unbounded").get<bool>();
    report.scalability.k_opt = sc.at("k_opt").get<long long>();
    report.scalability.peak_speedup = null_as_infinity(sc.at("peak_speedup"));
    report.scalability.efficiency_at_opt =
        sc.at("efficiency_at_opt").get<double>();

    for (const auto& r : doc.at("rows")) {
      ValidationRow row;
      row.workers = r.at("K").get<long long>();
      row.t_predicted = r.at("t_predicted").get<double>();
      row.t_simulated = r.at("t_simulated").get<double>();
      row.t_measured = r.at("t_measured").get<double>();
      row.sim_rel_error = null_as_infinity(r.at("sim_rel_error"));
      row.measured_rel_error = null_as_infinity(r.at("measured_rel_error"));
      row.speedup_predicted = r.at("speedup_predicted").get<double>();
      row.speedup_measured = null_as_infinity(r.at("speedup_measured"));
      report.rows.push_back(row);
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("validation report schema error: ") +
                             e.what());
  }
}

}  // namespace bsf
