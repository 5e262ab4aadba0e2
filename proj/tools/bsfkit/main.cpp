#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "bsf/runtime.hpp"
#include "cli_support.hpp"

namespace {

using bsfcli::CliValues;

std::string key_of(const std::string& flag) {
  auto pos = flag.find_first_not_of('-');
  return pos == std::string::npos ? flag : flag.substr(pos);
}

// Ties each CLI11 option to a setter so a --config JSON file can fill in
// any value that was not passed explicitly on the command line.
class OptionBag {
 public:
  explicit OptionBag(CLI::App* cmd) : cmd_(cmd) {}

  void add_real(const std::string& flag, double& target,
                const std::string& desc) {
    insert(flag, cmd_->add_option(flag, target, desc)->capture_default_str(),
           [&target](const nlohmann::json& j) { target = j.get<double>(); });
  }

  void add_int(const std::string& flag, long long& target,
               const std::string& desc) {
    insert(flag, cmd_->add_option(flag, target, desc)->capture_default_str(),
           [&target](const nlohmann::json& j) { target = j.get<long long>(); });
  }

  void add_int(const std::string& flag, int& target, const std::string& desc) {
    insert(flag, cmd_->add_option(flag, target, desc)->capture_default_str(),
           [&target](const nlohmann::json& j) { target = j.get<int>(); });
  }

  void add_seed(const std::string& flag, std::uint64_t& target,
                const std::string& desc) {
    insert(flag, cmd_->add_option(flag, target, desc)->capture_default_str(),
           [&target](const nlohmann::json& j) {
             target = j.get<std::uint64_t>();
           });
  }

  void add_text(const std::string& flag, std::string& target,
                const std::string& desc, bool show_default = false) {
    auto* opt = cmd_->add_option(flag, target, desc);
    if (show_default) opt->capture_default_str();
    insert(flag, opt, [&target](const nlohmann::json& j) {
      target = j.get<std::string>();
    });
  }

  // --K also accepts a JSON integer or array of integers in config files.
  void add_k(std::string& target, const std::string& desc) {
    insert("--K", cmd_->add_option("--K", target, desc),
           [&target](const nlohmann::json& j) {
             if (j.is_string()) {
               target = j.get<std::string>();
             } else if (j.is_number_integer()) {
               target = std::to_string(j.get<long long>());
             } else if (j.is_array()) {
               std::string spec;
               for (const auto& entry : j) {
                 if (!entry.is_number_integer()) {
                   throw std::invalid_argument(
                       "K array entries must be integers");
                 }
                 if (!spec.empty()) spec += ',';
                 spec += std::to_string(entry.get<long long>());
               }
               target = spec;
             } else {
               throw std::invalid_argument(
                   "K must be a string, integer or integer array");
             }
           });
  }

  void apply_config(const nlohmann::json& cfg, const std::string& cmd_name) {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      auto found = bindings_.find(it.key());
      if (found == bindings_.end()) {
        throw std::invalid_argument("config key \"" + it.key() +
                                    "\" is not an option of " + cmd_name);
      }
      if (found->second.opt->count() > 0) continue;  // explicit flag wins
      try {
        found->second.apply(it.value());
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config key \"" + it.key() +
                                    "\": " + e.what());
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config key \"" + it.key() +
                                    "\": " + e.what());
      }
    }
  }

 private:
  struct Binding {
    CLI::Option* opt;
    std::function<void(const nlohmann::json&)> apply;
  };

  void insert(const std::string& flag, CLI::Option* opt,
              std::function<void(const nlohmann::json&)> apply) {
    bindings_[key_of(flag)] = Binding{opt, std::move(apply)};
  }

  CLI::App* cmd_;
  std::map<std::string, Binding> bindings_;
};

nlohmann::json load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::invalid_argument("cannot open config file \"" + path + "\"");
  }
  nlohmann::json cfg;
  try {
    file >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file \"" + path +
                                "\": " + e.what());
  }
  if (!cfg.is_object()) {
    throw std::invalid_argument("config file \"" + path +
                                "\" must hold a JSON object");
  }
  return cfg;
}

void add_model_params(OptionBag& bag, CliValues& v) {
  bag.add_real("--L", v.latency, "one-way message latency L");
  bag.add_real("--ts", v.send_cost, "per-order send cost t_s");
  bag.add_real("--tw", v.work_cost, "total per-iteration compute cost t_w");
  bag.add_real("--tr", v.receive_cost, "per-result ingest cost t_r");
  bag.add_real("--tp", v.process_cost, "master evaluate cost t_p");
}

void add_output(OptionBag& bag, CliValues& v) {
  bag.add_text("--format", v.format, "output format: table, csv or json",
               true);
  bag.add_text("--out", v.out, "write the document to this file");
}

void add_payload(OptionBag& bag, CliValues& v) {
  bag.add_text("--payload", v.payload, "payload: jacobi, gd or synthetic");
  bag.add_int("--n", v.n, "generated problem size");
  bag.add_seed("--seed", v.seed, "problem generator seed");
  bag.add_real("--tol", v.tol, "convergence tolerance");
  bag.add_real("--compute-ms", v.compute_ms,
               "synthetic: busy-spin per iteration, milliseconds");
  bag.add_int("--order-bytes", v.order_bytes,
              "synthetic: order wire size in bytes");
  bag.add_int("--result-bytes", v.result_bytes,
              "synthetic: combined result wire size in bytes");
  bag.add_int("--payload-iterations", v.payload_iterations,
              "synthetic: fixed iteration count");
  bag.add_text("--matrix", v.matrix_path, "matrix file (dense text format)");
  bag.add_text("--rhs", v.rhs_path, "right-hand-side vector file");
  bag.add_text("--x0", v.x0_path, "starting vector file");
  bag.add_real("--comm-latency", v.comm_latency,
               "modeled one-way latency, seconds");
  bag.add_real("--comm-per-message", v.comm_per_message,
               "modeled fixed cost per message, seconds");
  bag.add_real("--comm-per-byte", v.comm_per_byte,
               "modeled cost per byte, seconds");
  bag.add_int("--repetitions", v.repetitions,
              "iteration samples per measurement");
}

struct Subcommand {
  CLI::App* cmd = nullptr;
  std::unique_ptr<OptionBag> bag;
  std::string config_path;
  int (*runner)(const CliValues&) = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CliValues v;
  CLI::App app{
      "Cost model, schedule simulator and validation harness for "
      "master-worker iterative programs"};
  app.require_subcommand(1);

  std::deque<Subcommand> subs;
  auto make_sub = [&](const std::string& name, const std::string& desc,
                      int (*runner)(const CliValues&)) -> Subcommand& {
    subs.emplace_back();
    Subcommand& s = subs.back();
    s.cmd = app.add_subcommand(name, desc);
    s.bag = std::make_unique<OptionBag>(s.cmd);
    s.runner = runner;
    s.cmd->add_option("--config", s.config_path,
                      "JSON file of option values; explicit flags win");
    return s;
  };

  {
    Subcommand& s = make_sub(
        "predict", "Report the scalability bound for given parameters",
        bsfcli::run_predict);
    add_model_params(*s.bag, v);
    s.bag->add_k(v.k_spec, "also sweep these worker counts");
    add_output(*s.bag, v);
  }
  {
    Subcommand& s = make_sub(
        "sweep", "Tabulate predicted time, speedup and efficiency over K",
        bsfcli::run_sweep);
    add_model_params(*s.bag, v);
    s.bag->add_k(v.k_spec, "worker counts to sweep");
    add_output(*s.bag, v);
  }
  {
    Subcommand& s = make_sub(
        "simulate",
        "Replay one iteration as a discrete-event schedule, or sweep "
        "simulated speedup over K",
        bsfcli::run_simulate);
    add_model_params(*s.bag, v);
    s.bag->add_k(v.k_spec, "one K for a timeline, several for a curve");
    s.bag->add_text("--mode", v.mode, "schedule: serialized or pipelined",
                    true);
    add_output(*s.bag, v);
  }
  {
    Subcommand& s = make_sub(
        "calibrate",
        "Measure cost-model parameters from single-worker payload runs",
        bsfcli::run_calibrate);
    add_payload(*s.bag, v);
    add_output(*s.bag, v);
  }
  {
    Subcommand& s = make_sub(
        "validate",
        "Calibrate, predict, simulate and execute a payload side by side",
        bsfcli::run_validate);
    add_payload(*s.bag, v);
    s.bag->add_k(v.k_spec, "worker counts to validate");
    s.bag->add_text("--mode", v.mode, "schedule: serialized or pipelined",
                    true);
    add_output(*s.bag, v);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (auto& s : subs) {
      if (s.cmd->parsed()) {
        if (!s.config_path.empty()) {
          s.bag->apply_config(load_config(s.config_path), s.cmd->get_name());
        }
        return s.runner(v);
      }
    }
  } catch (const bsf::PayloadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
