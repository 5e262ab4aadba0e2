#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bsfcli {

// Worker-count grammar accepted by --K:
//   "8"        one count
//   "1,2,4"    explicit list
//   "2:6"      inclusive range, step 1
//   "2:20:3"   inclusive range with step
// Counts must be >= 1; a range may expand to at most 1000000 entries.
std::vector<long long> parse_k_spec(const std::string& spec);

enum class OutputFormat { table, csv, json };

OutputFormat parse_format(const std::string& name);

// Left-aligned columns padded to their widest cell, two-space gutter,
// no trailing spaces. Every row must have one cell per header.
void render_table(std::ostream& os, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows);

// One flat bag for every flag the tool accepts; each subcommand reads
// only its own subset. Values arrive from flags or a JSON config file.
struct CliValues {
  // analytic cost-model parameters
  double latency = 0.0;       // --L
  double send_cost = 0.0;     // --ts
  double work_cost = 0.0;     // --tw
  double receive_cost = 0.0;  // --tr
  double process_cost = 0.0;  // --tp

  // shared controls
  std::string k_spec;               // --K
  std::string mode = "serialized";  // --mode
  std::string format = "table";     // --format
  std::string out;                  // --out, empty = stdout
  std::uint64_t seed = 0;           // --seed
  int repetitions = 3;              // --repetitions

  // payload selection and shape
  std::string payload;                // --payload: jacobi | gd | synthetic
  long long n = 64;                   // --n, generated problem size
  double tol = 1e-10;                 // --tol
  double compute_ms = 0.0;            // --compute-ms
  long long order_bytes = 0;          // --order-bytes
  long long result_bytes = 0;         // --result-bytes
  long long payload_iterations = 10;  // --payload-iterations
  std::string matrix_path;            // --matrix
  std::string rhs_path;               // --rhs
  std::string x0_path;                // --x0

  // wire-cost model used by calibrate/validate
  double comm_latency = 0.0;      // --comm-latency
  double comm_per_message = 0.0;  // --comm-per-message
  double comm_per_byte = 0.0;     // --comm-per-byte
};

// Subcommand bodies. Each throws std::invalid_argument for unusable
// values and lets bsf::PayloadError pass through; main maps exceptions
// to exit codes.
int run_predict(const CliValues& v);
int run_sweep(const CliValues& v);
int run_simulate(const CliValues& v);
int run_calibrate(const CliValues& v);
int run_validate(const CliValues& v);

}  // namespace bsfcli
