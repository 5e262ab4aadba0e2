#include "bsf/runtime.hpp"

#include <ostream>

#include "bsf/text.hpp"

namespace bsf {

namespace {

std::string describe(long long iteration, const std::string& phase,
                     const std::string& what) {
  return "payload error in " + phase + " at iteration " +
         std::to_string(iteration) + ": " + what;
}

}  // namespace

PayloadError::PayloadError(long long iteration, std::string phase,
                           const std::string& what)
    : std::runtime_error(describe(iteration, phase, what)),
      iteration_(iteration),
      phase_(std::move(phase)) {}

void write_timing_csv(std::ostream& os,
                      const std::vector<IterationTiming>& log) {
  os << "iteration,phase,duration\n";
  for (const auto& t : log) {
    os << t.iteration << ",make_order," << format_double(t.make_order_s)
       << '\n';
    os << t.iteration << ",dispatch," << format_double(t.dispatch_s) << '\n';
    os << t.iteration << ",wait," << format_double(t.wait_s) << '\n';
    os << t.iteration << ",reduce," << format_double(t.reduce_s) << '\n';
    os << t.iteration << ",check," << format_double(t.check_s) << '\n';
  }
}

}  // namespace bsf
