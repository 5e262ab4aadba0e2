#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bsf/channel.hpp"

// Executable master-worker skeleton. A program supplies the five payload
// callbacks (init, make_order, worker_step, reduce, exit_condition) plus
// finalize; the skeleton owns the iteration loop, the broadcast/gather
// plumbing and per-phase instrumentation.

namespace bsf {

/// Contiguous block of the problem data owned by one worker.
struct Slice {
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const Slice& a, const Slice& b) {
    return a.offset == b.offset && a.length == b.length;
  }
};

/// Block distribution of n_items over `workers` slices whose lengths
/// differ by at most one.
struct DataPartition {
  std::size_t n_items = 0;
  int workers = 1;
  std::vector<Slice> slices;
};

/// First (n_items mod workers) slices get the ceiling share, the rest the
/// floor share. workers < 1 is rejected.
DataPartition partition(std::size_t n_items, int workers);

/// A payload callback threw: carries which phase and which iteration.
class PayloadError : public std::runtime_error {
 public:
  PayloadError(long long iteration, std::string phase, const std::string& what);

  long long iteration() const { return iteration_; }
  const std::string& phase() const { return phase_; }

 private:
  long long iteration_;
  std::string phase_;
};

enum class RunOutcome {
  converged,        // exit_condition satisfied
  iteration_limit,  // cutoff hit first; not an error
};

enum class ExecutionPolicy {
  threaded,    // one thread per worker, live for the whole run
  sequential,  // workers emulated in rank order on the calling thread
};

struct RunOptions {
  long long max_iterations = 1'000'000;
  ExecutionPolicy policy = ExecutionPolicy::threaded;
};

/// Master-side wall times of one iteration, in seconds. The five phase
/// fields partition the iteration: their sum accounts for wall_s up to
/// instrumentation overhead. compute_max_s is the slowest worker's own
/// step time (contained within wait_s, not an additional phase).
struct IterationTiming {
  long long iteration = 0;
  double make_order_s = 0.0;
  double dispatch_s = 0.0;
  double wait_s = 0.0;
  double reduce_s = 0.0;
  double check_s = 0.0;
  double wall_s = 0.0;
  double compute_max_s = 0.0;
  std::size_t order_bytes = 0;
  std::size_t result_bytes = 0;
};

/// CSV with header iteration,phase,duration; one row per phase per
/// iteration in order make_order, dispatch, wait, reduce, check.
void write_timing_csv(std::ostream& os,
                      const std::vector<IterationTiming>& log);

/// An iterative master-worker program over four payload types: the global
/// State held by the master, the Order broadcast to workers, the Partial
/// result returned by each worker, and the final Output record.
///
/// worker_step must depend only on its arguments; it runs concurrently
/// with the other workers' steps. reduce always receives the partials in
/// worker-rank order whatever order the workers finish in.
template <class State, class Order, class Partial, class Output>
struct BsfProgram {
  std::string name;
  std::size_t n_items = 0;

  std::function<State()> init;
  std::function<Order(const State&)> make_order;
  std::function<Partial(const Order&, Slice, int)> worker_step;
  std::function<State(const std::vector<Partial>&, const State&)> reduce;
  std::function<bool(const State&)> exit_condition;
  std::function<Output(const State&)> finalize;

  // Optional wire-size hooks used by calibration; return the serialized
  // byte size of one order message / one partial result.
  std::function<std::size_t(const Order&)> order_size;
  std::function<std::size_t(const Partial&)> result_size;
};

template <class Output>
struct RunResult {
  Output output{};
  long long iterations = 0;
  RunOutcome outcome = RunOutcome::converged;
  std::vector<IterationTiming> timing;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <class F, class... Args>
auto guarded(long long iteration, const char* phase, F&& f, Args&&... args) {
  try {
    return std::invoke(std::forward<F>(f), std::forward<Args>(args)...);
  } catch (const PayloadError&) {
    throw;
  } catch (const std::exception& e) {
    throw PayloadError(iteration, phase, e.what());
  } catch (...) {
    throw PayloadError(iteration, phase, "unknown payload error");
  }
}

template <class Partial>
struct WorkerReply {
  double seconds = 0.0;
  std::optional<Partial> partial;
  std::exception_ptr error;
};

}  // namespace detail

/// Runs `program` on `workers` in-process workers until exit_condition
/// holds or opts.max_iterations is reached. The exit condition is checked
/// on the initial state (a program converged at init runs zero body
/// iterations) and then once per iteration, after reduce.
template <class State, class Order, class Partial, class Output>
RunResult<Output> run_bsf(const BsfProgram<State, Order, Partial, Output>& program,
                          int workers, RunOptions opts = {}) {
  using Clock = std::chrono::steady_clock;
  using Reply = detail::WorkerReply<Partial>;

  if (workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
  if (opts.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be >= 1");
  }
  if (!program.init || !program.make_order || !program.worker_step ||
      !program.reduce || !program.exit_condition || !program.finalize) {
    throw std::invalid_argument("program is missing a required callback");
  }

  const DataPartition part = partition(program.n_items, workers);
  const bool threaded = opts.policy == ExecutionPolicy::threaded;

  std::deque<Channel<std::shared_ptr<const Order>>> orders;
  std::deque<Channel<Reply>> replies;
  std::vector<std::thread> pool;

  struct PoolGuard {
    std::deque<Channel<std::shared_ptr<const Order>>>* orders;
    std::vector<std::thread>* pool;
    ~PoolGuard() {
      for (auto& ch : *orders) ch.close();
      for (auto& t : *pool) {
        if (t.joinable()) t.join();
      }
    }
  } guard{&orders, &pool};

  if (threaded) {
    for (int i = 0; i < workers; ++i) {
      orders.emplace_back();
      replies.emplace_back();
    }
    for (int i = 0; i < workers; ++i) {
      pool.emplace_back([&program, &part, &orders, &replies, i] {
        while (auto order = orders[static_cast<std::size_t>(i)].receive()) {
          Reply reply;
          const auto t0 = Clock::now();
          try {
            reply.partial = program.worker_step(
                **order, part.slices[static_cast<std::size_t>(i)], i);
          } catch (...) {
            reply.error = std::current_exception();
          }
          reply.seconds = detail::seconds_since(t0);
          replies[static_cast<std::size_t>(i)].send(std::move(reply));
        }
      });
    }
  }

  RunResult<Output> result;
  State state = detail::guarded(0, "init", program.init);
  bool done = detail::guarded(0, "exit_condition", program.exit_condition,
                              std::cref(state));

  while (!done && result.iterations < opts.max_iterations) {
    const long long iter = result.iterations;
    IterationTiming timing;
    timing.iteration = iter;
    const auto iter_start = Clock::now();

    auto t0 = Clock::now();
    auto order = std::make_shared<const Order>(
        detail::guarded(iter, "make_order", program.make_order,
                        std::cref(state)));
    timing.make_order_s = detail::seconds_since(t0);

    std::vector<Partial> partials;
    partials.reserve(static_cast<std::size_t>(workers));

    if (threaded) {
      t0 = Clock::now();
      for (int i = 0; i < workers; ++i) {
        orders[static_cast<std::size_t>(i)].send(order);
      }
      timing.dispatch_s = detail::seconds_since(t0);

      t0 = Clock::now();
      // Gather in rank order: worker i's reply is read before i+1's even
      // if i+1 finished first.
      std::exception_ptr first_error;
      for (int i = 0; i < workers; ++i) {
        auto reply = replies[static_cast<std::size_t>(i)].receive();
        if (!reply) {
          throw std::logic_error("worker reply channel closed mid-run");
        }
        timing.compute_max_s = std::max(timing.compute_max_s, reply->seconds);
        if (reply->error && !first_error) {
          first_error = reply->error;
        } else if (reply->partial) {
          partials.push_back(std::move(*reply->partial));
        }
      }
      timing.wait_s = detail::seconds_since(t0);
      if (first_error) {
        try {
          std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
          throw PayloadError(iter, "worker_step", e.what());
        } catch (...) {
          throw PayloadError(iter, "worker_step", "unknown payload error");
        }
      }
    } else {
      t0 = Clock::now();
      for (int i = 0; i < workers; ++i) {
        const auto step_start = Clock::now();
        partials.push_back(detail::guarded(
            iter, "worker_step", program.worker_step, std::cref(*order),
            part.slices[static_cast<std::size_t>(i)], i));
        timing.compute_max_s =
            std::max(timing.compute_max_s, detail::seconds_since(step_start));
      }
      timing.wait_s = detail::seconds_since(t0);
    }

    if (program.order_size) {
      timing.order_bytes = program.order_size(*order);
    }
    if (program.result_size) {
      for (const auto& partial : partials) {
        timing.result_bytes += program.result_size(partial);
      }
    }

    t0 = Clock::now();
    state = detail::guarded(iter, "reduce", program.reduce,
                            std::cref(partials), std::cref(state));
    timing.reduce_s = detail::seconds_since(t0);

    t0 = Clock::now();
    done = detail::guarded(iter, "exit_condition", program.exit_condition,
                           std::cref(state));
    timing.check_s = detail::seconds_since(t0);

    timing.wall_s = detail::seconds_since(iter_start);
    result.timing.push_back(timing);
    ++result.iterations;
  }

  result.outcome = done ? RunOutcome::converged : RunOutcome::iteration_limit;
  result.output = detail::guarded(result.iterations, "finalize",
                                  program.finalize, std::cref(state));
  return result;
}

/// Convenience overload matching (program, workers, max_iterations).
template <class State, class Order, class Partial, class Output>
RunResult<Output> run_bsf(const BsfProgram<State, Order, Partial, Output>& program,
                          int workers, long long max_iterations) {
  RunOptions opts;
  opts.max_iterations = max_iterations;
  return run_bsf(program, workers, opts);
}

}  // namespace bsf
