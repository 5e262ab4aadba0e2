#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>

namespace bsf {

/// Unbounded FIFO channel between threads; the in-process stand-in for the
/// message-passing transport between master and workers. receive() blocks
/// until a value or close() arrives; a drained closed channel yields
/// nullopt. Not movable: construct in place (e.g. in a std::deque).
template <class T>
class Channel {
 public:
  Channel() = default;
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  void send(T value) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (closed_) {
        throw std::logic_error("send on closed channel");
      }
      queue_.push_back(std::move(value));
    }
    ready_.notify_one();
  }

  std::optional<T> receive() {
    std::unique_lock<std::mutex> lock(mutex_);
    ready_.wait(lock, [this] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) {
      return std::nullopt;
    }
    std::optional<T> value(std::move(queue_.front()));
    queue_.pop_front();
    return value;
  }

  void close() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      closed_ = true;
    }
    ready_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<T> queue_;
  bool closed_ = false;
};

}  // namespace bsf
