#pragma once

#include <chrono>
#include <limits>

#include "wmcgrad/logic.hpp"

namespace wmcgrad {

struct TimeoutError : BudgetExceeded {
  TimeoutError() : BudgetExceeded("time budget exceeded") {}
};

// Cooperative wall-clock budget. Long-running loops poll check() at a
// granularity of at most a few milliseconds of work.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  static Deadline after(double seconds) {
    Deadline d;
    if (seconds > 0 && seconds < 1e12)
      d.end_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(seconds));
    return d;
  }
  static Deadline unbounded() { return {}; }

  bool bounded() const { return end_ != Clock::time_point::max(); }
  bool expired() const { return bounded() && Clock::now() >= end_; }
  double remaining_seconds() const {
    if (!bounded()) return std::numeric_limits<double>::infinity();
    return std::chrono::duration<double>(end_ - Clock::now()).count();
  }
  void check() const {
    if (expired()) throw TimeoutError();
  }

 private:
  Clock::time_point end_ = Clock::time_point::max();
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  double millis() const { return seconds() * 1e3; }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace wmcgrad
