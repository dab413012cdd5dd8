#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gelfand {

// ---------------------------------------------------------------------------
// Error types. Preconditions and structural failures throw; outcomes that are
// expected during normal operation (Newton not converging near a fold) are
// reported through result types instead.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  std::string key;
  ConfigError(std::string key_, const std::string& what_)
      : Error(key_ + ": " + what_), key(std::move(key_)) {}
};

struct SpacingTooCoarse : Error {
  using Error::Error;
};

struct NonFiniteIntegrand : Error {
  using Error::Error;
};

struct ConditionViolated : Error {
  std::string condition;
  double witness;
  ConditionViolated(std::string cond, double tau)
      : Error(cond + " violated at tau = " + std::to_string(tau)),
        condition(std::move(cond)),
        witness(tau) {}
};

struct LadderTooShort : Error {
  using Error::Error;
};

struct IterationStalled : Error {
  double best_value;
  double best_residual;
  int iterations;
  IterationStalled(double value, double residual, int iters)
      : Error("eigenvalue iteration stalled after " + std::to_string(iters) +
              " iterations (residual " + std::to_string(residual) + ")"),
        best_value(value),
        best_residual(residual),
        iterations(iters) {}
};

struct ExponentOutOfRange : Error {
  using Error::Error;
};

struct HypothesisViolated : Error {
  using Error::Error;
};

struct DeltaOutOfRange : Error {
  using Error::Error;
};

struct NoSolution : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

/// Surface area of the unit sphere S^{d-1} in R^d.
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Fixed 17-significant-digit formatting; the CSV contract relies on this
/// being reproducible across runs.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline double smoothstep01(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}

/// Thread cap for embarrassingly parallel sweeps; GELFAND_THREADS overrides.
inline unsigned sweep_thread_cap() {
  if (const char* env = std::getenv("GELFAND_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs fn(i) for i in [0,n) on up to sweep_thread_cap() threads. Results must
/// be written to per-index slots by the callers; merge order is theirs.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned threads = std::min<std::size_t>(sweep_thread_cap(), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace gelfand
