#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace pira {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input description (topology, workload, plan).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An action was applied that the ledger rejects.
class InfeasibleAction : public Error {
 public:
  using Error::Error;
};

/// An M/M/1 queue was evaluated with arrival rate >= service rate.
class UnstableQueue : public Error {
 public:
  using Error::Error;
};

/// The exact solver was asked for an instance beyond its configured bounds.
class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Seeded random source. Draws are implemented on top of the raw engine
/// output so streams are identical across standard library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Derives an independent child seed; used to give sub-components their own streams.
  std::uint64_t fork() { return engine_() ^ 0x9E3779B97F4A7C15ULL; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pira
