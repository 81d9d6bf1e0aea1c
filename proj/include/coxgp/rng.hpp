#pragma once

#include <cstdint>
#include <random>

namespace coxgp {

/// SplitMix64 finalizer; maps (seed, stream) to a well-mixed child seed so
/// that replicates, chains and per-coordinate blocks get independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b);

/// Random source owned by exactly one logical thread of execution.
/// Gamma variates use the shape/rate convention (mean = shape / rate).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double uniform_open();  // (0, 1)
  double normal();
  double gamma(double shape, double rate);
  double beta(double a, double b);
  std::uint64_t poisson(double mean);
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::gamma_distribution<double> gamma_{1.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace coxgp
