#include "coxgp/rng.hpp"

#include <cmath>

#include "coxgp/error.hpp"

namespace coxgp {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix(splitmix(seed) ^ splitmix(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) {
  return derive_seed(derive_seed(seed, stream_a), stream_b);
}

double Rng::uniform() { return uniform_(engine_); }

double Rng::uniform_open() {
  double u = 0.0;
  while (u == 0.0) u = uniform_(engine_);
  return u;
}

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw Error("gamma: shape and rate must be positive and finite");
  }
  using Param = std::gamma_distribution<double>::param_type;
  return gamma_(engine_, Param(shape, 1.0 / rate));
}

double Rng::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw Error("poisson: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

}  // namespace coxgp
