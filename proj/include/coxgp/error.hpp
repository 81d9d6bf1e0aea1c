#pragma once

#include <stdexcept>
#include <string>

namespace coxgp {

/// Raised for every contract violation in the library: bad arguments,
/// malformed input files, numerical failures that cannot be recovered.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization did not succeed at any jitter level.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

}  // namespace coxgp
