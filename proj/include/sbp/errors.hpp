#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace sbp {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonzeroBoundary : public Error {
 public:
  explicit NonzeroBoundary(double max_abs)
      : Error("field does not vanish on the boundary (max |f| = " +
              std::to_string(max_abs) + ")"),
        max_abs_(max_abs) {}
  double max_abs() const { return max_abs_; }

 private:
  double max_abs_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(std::size_t iterations, double residual)
      : Error("linear solver did not converge after " +
              std::to_string(iterations) +
              " iterations (relative residual " + format(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  std::size_t iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
  std::size_t iterations_;
  double residual_;
};

class IncompatibleData : public Error {
 public:
  using Error::Error;
};

class ConsistencyViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateDirection : public Error {
 public:
  using Error::Error;
};

class NewtonDivergence : public Error {
 public:
  using Error::Error;
};

class DegenerateConstraints : public Error {
 public:
  using Error::Error;
};

class InfeasibleRegion : public Error {
 public:
  using Error::Error;
};

class SlabInfeasible : public Error {
 public:
  explicit SlabInfeasible(int slab)
      : Error("alpha is not bracketed by q on slab " + std::to_string(slab)),
        slab_(slab) {}
  int slab() const { return slab_; }

 private:
  int slab_;
};

class LineSearchStall : public Error {
 public:
  using Error::Error;
};

class SingularMultiplierSystem : public Error {
 public:
  using Error::Error;
};

class ZeroField : public Error {
 public:
  using Error::Error;
};

class OracleTooLarge : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error(key + ": " + message), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace sbp
