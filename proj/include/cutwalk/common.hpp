#ifndef CUTWALK_COMMON_HPP
#define CUTWALK_COMMON_HPP

#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutwalk {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;

/// Syntactic failure while reading a document (DIMACS, polynomial text,
/// certificate JSON). Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, long line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + std::move(msg)
                                     : std::move(msg)),
        line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

/// Semantically invalid input: index out of range, wrong clause arity,
/// duplicate edge, wrong chain classification, and the like.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (nonpositive coordinate in a ratio metric, zero divisor, ...).
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An oracle was asked for more than its size guard allows. Oracles never
/// truncate silently; they refuse with the offending sizes spelled out.
class GuardError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unsupported but well-formed case (e.g. non-unit coefficients in
/// subdivision lifting, where no general rule is available).
class UnsupportedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Deterministic RNG used everywhere a seed appears in a contract.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace cutwalk

#endif
