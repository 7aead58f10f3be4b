// Shared error types and seeding helpers for the nsad library.

#ifndef NSAD_COMMON_H_
#define NSAD_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace nsad {

// Base class for every error raised by the library. The CLI maps any Error to
// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation was violated by its inputs.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Dimensionality of an input does not match the model or normalizer.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// The requested operation is not available for this kind of model.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

// Deterministically derives an independent sub-seed for `stream` from a base
// seed (splitmix64 finalizer over the pair).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Throws PreconditionError with `message` when `condition` is false.
inline void Require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace nsad

#endif  // NSAD_COMMON_H_
