#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holocorr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Root polishing could not reach the residual tolerance.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

/// A resultant vanished identically: the inputs share a factor in the
/// eliminated variable.
class CommonFactor : public Error {
 public:
  using Error::Error;
};

/// Composition by elimination produced a chain that fails the degree law or
/// contains a component that is not a correspondence.
class DegeneracyDetected : public Error {
 public:
  using Error::Error;
};

/// An atom of a measure lies on a point where the backward fiber degenerates.
class DegenerateAtom : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A generator parsed to a constant (degree 0) map.
class DegreeError : public Error {
 public:
  using Error::Error;
};

/// d0 >= d_t: the equilibrium measure is not known to exist.
class ConditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace holocorr
