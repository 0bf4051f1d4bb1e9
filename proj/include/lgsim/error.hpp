#pragma once

#include <stdexcept>
#include <string>

namespace lgsim {

/// Base of every recoverable failure raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A semi-weak meter whose reflectivities are (nearly) equal; its contextual
/// values diverge and the meter carries no information about sigma_z.
class DegenerateMeter : public Error {
  public:
    using Error::Error;
};

class UnsupportedSize : public Error {
  public:
    using Error::Error;
};

class ZeroConditioningProbability : public Error {
  public:
    using Error::Error;
};

class EmptyData : public Error {
  public:
    using Error::Error;
};

class InsufficientSettings : public Error {
  public:
    using Error::Error;
};

class NonConvergence : public Error {
  public:
    using Error::Error;
};

/// A matrix that is not a valid density operator (or a ket that is not
/// normalized).
class InvalidState : public Error {
  public:
    using Error::Error;
};

/// Scenario / input-file problems. The message carries the offending field
/// path or line number.
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace lgsim
