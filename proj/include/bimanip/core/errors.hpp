#pragma once

#include <stdexcept>
#include <string>

namespace bimanip {

// Error taxonomy used across the library. Each maps to one failure class a
// caller can act on; all derive from Error so the CLI can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed kinematic tree (cycle, forward parent reference).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// On-disk dataset or checkpoint does not match its manifest.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// A stream does not cover a requested timestamp.
class CoverageError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bimanip
