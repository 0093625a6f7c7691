#pragma once

#include <stdexcept>
#include <string>

namespace pairrank {

// Base error for all library failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad inputs: malformed files, contract violations, infeasible configs.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Network-level failure after retries are exhausted. Distinct from an
// invalid judgment, which is recorded and never thrown.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error(what) {}
};

}  // namespace pairrank
