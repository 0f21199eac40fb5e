#pragma once

#include <stdexcept>
#include <string>

namespace stokern {

// Malformed input (bad probabilities, dimension mismatch, broken JSON, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that violates an algorithm's precondition
// (e.g. p = 1 under Poissonization, total weight below the Helly threshold).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stokern
