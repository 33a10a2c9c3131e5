#pragma once

#include <stdexcept>
#include <string>

namespace hypertree {

// Bad user input: malformed files, out-of-range arguments, dimension mismatch.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Graph failed a structural check (not a tree, cycle, multiple roots, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimization produced a non-finite value.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hypertree
