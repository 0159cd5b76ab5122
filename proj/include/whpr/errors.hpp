#pragma once

#include <stdexcept>
#include <string>

namespace whpr {

/// Malformed input data: word text, dataset files, degenerate samples.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model cannot be fitted, loaded or applied.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The hard-margin program has no feasible solution.
class NonSeparable : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace whpr
