#pragma once

#include <stdexcept>
#include <string>

namespace pfreact {

/// Base of all failures raised while advancing a time step.
class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NewtonDiverged : public SchemeError {
 public:
  using SchemeError::SchemeError;
};

/// A Newton iterate would leave the admissible set c + 1 >= c_floor.
class PositivityLost : public SchemeError {
 public:
  using SchemeError::SchemeError;
};

class LinearSolveFailed : public SchemeError {
 public:
  using SchemeError::SchemeError;
};

}  // namespace pfreact
