#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sitnet/types.hpp"

namespace sitnet {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, malformed files, violated Network invariants.
class InputError : public Error {
public:
  using Error::Error;
};

// Solver non-convergence, degenerate flows.
class NumericalError : public Error {
public:
  using Error::Error;
};

// A positive-flow directed cycle was found where none is allowed.
class CycleError : public NumericalError {
public:
  CycleError(const std::string& what, std::vector<VertexId> cycle)
      : NumericalError(what), cycle_(std::move(cycle)) {}

  const std::vector<VertexId>& cycle() const noexcept { return cycle_; }

private:
  std::vector<VertexId> cycle_;
};

}  // namespace sitnet
