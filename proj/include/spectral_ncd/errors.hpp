#pragma once

#include <stdexcept>
#include <string>

#include "spectral_ncd/linalg.hpp"

namespace spectral_ncd {

/// Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A vertex of the augmentation graph has (numerically) zero degree, so
/// D^{-1/2} is undefined.
class ZeroDegreeVertex : public InvalidInput {
 public:
  ZeroDegreeVertex(Index vertex, double degree)
      : InvalidInput("vertex " + std::to_string(vertex) + " has degree " +
                     std::to_string(degree) + " (normalization undefined)"),
        vertex_(vertex) {}
  Index vertex() const noexcept { return vertex_; }

 private:
  Index vertex_;
};

}  // namespace spectral_ncd
