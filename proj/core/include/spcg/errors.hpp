#pragma once

#include <stdexcept>
#include <string>

namespace spcg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand lengths or matrix dimensions disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix or vector could not be assembled from its parts.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// The matrix is not symmetric, or lacks a stored diagonal, where one is required.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Malformed, unsupported or unreadable file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// CG could not continue: the operator is not SPD or the iteration produced
/// non-finite scalars.
class BreakdownError : public Error {
 public:
  using Error::Error;
};

}  // namespace spcg
