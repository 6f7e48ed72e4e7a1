#pragma once

#include <stdexcept>
#include <string>

namespace ose {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input values (non-finite entries, empty spectra, bad probability vectors).
class InputError : public Error {
 public:
  using Error::Error;
};

// Incompatible dimensions between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Numerically dependent columns, zero matrices, rank-deficient systems.
// Sampling code catches this and resamples.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// A SketchSpec that violates 1 <= m <= n or 1 <= s <= m.
class SpecError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// The sketched regression system lost column rank.
class SketchFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ose
