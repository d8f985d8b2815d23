#pragma once

#include <stdexcept>
#include <string>

namespace ubss {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Wrong matrix/frame shape or count.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Mixing matrix violates the nonsingular-submatrix requirement or is
// numerically unusable.
class InvalidMatrixError : public Error {
public:
  using Error::Error;
};

// Malformed file, container, or config contents.
class FormatError : public Error {
public:
  using Error::Error;
};

// Filesystem failures (missing or unwritable paths).
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace ubss
