#pragma once

#include <stdexcept>

namespace ttsketch {

/// Bad argument: shape mismatch, out-of-range index or rank, bad parameter.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A TT core chain whose rank extents do not line up.
class InvalidStructure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated DNT1/TTC1 file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values encountered inside a kernel.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank-deficient input where full column rank is required.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Work or memory guard exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ttsketch
