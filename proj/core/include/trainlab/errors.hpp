#pragma once

#include <stdexcept>
#include <string>

namespace trainlab {

// Precondition violations on numeric or structural inputs derive from
// std::invalid_argument; operations that are well-formed but undefined for the
// given point (e.g. a rate ratio requested inside warmup) use std::domain_error.
// File and container problems are reported through the types below.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trainlab
