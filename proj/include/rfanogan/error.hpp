#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfanogan {

// Every recoverable failure in the library surfaces as an Error (or a subclass).
// Messages start with a short stable phrase ("malformed container", "unknown
// modulation", ...) so callers and tests can match on them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A layer could not accept the tensor shape handed to it.
class ShapeError : public Error {
 public:
  ShapeError(std::size_t layer_index, const std::string& what)
      : Error("shape mismatch at layer " + std::to_string(layer_index) + ": " + what),
        layer_index_(layer_index) {}

  std::size_t layer_index() const noexcept { return layer_index_; }

 private:
  std::size_t layer_index_;
};

// Training diverged or was handed an unusable setup.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfanogan
