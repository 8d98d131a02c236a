#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qunwrap {

// Precondition violations on public entry points.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value the mathematics says must hold did not (e.g. a non-integral edge constant).
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ProblemTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents. `offset()` is the byte (or for text formats, the
// line) position where reading stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace qunwrap
