#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace volu {

// Argument outside the valid range of a coordinate, code or index.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Input violates a mathematical precondition (zero distance, tau outside the
// window, empty view set, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Structurally valid data that breaks a type invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed binary input. Carries the byte offset where decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Exhaustive search would exceed its enumeration limit.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Bad scenario / manifest / preset configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A segment index needed to enumerate the window has not been fetched.
class MissingIndexError : public std::runtime_error {
 public:
  MissingIndexError(std::size_t object, std::size_t segment)
      : std::runtime_error("segment index " + std::to_string(segment) +
                           " of object " + std::to_string(object) +
                           " not loaded"),
        object_(object),
        segment_(segment) {}

  std::size_t object() const noexcept { return object_; }
  std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t object_;
  std::size_t segment_;
};

}  // namespace volu
