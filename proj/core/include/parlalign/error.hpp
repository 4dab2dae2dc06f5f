#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace parlalign {

// Base for every error raised by the library. The CLI maps the concrete
// subclass onto a process exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented schema or precondition (exit status 2).
// `location` names the offending record, e.g. "refs.json: record 12".
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string location = {})
      : Error(location.empty() ? what : location + ": " + what),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

// XHTML that cannot be tokenized at all.
class MarkupError : public ValidationError {
 public:
  MarkupError(const std::string& what, std::size_t byte_offset)
      : ValidationError(what, "byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// A required input file does not exist (exit status 3).
class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& path)
      : Error("missing input: " + path), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Non-fatal condition surfaced to reports.
struct Warning {
  std::string code;
  std::string detail;

  bool operator==(const Warning&) const = default;
};

using Warnings = std::vector<Warning>;

}  // namespace parlalign
