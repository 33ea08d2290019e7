#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace libexpert {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that failed syntactic validation. Carries the byte offset of the
// first offending character when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_ = 0;
};

// A caller violated an operation precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Filesystem or subprocess I/O failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; carries the stage name for diagnostics.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace libexpert
