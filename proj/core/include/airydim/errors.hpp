#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace airydim {

// Requested horizon does not fit the lattice. Carries enough to resize.
class SizingError : public std::invalid_argument {
 public:
  SizingError(const std::string& what, std::int64_t max_offset,
              std::int64_t minimal_n)
      : std::invalid_argument(what),
        max_offset_(max_offset),
        minimal_n_(minimal_n) {}

  // Largest admissible |lattice offset| at the requested N.
  std::int64_t max_offset() const noexcept { return max_offset_; }
  // Smallest N that admits the request (0 when not applicable).
  std::int64_t minimal_n() const noexcept { return minimal_n_; }

 private:
  std::int64_t max_offset_;
  std::int64_t minimal_n_;
};

class WindowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ProcessMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitImpossibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based; 0 when the problem is the file as
// a whole (e.g. a missing section at end of file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace airydim
