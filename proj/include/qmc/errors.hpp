#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmc {

// Point set / kernel pairing violates the structure required for fast
// transforms (wrong order, NUS-scrambled net, non-power-of-two size, ...).
class structure_error : public std::runtime_error {
 public:
  explicit structure_error(const std::string& what) : std::runtime_error(what) {}
};

// Digit precision of one operand does not cover the other.
class precision_error : public std::runtime_error {
 public:
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// An eigenvalue fell below the singularity tolerance; carries its index.
class singular_gram_error : public std::runtime_error {
 public:
  singular_gram_error(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Malformed input file; carries the 1-based line number when known.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace qmc
