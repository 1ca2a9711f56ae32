#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tailtest {

// Argument outside the domain of an operation (negative sample, u >= 1,
// invalid distribution parameter, bad bucket index...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A quantity that is mathematically undefined at the requested point,
// e.g. the proxy where the density is flat.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `location` is a 1-based line number for text
// input and a byte offset for binary input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : std::runtime_error(what), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

}  // namespace tailtest
