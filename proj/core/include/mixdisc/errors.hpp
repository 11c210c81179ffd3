#pragma once

#include <stdexcept>
#include <string>

namespace mixdisc {

/// Input outside the mathematical domain of an operation (bad purity, spin label, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Request would exceed a hard resource cap (dense 2^N paths, large-N solves).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not produce a usable answer.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mixdisc
