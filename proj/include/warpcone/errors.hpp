#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace warpcone {

// Base of every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: non-reduced rationals, bad normal forms, wrong shapes.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An enumeration or representation exceeded its configured cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::size_t cap)
      : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

// A point escaped a closed domain, or a closure radius is too small.
class ClosureError : public Error {
 public:
  ClosureError(const std::string& what, std::size_t required = 0)
      : Error(what), required_(required) {}
  std::size_t required_radius() const noexcept { return required_; }

 private:
  std::size_t required_;
};

class GroupMismatchError : public Error {
 public:
  using Error::Error;
};

class DomainMismatchError : public Error {
 public:
  using Error::Error;
};

// Interleaved embedding ratio hypothesis violated.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::size_t level) : Error(what), level_(level) {}
  std::size_t level() const noexcept { return level_; }

 private:
  std::size_t level_;
};

// A continued-fraction interval is too wide to decide an inequality.
class UndecidableError : public Error {
 public:
  using Error::Error;
};

class DegenerateActionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Distance function failed the metric axioms.
class MetricError : public Error {
 public:
  using Error::Error;
};

// No (C, A) on the configured grid bounds the map; names a binding source pair.
class QuasiIsometryError : public Error {
 public:
  QuasiIsometryError(const std::string& what, std::size_t a, std::size_t b)
      : Error(what), a_(a), b_(b) {}
  std::size_t first() const noexcept { return a_; }
  std::size_t second() const noexcept { return b_; }

 private:
  std::size_t a_, b_;
};

// f(g y) is not in the target orbit of f(y).
class OrbitPreservationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace warpcone
