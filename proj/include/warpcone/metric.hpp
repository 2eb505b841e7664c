#pragma once

#include <cstddef>
#include <string>

#include "warpcone/rational.hpp"

namespace warpcone {

// Exact distances as integer numerators over one common denominator.
class FixedView {
 public:
  virtual ~FixedView() = default;
  virtual const BigInt& den() const = 0;
  virtual int128 num(std::size_t i, std::size_t j) const = 0;
};

// A finite metric space addressed by point index.
class IndexedMetric {
 public:
  virtual ~IndexedMetric() = default;
  virtual std::size_t size() const = 0;
  virtual Rational distance(std::size_t i, std::size_t j) const = 0;
  // nullptr when the distances do not fit the fixed-point representation.
  virtual const FixedView* fixed() const { return nullptr; }
  virtual std::string label(std::size_t i) const { return std::to_string(i); }
};

// Compares a*b with c*d for nonnegative 128-bit operands without overflow.
int compare_products(unsigned __int128 a, unsigned __int128 b, unsigned __int128 c,
                     unsigned __int128 d);

}  // namespace warpcone
