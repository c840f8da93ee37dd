#pragma once

#include <optional>
#include <string>

#include "collatz/natural.hpp"
#include "collatz/rational.hpp"

namespace collatz {

enum class BoundCompare { Less, Geq };

// The closed family f(y) = a * y^b with positive rational a and b. Strictly
// increasing on the positive integers, so it can serve as a drop bound:
// "iterate v drops below f at y" means v < f(y), decided exactly.
class BoundFunction {
 public:
  // Requires a > 0 and b > 0.
  BoundFunction(Rational coefficient, Rational exponent);

  static BoundFunction linear(const Rational& c) { return {c, Rational(1)}; }
  static BoundFunction power(const Rational& c) { return {Rational(1), c}; }
  static BoundFunction identity() { return {Rational(1), Rational(1)}; }

  const Rational& coefficient() const { return coefficient_; }
  const Rational& exponent() const { return exponent_; }

  // Decides v < a*y^b exactly: with a = u/w and b = p/q in lowest terms,
  // Less iff w^q * v^q < u^q * y^p. Requires y >= 1.
  BoundCompare compare(const Natural& y, const Natural& v) const;
  bool value_below(const Natural& y, const Natural& v) const {
    return compare(y, v) == BoundCompare::Less;
  }

  // Largest integer t with t < f(y), i.e. v < f(y) <=> v <= t. Always >= 0;
  // t == 0 means no trajectory value (they are >= 1) can ever drop below f(y).
  Natural threshold_below(const Natural& y) const;

  // f(y) <= 1, exactly. Equivalent to threshold_below(y) == 0.
  bool at_most_one_at(const Natural& y) const;

  // Sign of f(y) - g(y), decided exactly. Requires y >= 1.
  static int compare_at(const BoundFunction& f, const BoundFunction& g,
                        const Natural& y);

  // k-fold self-composition; k == 0 yields the identity bound (1, 1).
  BoundFunction self_power(unsigned k) const;

  bool operator==(const BoundFunction&) const = default;

  std::string str() const;

 private:
  Rational coefficient_;
  Rational exponent_;
};

// Canonical form of f∘g: (a_f * a_g^{b_f}, b_f * b_g). Throws
// std::domain_error when a_g^{b_f} is irrational (the composition would
// leave the rational bound family).
BoundFunction compose(const BoundFunction& f, const BoundFunction& g);

}  // namespace collatz
