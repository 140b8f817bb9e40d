#pragma once

/**
 * @file scalar.hpp
 * @brief Exact arithmetic in Q and in real quadratic fields Q(sqrt(d)).
 *
 * An ExactScalar holds a + b*sqrt(d) with arbitrary-precision rationals a, b.
 * Values are kept canonical:
 *   - b == 0  implies d == 1
 *   - b != 0  implies d >= 2 and d squarefree
 * so two scalars are equal iff their canonical triples are identical.
 *
 * Every comparison is decided with integer arithmetic; there is no
 * floating-point anywhere in this header's trusted operations.
 */

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace cijump {

using Integer = mpz_class;
using Rational = mpq_class;

enum class ScalarErrc {
  kSyntax,
  kMixedRadicands,
  kDivisionByZero,
  kNegativeRadicand,
};

const char* to_string(ScalarErrc code);

class ScalarError : public std::runtime_error {
 public:
  ScalarError(ScalarErrc code, const std::string& what, std::size_t position = 0)
      : std::runtime_error(what), code_(code), position_(position) {}

  ScalarErrc code() const { return code_; }
  /// Offset into the parsed text, when the error came from parse_scalar.
  std::size_t position() const { return position_; }

 private:
  ScalarErrc code_;
  std::size_t position_;
};

class ExactScalar {
 public:
  ExactScalar() : a_(0), b_(0), d_(1) {}
  ExactScalar(long value) : a_(value), b_(0), d_(1) {}  // NOLINT(implicit)
  ExactScalar(const Rational& value) : a_(value), b_(0), d_(1) {  // NOLINT(implicit)
    a_.canonicalize();
  }
  ExactScalar(const Integer& value) : a_(value), b_(0), d_(1) {}  // NOLINT(implicit)

  /// a + b*sqrt(radicand); the radicand is reduced to its squarefree part.
  ExactScalar(Rational a, Rational b, std::uint64_t radicand);

  static ExactScalar sqrt(std::uint64_t radicand) { return {0, 1, radicand}; }
  static ExactScalar fraction(long num, long den);

  const Rational& rational_part() const { return a_; }
  const Rational& radical_coefficient() const { return b_; }
  std::uint64_t radicand() const { return d_; }

  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_integer() const;
  int sign() const;

  /// Galois conjugate a - b*sqrt(d).
  ExactScalar conjugate() const;
  /// Field norm a^2 - b^2 d (rational).
  Rational norm() const;

  ExactScalar operator-() const;
  ExactScalar& operator+=(const ExactScalar& rhs);
  ExactScalar& operator-=(const ExactScalar& rhs);
  ExactScalar& operator*=(const ExactScalar& rhs);
  ExactScalar& operator/=(const ExactScalar& rhs);

  friend ExactScalar operator+(ExactScalar lhs, const ExactScalar& rhs) { return lhs += rhs; }
  friend ExactScalar operator-(ExactScalar lhs, const ExactScalar& rhs) { return lhs -= rhs; }
  friend ExactScalar operator*(ExactScalar lhs, const ExactScalar& rhs) { return lhs *= rhs; }
  friend ExactScalar operator/(ExactScalar lhs, const ExactScalar& rhs) { return lhs /= rhs; }

  friend bool operator==(const ExactScalar& x, const ExactScalar& y) {
    return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
  }
  /// Throws ScalarError(kMixedRadicands) for incompatible fields.
  friend std::strong_ordering operator<=>(const ExactScalar& x, const ExactScalar& y);

  /// Literal in the scalar grammar, e.g. "12+6*sqrt(3)"; parse_scalar inverts it.
  std::string to_literal() const;
  /// Human-readable decimal rendering with `digits` fractional digits (truncated bracket).
  std::string to_decimal(int digits = 12) const;
  /// Approximate value for display and for the numerical oracle only.
  double to_double() const;

 private:
  void canonicalize();

  Rational a_;
  Rational b_;
  std::uint64_t d_;
};

std::ostream& operator<<(std::ostream& os, const ExactScalar& x);

/// Radicand shared by x and y; 1 when both are rational. Throws on mismatch.
std::uint64_t common_radicand(const ExactScalar& x, const ExactScalar& y);

ExactScalar parse_scalar(std::string_view text);

std::strong_ordering compare(const ExactScalar& x, const ExactScalar& y);

Integer floor_scalar(const ExactScalar& x);
Integer ceil_scalar(const ExactScalar& x);
/// x - floor(x), always in [0, 1).
ExactScalar frac_scalar(const ExactScalar& x);

struct NearestInteger {
  Integer value;
  bool tie = false;
};
/// Ties at half-integers round up and are flagged.
NearestInteger nearest_integer(const ExactScalar& x);

/// Distance to the nearest integer, min(frac(x), 1 - frac(x)).
ExactScalar dist_to_integer(const ExactScalar& x);

ExactScalar abs(const ExactScalar& x);

struct RationalInterval {
  Rational lo;
  Rational hi;
};
/// Rational bracket lo <= x <= hi with hi - lo <= 10^-precision.
RationalInterval to_interval(const ExactScalar& x, unsigned precision);

inline bool is_rational(const ExactScalar& x) { return x.is_rational(); }

/// A real number of the form coefficient * pi.
class PiMultiple {
 public:
  PiMultiple() = default;
  explicit PiMultiple(ExactScalar coefficient) : coefficient_(std::move(coefficient)) {}

  const ExactScalar& coefficient() const { return coefficient_; }

  PiMultiple operator*(const ExactScalar& factor) const { return PiMultiple(coefficient_ * factor); }
  PiMultiple operator/(const ExactScalar& divisor) const { return PiMultiple(coefficient_ / divisor); }
  /// pi cancels.
  ExactScalar operator/(const PiMultiple& other) const { return coefficient_ / other.coefficient_; }
  PiMultiple operator-(const PiMultiple& other) const {
    return PiMultiple(coefficient_ - other.coefficient_);
  }

  friend bool operator==(const PiMultiple&, const PiMultiple&) = default;

  /// e.g. "pi/3" or "(2+sqrt(3))*pi"; display only.
  std::string to_string() const;

 private:
  ExactScalar coefficient_;
};

}  // namespace cijump
