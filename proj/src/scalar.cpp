#include "cijump/scalar.hpp"

#include <cctype>
#include <sstream>

namespace cijump {

const char* to_string(ScalarErrc code) {
  switch (code) {
    case ScalarErrc::kSyntax: return "syntax";
    case ScalarErrc::kMixedRadicands: return "mixed_radicands";
    case ScalarErrc::kDivisionByZero: return "division_by_zero";
    case ScalarErrc::kNegativeRadicand: return "negative_radicand";
  }
  return "unknown";
}

namespace {

// Splits d = s^2 * r with r squarefree. Radicands in practice are tiny,
// trial division is plenty.
std::pair<std::uint64_t, std::uint64_t> squarefree_split(std::uint64_t d) {
  std::uint64_t s = 1;
  std::uint64_t r = d;
  for (std::uint64_t p = 2; p * p <= r; ++p) {
    while (r % (p * p) == 0) {
      r /= p * p;
      s *= p;
    }
  }
  return {s, r};
}

Integer isqrt(const Integer& n) {
  Integer root;
  mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
  return root;
}

Integer fdiv(const Integer& n, const Integer& d) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

Integer lcm(const Integer& x, const Integer& y) {
  Integer out;
  mpz_lcm(out.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  return out;
}

// x = (P + Q*sqrt(d)) / D with integers and D > 0.
struct IntegerForm {
  Integer P;
  Integer Q;
  Integer D;
};

IntegerForm integer_form(const ExactScalar& x) {
  const Rational& a = x.rational_part();
  const Rational& b = x.radical_coefficient();
  IntegerForm f;
  f.D = lcm(a.get_den(), b.get_den());
  f.P = a.get_num() * (f.D / a.get_den());
  f.Q = b.get_num() * (f.D / b.get_den());
  return f;
}

// floor(Q*sqrt(d)) for squarefree d >= 2 (so Q*sqrt(d) is irrational unless Q == 0).
Integer floor_radical(const Integer& Q, std::uint64_t d) {
  if (Q == 0) return 0;
  Integer sq = Q * Q * Integer(static_cast<unsigned long>(d));
  Integer root = isqrt(sq);
  return Q > 0 ? root : Integer(-root - 1);
}

Rational abs_rational(const Rational& q) { return q < 0 ? Rational(-q) : q; }

std::string rational_literal(const Rational& q) { return q.get_str(); }

}  // namespace

ExactScalar::ExactScalar(Rational a, Rational b, std::uint64_t radicand)
    : a_(std::move(a)), b_(std::move(b)), d_(radicand) {
  a_.canonicalize();
  b_.canonicalize();
  if (d_ == 0 || b_ == 0) {
    b_ = 0;
    d_ = 1;
    return;
  }
  auto [s, r] = squarefree_split(d_);
  if (s != 1) b_ *= Rational(Integer(static_cast<unsigned long>(s)));
  d_ = r;
  canonicalize();
}

ExactScalar ExactScalar::fraction(long num, long den) {
  if (den == 0) throw ScalarError(ScalarErrc::kDivisionByZero, "zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return ExactScalar(q);
}

void ExactScalar::canonicalize() {
  if (b_ == 0) {
    d_ = 1;
  } else if (d_ == 1) {
    a_ += b_;
    b_ = 0;
  }
}

bool ExactScalar::is_integer() const { return b_ == 0 && a_.get_den() == 1; }

int ExactScalar::sign() const {
  const int sa = sgn(a_);
  const int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a^2 with b^2 d; equality is impossible for squarefree d >= 2.
  Rational lhs = a_ * a_;
  Rational rhs = b_ * b_ * Rational(Integer(static_cast<unsigned long>(d_)));
  return lhs > rhs ? sa : sb;
}

ExactScalar ExactScalar::conjugate() const {
  ExactScalar out = *this;
  out.b_ = -out.b_;
  return out;
}

Rational ExactScalar::norm() const {
  return a_ * a_ - b_ * b_ * Rational(Integer(static_cast<unsigned long>(d_)));
}

ExactScalar ExactScalar::operator-() const {
  ExactScalar out = *this;
  out.a_ = -out.a_;
  out.b_ = -out.b_;
  return out;
}

std::uint64_t common_radicand(const ExactScalar& x, const ExactScalar& y) {
  if (x.is_rational()) return y.radicand();
  if (y.is_rational()) return x.radicand();
  if (x.radicand() != y.radicand()) {
    throw ScalarError(ScalarErrc::kMixedRadicands,
                      "incompatible radicands sqrt(" + std::to_string(x.radicand()) +
                          ") and sqrt(" + std::to_string(y.radicand()) + ")");
  }
  return x.radicand();
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& rhs) {
  const std::uint64_t d = common_radicand(*this, rhs);
  a_ += rhs.a_;
  b_ += rhs.b_;
  d_ = d;
  canonicalize();
  return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& rhs) { return *this += -rhs; }

ExactScalar& ExactScalar::operator*=(const ExactScalar& rhs) {
  const std::uint64_t d = common_radicand(*this, rhs);
  Rational a = a_ * rhs.a_ + b_ * rhs.b_ * Rational(Integer(static_cast<unsigned long>(d)));
  Rational b = a_ * rhs.b_ + b_ * rhs.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  d_ = d;
  canonicalize();
  return *this;
}

ExactScalar& ExactScalar::operator/=(const ExactScalar& rhs) {
  if (rhs.is_zero()) throw ScalarError(ScalarErrc::kDivisionByZero, "division by zero");
  common_radicand(*this, rhs);
  if (rhs.is_rational()) {
    a_ /= rhs.a_;
    b_ /= rhs.a_;
    canonicalize();
    return *this;
  }
  const Rational n = rhs.norm();
  *this *= rhs.conjugate();
  a_ /= n;
  b_ /= n;
  canonicalize();
  return *this;
}

std::strong_ordering operator<=>(const ExactScalar& x, const ExactScalar& y) {
  if (x == y) return std::strong_ordering::equal;
  const int s = (x - y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::strong_ordering compare(const ExactScalar& x, const ExactScalar& y) { return x <=> y; }

std::string ExactScalar::to_literal() const {
  if (b_ == 0) return rational_literal(a_);
  std::string out;
  if (a_ != 0) out = rational_literal(a_);
  const Rational mag = abs_rational(b_);
  if (b_ < 0) {
    out += "-";
  } else if (!out.empty()) {
    out += "+";
  }
  const Integer& num = mag.get_num();
  const Integer& den = mag.get_den();
  if (num != 1) out += num.get_str() + "*";
  out += "sqrt(" + std::to_string(d_) + ")";
  if (den != 1) out += "/" + den.get_str();
  return out;
}

std::string ExactScalar::to_decimal(int digits) const {
  Integer scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const bool negative = sign() < 0;
  const ExactScalar mag = negative ? -*this : *this;
  Integer scaled = floor_scalar(mag * ExactScalar(scale));
  std::string body = scaled.get_str();
  if (digits > 0) {
    if (body.size() <= static_cast<std::size_t>(digits)) {
      body.insert(0, static_cast<std::size_t>(digits) + 1 - body.size(), '0');
    }
    body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  }
  return negative ? "-" + body : body;
}

double ExactScalar::to_double() const {
  if (b_ == 0) return a_.get_d();
  return to_interval(*this, 18).lo.get_d();
}

std::ostream& operator<<(std::ostream& os, const ExactScalar& x) { return os << x.to_literal(); }

// --- parsing -----------------------------------------------------------------

namespace {

class ScalarParser {
 public:
  explicit ScalarParser(std::string_view text) : text_(text) {}

  ExactScalar parse() {
    ExactScalar value = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ScalarError(ScalarErrc::kSyntax,
                      message + " at offset " + std::to_string(pos_) + " in '" +
                          std::string(text_) + "'",
                      pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  // Arithmetic errors get re-tagged with the offset of the operator.
  template <typename Fn>
  ExactScalar guarded(std::size_t at, Fn&& fn) {
    try {
      return fn();
    } catch (const ScalarError& e) {
      throw ScalarError(e.code(), std::string(e.what()) + " at offset " + std::to_string(at), at);
    }
  }

  ExactScalar expr() {
    ExactScalar value = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        ExactScalar rhs = term();
        value = guarded(at, [&] { return value + rhs; });
      } else if (accept('-')) {
        ExactScalar rhs = term();
        value = guarded(at, [&] { return value - rhs; });
      } else {
        return value;
      }
    }
  }

  ExactScalar term() {
    ExactScalar value = factor();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        ExactScalar rhs = factor();
        value = guarded(at, [&] { return value * rhs; });
      } else if (accept('/')) {
        ExactScalar rhs = factor();
        value = guarded(at, [&] { return value / rhs; });
      } else {
        return value;
      }
    }
  }

  ExactScalar factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '(') {
      ++pos_;
      ExactScalar inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return ExactScalar(integer());
    if (text_.substr(pos_, 4) == "sqrt") {
      pos_ += 4;
      expect('(');
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '-') {
        throw ScalarError(ScalarErrc::kNegativeRadicand,
                          "negative radicand at offset " + std::to_string(pos_), pos_);
      }
      Integer radicand = integer();
      expect(')');
      if (!radicand.fits_ulong_p()) fail("radicand too large");
      return ExactScalar::sqrt(radicand.get_ui());
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Integer integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ExactScalar parse_scalar(std::string_view text) { return ScalarParser(text).parse(); }

// --- rounding ----------------------------------------------------------------

Integer floor_scalar(const ExactScalar& x) {
  if (x.is_rational()) return fdiv(x.rational_part().get_num(), x.rational_part().get_den());
  const IntegerForm f = integer_form(x);
  // Q*sqrt(d) lies strictly in (s, s+1), and no multiple of D lies strictly
  // between P+s and P+s+1, hence floor((P+Q sqrt d)/D) = floor((P+s)/D).
  const Integer s = floor_radical(f.Q, x.radicand());
  return fdiv(f.P + s, f.D);
}

Integer ceil_scalar(const ExactScalar& x) { return -floor_scalar(-x); }

ExactScalar frac_scalar(const ExactScalar& x) { return x - ExactScalar(floor_scalar(x)); }

NearestInteger nearest_integer(const ExactScalar& x) {
  const ExactScalar shifted = x + ExactScalar::fraction(1, 2);
  NearestInteger out;
  out.value = floor_scalar(shifted);
  out.tie = shifted.is_integer();
  return out;
}

ExactScalar dist_to_integer(const ExactScalar& x) {
  const ExactScalar f = frac_scalar(x);
  const ExactScalar g = ExactScalar(1) - f;
  return f < g ? f : g;
}

ExactScalar abs(const ExactScalar& x) { return x.sign() < 0 ? -x : x; }

RationalInterval to_interval(const ExactScalar& x, unsigned precision) {
  if (x.is_rational()) return {x.rational_part(), x.rational_part()};
  const IntegerForm f = integer_form(x);
  Integer scale = 1;
  for (unsigned i = 0; i < precision; ++i) scale *= 10;
  // t <= |Q| sqrt(d) * scale < t + 1
  const Integer t = isqrt(f.Q * f.Q * Integer(static_cast<unsigned long>(x.radicand())) * scale * scale);
  Rational lo_rad(t, scale);
  Rational hi_rad(t + 1, scale);
  lo_rad.canonicalize();
  hi_rad.canonicalize();
  if (f.Q < 0) {
    Rational tmp = -hi_rad;
    hi_rad = -lo_rad;
    lo_rad = tmp;
  }
  RationalInterval out{(Rational(f.P) + lo_rad) / Rational(f.D),
                       (Rational(f.P) + hi_rad) / Rational(f.D)};
  out.lo.canonicalize();
  out.hi.canonicalize();
  return out;
}

std::string PiMultiple::to_string() const {
  const ExactScalar& c = coefficient_;
  if (c.is_rational()) {
    const Rational& q = c.rational_part();
    if (q == 0) return "0";
    std::string out;
    const Integer& num = q.get_num();
    if (num == -1) {
      out = "-pi";
    } else if (num == 1) {
      out = "pi";
    } else {
      out = num.get_str() + "*pi";
    }
    if (q.get_den() != 1) out += "/" + q.get_den().get_str();
    return out;
  }
  return "(" + c.to_literal() + ")*pi";
}

}  // namespace cijump
