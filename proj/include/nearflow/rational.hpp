#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "nearflow/errors.hpp"

namespace nearflow {

/// Exact arbitrary-precision rational, canonical at all times: denominator
/// positive, numerator and denominator coprime. Values that fit in 64 bits
/// are kept inline; anything larger is promoted to a GMP rational and demoted
/// back as soon as it fits again, so representation (and equality) is unique.
class Rational {
 public:
  Rational() = default;
  Rational(long long n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(int n) : num_(n) {}        // NOLINT(google-explicit-constructor)

  Rational(long long n, long long d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const long long g = std::gcd(n < 0 ? -static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n),
                                 static_cast<unsigned long long>(d));
    num_ = g ? n / g : 0;
    den_ = g ? d / g : 1;
  }

  Rational(const Rational& o) : num_(o.num_), den_(o.den_) {
    if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
  }
  Rational(Rational&&) noexcept = default;
  Rational& operator=(const Rational& o) {
    if (this != &o) {
      num_ = o.num_;
      den_ = o.den_;
      big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
    }
    return *this;
  }
  Rational& operator=(Rational&&) noexcept = default;

  /// Parses "n", "-n", or "n/d" (d > 0 after normalization; "3/-4" is
  /// rejected, signs belong on the numerator).
  static Rational parse(std::string_view s) {
    if (!looks_like_rational(s)) throw ParseError("bad rational literal: '" + std::string(s) + "'");
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);  // GMP rejects a leading plus
    mpq_class q;
    if (q.set_str(std::string(s), 10) != 0) throw ParseError("bad rational literal: '" + std::string(s) + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in rational literal: '" + std::string(s) + "'");
    q.canonicalize();
    return from_mpq(q);
  }

  std::string str() const {
    if (big_) return big_->get_str();
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  bool is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

  int sign() const {
    if (big_) return mpq_sgn(big_->get_mpq_t());
    return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0);
  }

  double to_double() const { return big_ ? big_->get_d() : static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator-(const Rational& a) {
    if (a.big_) return from_mpq(-*a.big_);
    Rational r;
    r.num_ = -a.num_;
    r.den_ = a.den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) { return add_sub(a, b, false); }
  friend Rational operator-(const Rational& a, const Rational& b) { return add_sub(a, b, true); }

  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.big_ || b.big_) return from_mpq(a.to_mpq() * b.to_mpq());
    if (a.num_ == 0 || b.num_ == 0) return Rational();
    if ((a.den_ | b.den_) == 1) {  // integer * integer, the dominant case
      Rational r;
      if (!__builtin_mul_overflow(a.num_, b.num_, &r.num_)) return r;
      return make_reduced(static_cast<i128>(a.num_) * b.num_, 1);
    }
    // Cross-reduction of canonical operands yields a canonical product.
    const long long g1 = static_cast<long long>(std::gcd(iabs(a.num_), static_cast<unsigned long long>(b.den_)));
    const long long g2 = static_cast<long long>(std::gcd(iabs(b.num_), static_cast<unsigned long long>(a.den_)));
    long long n, d;
    if (!__builtin_mul_overflow(a.num_ / g1, b.num_ / g2, &n) &&
        !__builtin_mul_overflow(a.den_ / g2, b.den_ / g1, &d)) {
      Rational r;
      r.num_ = n;
      r.den_ = d;
      return r;
    }
    return make_reduced(static_cast<i128>(a.num_ / g1) * (b.num_ / g2),
                        static_cast<i128>(a.den_ / g2) * (b.den_ / g1));
  }

  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero_any()) throw DomainError("division by zero rational");
    if (a.big_ || b.big_) return from_mpq(a.to_mpq() / b.to_mpq());
    if (a.num_ == 0) return Rational();
    const long long g1 = std::gcd(iabs(a.num_), iabs(b.num_));
    const long long g2 = std::gcd(static_cast<unsigned long long>(b.den_), static_cast<unsigned long long>(a.den_));
    i128 n = static_cast<i128>(a.num_ / g1) * (b.den_ / g2);
    i128 d = static_cast<i128>(a.den_ / g2) * (b.num_ / g1);
    if (d < 0) {
      n = -n;
      d = -d;
    }
    return make_reduced(n, d);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  /// Multiplicative inverse; the scalar field analogue of try_inverse.
  Rational inverse() const {
    if (is_zero_any()) throw DomainError("inverse of zero rational");
    return Rational(1) / *this;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return mpq_equal(a.big_->get_mpq_t(), b.big_->get_mpq_t()) != 0;
    return false;  // one fits in 64 bits, the other provably does not
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  friend bool operator<(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_)
      return static_cast<i128>(a.num_) * b.den_ < static_cast<i128>(b.num_) * a.den_;
    return mpq_cmp(a.to_mpq().get_mpq_t(), b.to_mpq().get_mpq_t()) < 0;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& a) { return os << a.str(); }

  /// Exact square root if the value is a perfect square of a rational,
  /// otherwise no value. Used by the rational-safe constraint checks.
  static bool exact_sqrt(const Rational& a, Rational& out) {
    if (a.sign() < 0) return false;
    mpq_class q = a.to_mpq();
    mpz_class num = q.get_num(), den = q.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0) return false;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    out = from_mpq(mpq_class(rn) / mpq_class(rd));
    return true;
  }

  mpq_class to_mpq() const {
    if (big_) return *big_;
    mpq_class q(static_cast<long>(num_), static_cast<long>(den_));
    q.canonicalize();
    return q;
  }

 private:
  using i128 = __int128;

  static unsigned long long iabs(long long v) {
    return v < 0 ? -static_cast<unsigned long long>(v) : static_cast<unsigned long long>(v);
  }

  bool is_zero_any() const { return big_ ? mpq_sgn(big_->get_mpq_t()) == 0 : num_ == 0; }

  static bool looks_like_rational(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    std::size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    if (digits == 0) return false;
    if (i == s.size()) return true;
    if (s[i] != '/') return false;
    ++i;
    digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    return digits > 0 && i == s.size();
  }

  static bool fits_i64(i128 v) {
    return v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max();
  }

  static i128 gcd_i128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  // n/d with d > 0 and gcd(n, d) possibly > 1; reduces and stores.
  static Rational make_reduced(i128 n, i128 d) {
    const i128 g = gcd_i128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    if (fits_i64(n) && fits_i64(d)) {
      r.num_ = static_cast<long long>(n);
      r.den_ = static_cast<long long>(d);
      return r;
    }
    return make_big(n, d);
  }

  // Already-canonical n/d too large for the inline representation.
  static Rational make_big(i128 n, i128 d) {
    Rational r;
    r.big_ = std::make_unique<mpq_class>(i128_to_mpz(n));
    *r.big_ /= mpq_class(i128_to_mpz(d));
    return r;
  }

  static mpz_class i128_to_mpz(i128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(u >> 64));
    mpz_class out = hi << 64 | mpz_class(static_cast<unsigned long>(u & 0xffffffffffffffffULL));
    return neg ? mpz_class(-out) : out;
  }

  static Rational from_mpq(const mpq_class& q0) {
    mpq_class q = q0;
    q.canonicalize();
    Rational r;
    if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
      r.num_ = q.get_num().get_si();
      r.den_ = q.get_den().get_si();
    } else {
      r.big_ = std::make_unique<mpq_class>(q);
    }
    return r;
  }

  static Rational add_sub(const Rational& a, const Rational& b, bool sub) {
    if (a.big_ || b.big_) return from_mpq(sub ? mpq_class(a.to_mpq() - b.to_mpq()) : mpq_class(a.to_mpq() + b.to_mpq()));
    const long long bn = sub ? -b.num_ : b.num_;
    if ((a.den_ | b.den_) == 1) {  // integer + integer
      Rational r;
      if (!__builtin_add_overflow(a.num_, bn, &r.num_)) return r;
      return make_reduced(static_cast<i128>(a.num_) + bn, 1);
    }
    const long long g0 = static_cast<long long>(
        std::gcd(static_cast<unsigned long long>(a.den_), static_cast<unsigned long long>(b.den_)));
    const long long ad = a.den_ / g0, bd = b.den_ / g0;
    const i128 n = static_cast<i128>(a.num_) * bd + static_cast<i128>(bn) * ad;
    if (g0 == 1) {
      // Coprime denominators: the result is already in lowest terms.
      const i128 d = static_cast<i128>(ad) * b.den_;
      Rational r;
      if (fits_i64(n) && fits_i64(d)) {
        r.num_ = static_cast<long long>(n);
        r.den_ = static_cast<long long>(d);
        return r;
      }
      return make_big(n, d);
    }
    // gcd(n, ad * bd * g0) = gcd(n, g0) since the cross terms stay coprime.
    long long rem = static_cast<long long>(n % g0);
    if (rem < 0) rem += g0;
    const long long g1 = static_cast<long long>(
        std::gcd(static_cast<unsigned long long>(rem), static_cast<unsigned long long>(g0)));
    const i128 num = n / g1;
    const i128 den = static_cast<i128>(ad) * (b.den_ / g1);
    Rational r;
    if (fits_i64(num) && fits_i64(den)) {
      r.num_ = static_cast<long long>(num);
      r.den_ = static_cast<long long>(den);
      return r;
    }
    return make_big(num, den);
  }

  // Small mode: value num_/den_, canonical, den_ >= 1. Big mode: big_ set,
  // value does not fit in 64/64 bits.
  long long num_ = 0;
  long long den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

/// Shorthand used throughout the tests and tables.
inline Rational rat(long long n, long long d = 1) { return Rational(n, d); }

}  // namespace nearflow
