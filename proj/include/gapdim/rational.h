#ifndef GAPDIM_RATIONAL_H_
#define GAPDIM_RATIONAL_H_

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace gapdim {

using BigInt = mpz_class;

// Exact rational number in lowest terms with a positive denominator.
//
// All combinatorial decisions in the library (band membership, shattering
// inequalities, measures, discrepancies) are made on Rationals; doubles only
// appear when rendering reports.
class Rational {
 public:
  Rational() = default;
  Rational(int64_t value) : value_(static_cast<long>(value)) {}  // NOLINT
  Rational(const BigInt& numerator, const BigInt& denominator);
  explicit Rational(const mpq_class& value);

  // Accepts "n", "-n", "n/d". Throws Error(kParse) on anything else or a zero
  // denominator.
  static Rational Parse(std::string_view text);

  // numerator / 2^exponent.
  static Rational Dyadic(uint64_t numerator, unsigned exponent);

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }
  const mpq_class& raw() const { return value_; }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const { return sgn(value_); }

  // Largest integer <= value.
  BigInt Floor() const;
  // Fractional part in [0, 1).
  Rational Frac() const;
  Rational Abs() const { return Rational(abs(value_)); }

  double ToDouble() const { return value_.get_d(); }
  // "n" for integers, "n/d" otherwise.
  std::string ToString() const;
  // Fixed 12 significant digits.
  std::string ToDecimal() const;

  Rational& operator+=(const Rational& other);
  Rational& operator-=(const Rational& other);
  Rational& operator*=(const Rational& other);
  Rational& operator/=(const Rational& other);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(-a.value_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return cmp(a.value_, b.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  mpq_class value_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational Min(const Rational& a, const Rational& b);
Rational Max(const Rational& a, const Rational& b);

// Smallest e >= 0 with 2^e >= x. Requires x > 0.
int CeilLog2(const Rational& x);

}  // namespace gapdim

#endif  // GAPDIM_RATIONAL_H_
