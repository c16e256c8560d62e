#include "gapdim/rational.h"

#include <cctype>
#include <cstdio>

#include "gapdim/error.h"

namespace gapdim {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kInvalidInterval: return "InvalidInterval";
    case ErrorCode::kInvalidResolution: return "InvalidResolution";
    case ErrorCode::kSegmentIndexOutOfRange: return "SegmentIndexOutOfRange";
    case ErrorCode::kRegularityUndefined: return "RegularityUndefined";
    case ErrorCode::kInvalidLevelPair: return "InvalidLevelPair";
    case ErrorCode::kInvalidMesh: return "InvalidMesh";
    case ErrorCode::kInvalidGeneratorSpec: return "InvalidGeneratorSpec";
    case ErrorCode::kInvalidFunction: return "InvalidFunction";
    case ErrorCode::kInvalidClass: return "InvalidClass";
    case ErrorCode::kMalformedCertificate: return "MalformedCertificate";
    case ErrorCode::kEmptyPointSet: return "EmptyPointSet";
    case ErrorCode::kInvalidCap: return "InvalidCap";
    case ErrorCode::kJoinNotFull: return "JoinNotFull";
    case ErrorCode::kStrictnessLost: return "StrictnessLost";
    case ErrorCode::kNotNonAdjacent: return "NotNonAdjacent";
    case ErrorCode::kNotDisjointFamily: return "NotDisjointFamily";
    case ErrorCode::kPtreePreconditionViolated:
      return "PtreePreconditionViolated";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kMissingPayload: return "MissingPayload";
    case ErrorCode::kNotErgodic: return "NotErgodic";
    case ErrorCode::kInvalidProcess: return "InvalidProcess";
    case ErrorCode::kNoMarginalExpectation: return "NoMarginalExpectation";
    case ErrorCode::kInvalidSplit: return "InvalidSplit";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

Rational::Rational(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) {
    throw Error(ErrorCode::kParse, "zero denominator");
  }
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational::Rational(const mpq_class& value) : value_(value) {
  value_.canonicalize();
}

namespace {

bool IsInteger(std::string_view s) {
  size_t i = 0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

BigInt ToBigInt(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  return BigInt(std::string(s), 10);
}

}  // namespace

Rational Rational::Parse(std::string_view text) {
  const std::string_view s = Trim(text);
  const size_t slash = s.find('/');
  if (slash == std::string_view::npos) {
    if (!IsInteger(s)) {
      throw Error(ErrorCode::kParse,
                  "not a rational: '" + std::string(text) + "'");
    }
    return Rational(ToBigInt(s), BigInt(1));
  }
  const std::string_view num = Trim(s.substr(0, slash));
  const std::string_view den = Trim(s.substr(slash + 1));
  if (!IsInteger(num) || !IsInteger(den) || den[0] == '-') {
    throw Error(ErrorCode::kParse,
                "not a rational: '" + std::string(text) + "'");
  }
  return Rational(ToBigInt(num), ToBigInt(den));
}

Rational Rational::Dyadic(uint64_t numerator, unsigned exponent) {
  mpz_class num;
  mpz_import(num.get_mpz_t(), 1, 1, sizeof(numerator), 0, 0, &numerator);
  mpz_class den(1);
  den <<= exponent;
  return Rational(num, den);
}

BigInt Rational::Floor() const {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return q;
}

Rational Rational::Frac() const {
  return *this - Rational(Floor(), BigInt(1));
}

std::string Rational::ToString() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::string Rational::ToDecimal() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", ToDouble());
  return buf;
}

Rational& Rational::operator+=(const Rational& other) {
  value_ += other.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& other) {
  value_ -= other.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& other) {
  value_ *= other.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& other) {
  if (other.is_zero()) throw Error(ErrorCode::kInvalidArgument, "division by zero");
  value_ /= other.value_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.ToString();
}

Rational Min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational Max(const Rational& a, const Rational& b) { return a < b ? b : a; }

int CeilLog2(const Rational& x) {
  if (x.sign() <= 0) throw Error(ErrorCode::kInvalidArgument, "CeilLog2 of non-positive");
  int e = 0;
  Rational power(1);
  while (power < x) {
    power *= Rational(2);
    ++e;
  }
  return e;
}

}  // namespace gapdim
