#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "qdyn/errors.hpp"

namespace qdyn {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// "p/q" with the "/q" dropped when the denominator is 1.
inline std::string fraction_string(const BigRat& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

namespace detail {

// Decimal-only integer parse. cpp_int's own string constructor treats a
// leading 0 as octal, which would corrupt digits pasted from decimals.
inline BigInt parse_decimal_int(std::string text, const std::string& original) {
  bool negative = false;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    negative = text[0] == '-';
    text.erase(0, 1);
  }
  if (text.empty()) throw argument_error("malformed rational literal '" + original + "'");
  BigInt v = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9')
      throw argument_error("malformed rational literal '" + original + "'");
    v = v * 10 + (ch - '0');
  }
  return negative ? -v : v;
}

}  // namespace detail

// Parse "p", "p/q", or a plain decimal like "1.9" into an exact rational.
inline BigRat parse_rational(const std::string& text) {
  if (text.empty()) throw argument_error("empty rational literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt p = detail::parse_decimal_int(text.substr(0, slash), text);
    BigInt q = detail::parse_decimal_int(text.substr(slash + 1), text);
    if (q == 0) throw argument_error("zero denominator in '" + text + "'");
    return BigRat(p, q);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return BigRat(detail::parse_decimal_int(text, text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::size_t frac_len = text.size() - dot - 1;
  BigInt p = detail::parse_decimal_int(digits, text);
  BigInt q = 1;
  for (std::size_t i = 0; i < frac_len; ++i) q *= 10;
  return BigRat(p, q);
}

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;  // exact: r is always a binomial coefficient
  }
  return r;
}

// Dense univariate polynomial with exact rational coefficients,
// coefficient i belonging to x^i. Trailing zeros are trimmed, so the
// zero polynomial has an empty coefficient list.
class RationalPoly {
public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<BigRat> coeffs) : c_(std::move(coeffs)) {
    trim();
  }

  static RationalPoly constant(BigRat v) {
    return RationalPoly(std::vector<BigRat>{std::move(v)});
  }
  static RationalPoly monomial(std::size_t degree, BigRat coeff = 1) {
    std::vector<BigRat> c(degree + 1);
    c[degree] = std::move(coeff);
    return RationalPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  // degree of the zero polynomial reported as -1
  long long degree() const { return static_cast<long long>(c_.size()) - 1; }

  long long min_degree() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) return static_cast<long long>(i);
    return -1;
  }

  const std::vector<BigRat>& coeffs() const { return c_; }
  BigRat coeff(std::size_t i) const { return i < c_.size() ? c_[i] : BigRat(0); }

  bool integer_coeffs() const {
    for (const auto& v : c_)
      if (denominator(v) != 1) return false;
    return true;
  }

  BigRat eval(const BigRat& x) const {
    BigRat acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  double eval(double x) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;)
      acc = acc * x + static_cast<double>(c_[i]);
    return acc;
  }

  RationalPoly& operator+=(const RationalPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  RationalPoly& operator-=(const RationalPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  RationalPoly& operator*=(const BigRat& s) {
    if (s == 0) {
      c_.clear();
      return *this;
    }
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) {
    a += b;
    return a;
  }
  friend RationalPoly operator-(RationalPoly a, const RationalPoly& b) {
    a -= b;
    return a;
  }
  friend RationalPoly operator*(RationalPoly a, const BigRat& s) {
    a *= s;
    return a;
  }
  friend RationalPoly operator*(const BigRat& s, RationalPoly a) {
    a *= s;
    return a;
  }

  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigRat> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return RationalPoly(std::move(c));
  }

  // multiply by x^k
  RationalPoly shifted_up(std::size_t k) const {
    if (is_zero()) return {};
    std::vector<BigRat> c(c_.size() + k);
    for (std::size_t i = 0; i < c_.size(); ++i) c[i + k] = c_[i];
    return RationalPoly(std::move(c));
  }

  // divide by x^k; the low-order coefficients must vanish
  RationalPoly shifted_down(std::size_t k) const {
    if (is_zero()) return {};
    if (static_cast<long long>(k) > min_degree())
      throw internal_error("shifted_down would produce a non-polynomial");
    std::vector<BigRat> c(c_.begin() + static_cast<std::ptrdiff_t>(k), c_.end());
    return RationalPoly(std::move(c));
  }

  friend bool operator==(const RationalPoly& a, const RationalPoly& b) {
    return a.c_ == b.c_;
  }

  std::string to_string(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      if (!first) os << " + ";
      first = false;
      os << fraction_string(c_[i]);
      if (i >= 1) os << "*" << var;
      if (i >= 2) os << "^" << i;
    }
    return os.str();
  }

private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<BigRat> c_;
};

}  // namespace qdyn
