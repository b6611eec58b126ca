#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdyn/errors.hpp"
#include "qdyn/quad_family.hpp"
#include "qdyn/rational_poly.hpp"

// Even moments lambda_alpha(k) of the balanced measure of
// T_alpha(z) = 1 - alpha*z^2, computed exactly as polynomials in
// beta = 1/alpha from the push-forward relation
//
//   sum_{k=0..n} (-1)^k C(n,k) alpha^k lambda(k) = 0            (n odd)
//                                                = lambda(n/2)  (n even),
//
// together with the companion polynomials phi_k(alpha), the moment
// generating (Stieltjes) series, and the characteristic-function series.

namespace qdyn::moments {

// lambda polynomials in beta = 1/alpha; entry k has min degree >= k.
class MomentTable {
public:
  explicit MomentTable(std::vector<RationalPoly> lambdas)
      : lambdas_(std::move(lambdas)) {}

  int k_max() const { return static_cast<int>(lambdas_.size()) - 1; }

  const RationalPoly& lambda(int k) const {
    if (k < 0 || k > k_max()) throw argument_error("moment index out of table range");
    return lambdas_[static_cast<std::size_t>(k)];
  }

  // lambda_alpha(k), evaluated exactly at beta = 1/alpha.
  BigRat at(const BigRat& alpha, int k) const {
    if (alpha == 0) throw argument_error("moment evaluation requires alpha != 0");
    return lambda(k).eval(BigRat(denominator(alpha), numerator(alpha)));
  }

private:
  std::vector<RationalPoly> lambdas_;
};

// Solves the relation for lambda(n) degree by degree. Internally uses the
// shifted polynomials m_k = lambda(k)/beta^k, for which the relation is
// division-free:
//   m_n = (-1)^n * [rhs_n - sum_{k<n} (-1)^k C(n,k) m_k],
//   rhs_n = beta^(n/2) m_(n/2) for even n, 0 for odd n.
inline MomentTable moment_table(int k_max) {
  if (k_max < 0) throw argument_error("moment_table requires k_max >= 0");
  std::vector<RationalPoly> m;
  m.reserve(static_cast<std::size_t>(k_max) + 1);
  m.push_back(RationalPoly::constant(1));
  for (int n = 1; n <= k_max; ++n) {
    RationalPoly acc;
    for (int k = 0; k < n; ++k) {
      RationalPoly term = m[static_cast<std::size_t>(k)] *
                          BigRat(binomial(static_cast<unsigned>(n),
                                          static_cast<unsigned>(k)));
      if (k % 2 == 0)
        acc += term;
      else
        acc -= term;
    }
    RationalPoly rhs;
    if (n % 2 == 0)
      rhs = m[static_cast<std::size_t>(n / 2)].shifted_up(
          static_cast<std::size_t>(n / 2));
    RationalPoly value = rhs - acc;
    if (n % 2 != 0) value *= BigRat(-1);
    m.push_back(std::move(value));
  }
  std::vector<RationalPoly> lambdas;
  lambdas.reserve(m.size());
  for (int k = 0; k <= k_max; ++k)
    lambdas.push_back(m[static_cast<std::size_t>(k)].shifted_up(
        static_cast<std::size_t>(k)));
  return MomentTable(std::move(lambdas));
}

// phi_k(a) = (-1)^k a^(-k) lambda_{1/a}(k): substitute beta -> a in the
// lambda polynomial and strip the guaranteed beta^k factor. The result
// must be a polynomial with integer coefficients; anything else means the
// recursion itself is broken.
inline std::vector<RationalPoly> phi_table(const MomentTable& table) {
  std::vector<RationalPoly> phis;
  phis.reserve(static_cast<std::size_t>(table.k_max()) + 1);
  for (int k = 0; k <= table.k_max(); ++k) {
    const RationalPoly& lam = table.lambda(k);
    if (!lam.is_zero() && lam.min_degree() < k)
      throw internal_error("lambda(k) not divisible by beta^k");
    RationalPoly phi = lam.shifted_down(static_cast<std::size_t>(k));
    if (k % 2 != 0) phi *= BigRat(-1);
    if (!phi.integer_coeffs())
      throw internal_error("phi_k has non-integer coefficients");
    phis.push_back(std::move(phi));
  }
  return phis;
}

inline std::vector<RationalPoly> phi_table(int k_max) {
  return phi_table(moment_table(k_max));
}

struct PhiIdentityResult {
  bool pass = true;
  int failing_n = -1;
  RationalPoly residual;
};

// Exact ring verification of
//   sum_k C(n,k) phi_k = 0                                (n odd)
//                      = (-1)^(n/2) phi_(n/2) a^(n/2)     (n even)
// for every n <= n_max.
inline PhiIdentityResult phi_identity_check(const std::vector<RationalPoly>& phis,
                                            int n_max) {
  if (static_cast<int>(phis.size()) <= n_max)
    throw argument_error("phi table does not cover n_max");
  for (int n = 0; n <= n_max; ++n) {
    RationalPoly lhs;
    for (int k = 0; k <= n; ++k)
      lhs += phis[static_cast<std::size_t>(k)] *
             BigRat(binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)));
    RationalPoly rhs;
    if (n % 2 == 0) {
      rhs = phis[static_cast<std::size_t>(n / 2)].shifted_up(
          static_cast<std::size_t>(n / 2));
      if ((n / 2) % 2 != 0) rhs *= BigRat(-1);
    }
    if (!(lhs == rhs)) return {false, n, lhs - rhs};
  }
  return {};
}

inline PhiIdentityResult phi_identity_check(int n_max) {
  return phi_identity_check(phi_table(n_max), n_max);
}

// Lazy exact values lambda_alpha(k) at a fixed rational alpha, via the
// same relation solved value-by-value. Used by the series evaluators,
// which may need more terms than a polynomial table is worth building for.
class MomentValues {
public:
  explicit MomentValues(BigRat alpha) : alpha_(std::move(alpha)) {
    if (alpha_ == 0) throw argument_error("moment values require alpha != 0");
    vals_.push_back(1);
    alpha_pows_.push_back(1);
  }

  const BigRat& alpha() const { return alpha_; }

  const BigRat& operator[](std::size_t k) {
    while (vals_.size() <= k) extend();
    return vals_[k];
  }

private:
  void extend() {
    std::size_t n = vals_.size();
    alpha_pows_.push_back(alpha_pows_.back() * alpha_);
    BigRat acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
      BigRat term = BigRat(binomial(static_cast<unsigned>(n),
                                    static_cast<unsigned>(k))) *
                    alpha_pows_[k] * vals_[k];
      if (k % 2 == 0)
        acc += term;
      else
        acc -= term;
    }
    BigRat rhs = (n % 2 == 0) ? vals_[n / 2] : BigRat(0);
    BigRat value = (rhs - acc) / alpha_pows_[n];
    if (n % 2 != 0) value = -value;
    vals_.push_back(std::move(value));
  }

  BigRat alpha_;
  std::vector<BigRat> vals_;
  std::vector<BigRat> alpha_pows_;
};

struct SeriesValue {
  std::complex<double> value{0.0, 0.0};
  int terms_used = 0;
  double last_term = 0.0;  // magnitude of the last term added (heuristic error proxy)
  bool converged = false;
};

// Moment generating series -(1/z) sum_k lambda(k) z^(-2k) of the resolvent
// integral dmu(x)/(x-z). Valid for |z| beyond the support radius; the
// invariant-disk radius of the family is used as the domain bound.
inline SeriesValue stieltjes(const BigRat& alpha, double z, double tol,
                             int term_cap) {
  if (!(tol > 0.0)) throw argument_error("stieltjes requires tol > 0");
  if (term_cap < 1) throw argument_error("stieltjes requires term_cap >= 1");
  double a = static_cast<double>(alpha);
  if (!(a > 0.0 && a <= 2.0))
    throw argument_error("stieltjes requires alpha in (0, 2]");
  if (z == 0.0) throw argument_error("stieltjes requires z != 0");
  double radius = quad::escape_radius(a);
  if (!(std::abs(z) > radius)) {
    std::ostringstream os;
    os << "stieltjes requires |z| > " << radius << " (support radius bound)";
    throw argument_error(os.str());
  }

  MomentValues lam{alpha};
  const double inv_z2 = 1.0 / (z * z);
  double pow = 1.0;  // z^(-2k)
  double sum = 0.0;
  SeriesValue out;
  for (int k = 0; k < term_cap; ++k) {
    double term = static_cast<double>(lam[static_cast<std::size_t>(k)]) * pow;
    sum += term;
    out.terms_used = k + 1;
    out.last_term = std::abs(term / z);
    if (out.last_term < tol) {
      out.converged = true;
      break;
    }
    pow *= inv_z2;
  }
  out.value = std::complex<double>(-sum / z, 0.0);
  return out;
}

struct FourierPair {
  SeriesValue moment_series;   // sum (-1)^n lambda(n) z^(2n) / (2n)!
  SeriesValue shifted_series;  // e^(-iz) sum (i*alpha)^n lambda(n) z^n / n!
  double discrepancy = 0.0;
  double tail_bound = 0.0;  // bound on the combined truncation error
};

// The characteristic function integral e^(-itz) dmu(t) via its two series
// expansions; both are entire in z, so they must agree up to truncation.
inline FourierPair fourier(const BigRat& alpha, double z, int n_max) {
  if (n_max < 0) throw argument_error("fourier requires n_max >= 0");
  double a = static_cast<double>(alpha);
  if (!(a > 0.0 && a <= 2.0))
    throw argument_error("fourier requires alpha in (0, 2]");

  MomentValues lam{alpha};
  FourierPair out;

  // moment series: w_n = z^(2n)/(2n)!
  {
    double w = 1.0;
    double sum = 0.0;
    double term = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      double l = static_cast<double>(lam[static_cast<std::size_t>(n)]);
      term = (n % 2 == 0 ? l : -l) * w;
      sum += term;
      w *= z * z / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    }
    double next = static_cast<double>(lam[static_cast<std::size_t>(n_max) + 1]) * w;
    out.moment_series.value = {sum, 0.0};
    out.moment_series.terms_used = n_max + 1;
    out.moment_series.last_term = std::abs(term);
    out.moment_series.converged = true;
    out.tail_bound += 2.0 * std::abs(next);
  }

  // shifted series: w_n = (i*alpha*z)^n / n!
  {
    const std::complex<double> iaz(0.0, a * z);
    std::complex<double> w{1.0, 0.0};
    std::complex<double> sum{0.0, 0.0};
    std::complex<double> term{0.0, 0.0};
    for (int n = 0; n <= n_max; ++n) {
      double l = static_cast<double>(lam[static_cast<std::size_t>(n)]);
      term = l * w;
      sum += term;
      w *= iaz / (static_cast<double>(n) + 1.0);
    }
    std::complex<double> next =
        static_cast<double>(lam[static_cast<std::size_t>(n_max) + 1]) * w;
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, -z));
    out.shifted_series.value = phase * sum;
    out.shifted_series.terms_used = n_max + 1;
    out.shifted_series.last_term = std::abs(term);
    out.shifted_series.converged = true;
    out.tail_bound += 2.0 * std::abs(next);
  }

  out.discrepancy = std::abs(out.moment_series.value - out.shifted_series.value);
  return out;
}

struct CoefficientReport {
  bool all_nonneg_integers = true;
  // (k, power of beta) entries whose coefficient is negative or fractional
  std::vector<std::pair<int, std::size_t>> violations;
};

// Empirical pattern check: every lambda-polynomial coefficient observed so
// far is a nonnegative integer. Violations are reported, not fatal.
inline CoefficientReport coefficient_report(const MomentTable& table) {
  CoefficientReport rep;
  for (int k = 0; k <= table.k_max(); ++k) {
    const auto& cs = table.lambda(k).coeffs();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (denominator(cs[i]) != 1 || cs[i] < 0) {
        rep.all_nonneg_integers = false;
        rep.violations.emplace_back(k, i);
      }
    }
  }
  return rep;
}

// CSV rows "k,<coefficients of lambda_k ascending in beta>,<lambda at alpha>"
// with exact integer/fraction strings.
inline std::string moment_table_csv(const MomentTable& table, const BigRat& alpha) {
  std::ostringstream os;
  os << "k,coeffs,lambda\n";
  for (int k = 0; k <= table.k_max(); ++k) {
    os << k << ",\"";
    const auto& cs = table.lambda(k).coeffs();
    if (cs.empty()) os << "0";
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (i) os << " ";
      os << fraction_string(cs[i]);
    }
    os << "\"," << fraction_string(table.at(alpha, k)) << "\n";
  }
  return os.str();
}

}  // namespace qdyn::moments
