#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qdyn/errors.hpp"
#include "qdyn/quad_family.hpp"
#include "qdyn/rational_poly.hpp"
#include "qdyn/rng.hpp"

// Monte-Carlo sampling of the balanced measure of T_alpha by random
// inverse iteration z <- +-sqrt((1-z)/alpha), empirical diagnostics
// against the exact moments and the alpha = 2 arcsine law, and the
// chain certificate refuting a real Julia set for alpha in (0, 2).

namespace qdyn::sampler {

struct SampleCloud {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  std::size_t count = 0;
  std::string generator;
  std::vector<std::complex<double>> points;
};

// Random backward orbit from the fixed point x_*: each step applies one of
// the two inverse branches chosen by a fair seeded coin. Inverse iteration
// converges to the Julia set from any non-exceptional start, so a burn-in
// of a few dozen steps suffices for every alpha in range.
inline SampleCloud sample(double alpha, std::size_t count, std::size_t burn_in,
                          std::uint64_t seed) {
  if (count < 1) throw argument_error("sample requires count >= 1");
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw argument_error("sample requires alpha in (0, 2]");
  SampleCloud cloud;
  cloud.alpha = alpha;
  cloud.seed = seed;
  cloud.burn_in = burn_in;
  cloud.count = count;
  cloud.generator = SplitMix64::name();
  cloud.points.reserve(count);
  SplitMix64 rng(seed);
  std::complex<double> z(quad::fixed_point(alpha), 0.0);
  const std::size_t total = burn_in + count;
  for (std::size_t i = 0; i < total; ++i) {
    const double sign = rng.coin() ? 1.0 : -1.0;
    z = sign * std::sqrt((1.0 - z) / alpha);
    if (i >= burn_in) cloud.points.push_back(z);
  }
  return cloud;
}

// Sample averages of z^m for m = 0 .. 2*k_max + 1.
inline std::vector<std::complex<double>> empirical_moments(const SampleCloud& cloud,
                                                           int k_max) {
  if (cloud.points.empty()) throw argument_error("empirical_moments on empty cloud");
  if (k_max < 0) throw argument_error("empirical_moments requires k_max >= 0");
  const std::size_t m_max = 2 * static_cast<std::size_t>(k_max) + 1;
  std::vector<std::complex<double>> sums(m_max + 1, {0.0, 0.0});
  for (const auto& z : cloud.points) {
    std::complex<double> p(1.0, 0.0);
    for (std::size_t m = 0; m <= m_max; ++m) {
      sums[m] += p;
      p *= z;
    }
  }
  const double n = static_cast<double>(cloud.points.size());
  for (auto& s : sums) s /= n;
  return sums;
}

struct BalanceResult {
  bool pass = false;
  std::complex<double> value{0.0, 0.0};
};

// The balanced measure kills z * phi(T(z)) for every continuous phi; the
// sample average must vanish up to Monte-Carlo noise.
template <typename Phi>
BalanceResult balance_check(const SampleCloud& cloud, Phi&& phi, double tol) {
  if (cloud.points.empty()) throw argument_error("balance_check on empty cloud");
  std::complex<double> sum{0.0, 0.0};
  for (const auto& z : cloud.points)
    sum += z * std::complex<double>(phi(1.0 - cloud.alpha * z * z));
  sum /= static_cast<double>(cloud.points.size());
  return {std::abs(sum) <= tol, sum};
}

// Two-sample Kolmogorov distance sup |F_a - F_b| (consumes copies; sorts).
// Ties must advance both sides together or identical samples would show a
// spurious gap.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw argument_error("ks_distance on empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

// One-sample Kolmogorov distance against a CDF.
template <typename Cdf>
double ks_distance_to_cdf(std::vector<double> xs, Cdf&& cdf) {
  if (xs.empty()) throw argument_error("ks_distance_to_cdf on empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// CDF of the arcsine law on [-1, 1], the balanced measure at alpha = 2.
inline double arcsine_cdf(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 0.5 + std::asin(t) / std::numbers::pi;
}

// Kolmogorov distance of the real parts of the cloud to the arcsine CDF.
inline double arcsine_diagnostic(const SampleCloud& cloud) {
  if (cloud.points.empty()) throw argument_error("arcsine_diagnostic on empty cloud");
  std::vector<double> xs;
  xs.reserve(cloud.points.size());
  for (const auto& z : cloud.points) xs.push_back(z.real());
  return ks_distance_to_cdf(std::move(xs), arcsine_cdf);
}

struct SymmetryResult {
  bool pass = false;
  double ks_real = 0.0;
  double ks_imag = 0.0;
};

// The Julia set and its balanced measure are invariant under z -> -z;
// compare the empirical laws of z and -z coordinate-wise.
inline SymmetryResult symmetry_check(const SampleCloud& cloud, double tol) {
  if (cloud.points.empty()) throw argument_error("symmetry_check on empty cloud");
  std::vector<double> re, re_neg, im, im_neg;
  re.reserve(cloud.points.size());
  im.reserve(cloud.points.size());
  for (const auto& z : cloud.points) {
    re.push_back(z.real());
    re_neg.push_back(-z.real());
    im.push_back(z.imag());
    im_neg.push_back(-z.imag());
  }
  SymmetryResult r;
  r.ks_real = ks_distance(std::move(re), std::move(re_neg));
  r.ks_imag = ks_distance(std::move(im), std::move(im_neg));
  r.pass = r.ks_real <= tol && r.ks_imag <= tol;
  return r;
}

inline double support_bound(const SampleCloud& cloud) {
  if (cloud.points.empty()) throw argument_error("support_bound on empty cloud");
  double m = 0.0;
  for (const auto& z : cloud.points) m = std::max(m, std::abs(z));
  return m;
}

enum class CertVerdict {
  refuted,            // some b_m <= 0: the real-inclusion hypothesis collapses
  fixed_chain,        // b stops decreasing (alpha = 2): no contradiction arises
  inconclusive_at_cap
};

inline const char* cert_verdict_name(CertVerdict v) {
  switch (v) {
    case CertVerdict::refuted: return "refuted";
    case CertVerdict::fixed_chain: return "fixed-chain";
    case CertVerdict::inconclusive_at_cap: return "inconclusive-at-cap";
  }
  return "?";
}

// If the Julia set were real it would be confined to [-b_n, b_n] for the
// whole chain b_0 = alpha - 1, b_{n+1} = alpha*b_n^2 - 1; the first
// nonpositive b_m certifies the contradiction. The exact inequality
// b_1 > 0 (alpha*(alpha-1)^2 > 1) is used rather than rounded thresholds.
template <typename Num>
struct RealnessCertificateT {
  Num alpha{};
  std::vector<Num> chain;
  std::optional<std::size_t> failure_index;
  CertVerdict verdict = CertVerdict::inconclusive_at_cap;
};

using RealnessCertificate = RealnessCertificateT<double>;
using ExactRealnessCertificate = RealnessCertificateT<BigRat>;

namespace detail {

template <typename Num>
RealnessCertificateT<Num> realness_chain(const Num& alpha, std::size_t cap) {
  RealnessCertificateT<Num> cert;
  cert.alpha = alpha;
  Num b = alpha - 1;
  cert.chain.push_back(b);
  if (b <= 0) {
    // alpha <= 1: a real Julia set would already be empty of room
    cert.failure_index = 0;
    cert.verdict = CertVerdict::refuted;
    return cert;
  }
  for (std::size_t n = 1; n <= cap; ++n) {
    Num next = alpha * b * b - 1;
    cert.chain.push_back(next);
    if (next <= 0) {
      cert.failure_index = n;
      cert.verdict = CertVerdict::refuted;
      return cert;
    }
    if (next >= b) {
      // non-decreasing chain never fails; happens at alpha = 2
      cert.verdict = CertVerdict::fixed_chain;
      return cert;
    }
    b = next;
  }
  cert.verdict = CertVerdict::inconclusive_at_cap;
  return cert;
}

}  // namespace detail

inline RealnessCertificate realness_certificate(double alpha, std::size_t cap) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw argument_error("realness_certificate requires alpha in (0, 2]");
  if (cap < 1) throw argument_error("realness_certificate requires cap >= 1");
  return detail::realness_chain(alpha, cap);
}

inline ExactRealnessCertificate realness_certificate_exact(const BigRat& alpha,
                                                           std::size_t cap) {
  if (!(alpha > 0 && alpha <= 2))
    throw argument_error("realness_certificate requires alpha in (0, 2]");
  if (cap < 1) throw argument_error("realness_certificate requires cap >= 1");
  return detail::realness_chain(alpha, cap);
}

}  // namespace qdyn::sampler
