#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdyn/errors.hpp"
#include "qdyn/rational_poly.hpp"
#include "qdyn/rng.hpp"

// The unitary group {T^t} generated by a permutation T acting on
// L2(Omega) by composition, its spectral measures, and exact
// autocorrelations. Everything reduces to per-cycle discrete Fourier
// analysis: on a cycle of length M the eigenvectors are
// f_k(T^l b) = e^(2*pi*i*k*l/M) with T-eigenvalue e^(2*pi*i*k/M),
// k = 0..M-1, and T^t scales component k by e^(2*pi*i*k*t/M).

namespace qdyn::perm {

struct Permutation {
  std::size_t size = 0;
  std::vector<std::size_t> image;
  std::vector<std::size_t> inverse;
  // canonical cycles: each starts at its minimal element and lists
  // b, Tb, T^2 b, ...; cycles sorted by their minimal element
  std::vector<std::vector<std::size_t>> cycles;
  std::vector<std::size_t> cycle_index;   // state -> index into cycles
  std::vector<std::size_t> cycle_offset;  // state -> position within its cycle

  std::size_t apply(std::size_t x) const { return image[x]; }

  std::size_t apply_n(std::size_t x, long long n) const {
    const auto& cyc = cycles[cycle_index[x]];
    const long long m = static_cast<long long>(cyc.size());
    long long pos = (static_cast<long long>(cycle_offset[x]) + n) % m;
    if (pos < 0) pos += m;
    return cyc[static_cast<std::size_t>(pos)];
  }
};

// Validates the image table and produces the canonical cycle decomposition.
inline Permutation decompose(std::vector<std::size_t> image) {
  Permutation p;
  p.size = image.size();
  std::vector<std::size_t> seen(p.size, p.size);
  for (std::size_t x = 0; x < p.size; ++x) {
    std::size_t y = image[x];
    if (y >= p.size) {
      std::ostringstream os;
      os << "image[" << x << "] = " << y << " out of range";
      throw argument_error(os.str());
    }
    if (seen[y] != p.size) {
      std::ostringstream os;
      os << "not a bijection: image " << y << " duplicated at " << seen[y]
         << " and " << x;
      throw argument_error(os.str());
    }
    seen[y] = x;
  }
  p.image = std::move(image);
  p.inverse = std::move(seen);
  p.cycle_index.assign(p.size, 0);
  p.cycle_offset.assign(p.size, 0);
  std::vector<bool> visited(p.size, false);
  for (std::size_t start = 0; start < p.size; ++start) {
    if (visited[start]) continue;
    std::vector<std::size_t> cyc;
    std::size_t x = start;
    do {
      visited[x] = true;
      p.cycle_index[x] = p.cycles.size();
      p.cycle_offset[x] = cyc.size();
      cyc.push_back(x);
      x = p.image[x];
    } while (x != start);
    p.cycles.push_back(std::move(cyc));
  }
  return p;
}

using L2Vector = std::vector<std::complex<double>>;

// the normalized inner product (1/|Omega|) sum f(a) conj(g(a))
inline std::complex<double> inner(const L2Vector& f, const L2Vector& g) {
  if (f.size() != g.size()) throw argument_error("inner: size mismatch");
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return s / static_cast<double>(f.size());
}

inline double l2_norm(const L2Vector& f) {
  double s = 0.0;
  for (const auto& v : f) s += std::norm(v);
  return std::sqrt(s / static_cast<double>(f.size()));
}

inline L2Vector indicator(std::size_t size, const std::vector<std::size_t>& subset) {
  L2Vector f(size, {0.0, 0.0});
  for (std::size_t x : subset) {
    if (x >= size) throw argument_error("subset element out of range");
    f[x] = {1.0, 0.0};
  }
  return f;
}

// T^t f: per cycle, expand f in the cycle eigenbasis and scale component k
// by e^(2*pi*i*k*t/M). Integer t reproduces t-fold composition.
inline L2Vector power_t(const Permutation& perm, const L2Vector& f, double t) {
  if (f.size() != perm.size) throw argument_error("power_t: size mismatch");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  L2Vector out(f.size(), {0.0, 0.0});
  std::vector<std::complex<double>> coeff;
  for (const auto& cyc : perm.cycles) {
    const std::size_t m = cyc.size();
    const double md = static_cast<double>(m);
    coeff.assign(m, {0.0, 0.0});
    for (std::size_t k = 0; k < m; ++k) {
      std::complex<double> a{0.0, 0.0};
      for (std::size_t l = 0; l < m; ++l)
        a += f[cyc[l]] *
             std::polar(1.0, -two_pi * static_cast<double>(k * l) / md);
      coeff[k] = a / md;
    }
    for (std::size_t l = 0; l < m; ++l) {
      std::complex<double> v{0.0, 0.0};
      for (std::size_t k = 0; k < m; ++k)
        v += coeff[k] * std::polar(1.0, two_pi * static_cast<double>(k) *
                                            (t + static_cast<double>(l)) / md);
      out[cyc[l]] = v;
    }
  }
  return out;
}

// One atom of a spectral measure. The angle is held exactly as a signed
// fraction of the full turn, num/den in (-1, 0]: the transform pairs
// e^(-i*t*theta) with the eigenvalue e^(+2*pi*i*k*t/M), which forces the
// representative theta = -2*pi*k/M rather than its mod-2*pi reduction
// (they differ by a phase at non-integer t). theta_mod in [0, 2*pi) is
// the atom's position on the circle.
struct SpectralAtom {
  long long angle_num = 0;  // <= 0
  long long angle_den = 1;
  double theta = 0.0;      // 2*pi*num/den, in (-2*pi, 0]
  double theta_mod = 0.0;  // theta wrapped into [0, 2*pi)
  std::complex<double> weight{0.0, 0.0};
};

struct SpectralMeasureAtoms {
  std::vector<SpectralAtom> atoms;

  // sum of weight * e^(-i*t*theta); reproduces <T^t f, g> for all real t
  std::complex<double> transform(double t) const {
    std::complex<double> s{0.0, 0.0};
    for (const auto& a : atoms) s += a.weight * std::polar(1.0, -t * a.theta);
    return s;
  }

  std::complex<double> total_weight() const {
    std::complex<double> s{0.0, 0.0};
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
};

// Atoms of nu_{f,g}: per cycle of length M, component k of f against g
// contributes weight a_k conj(b_k) M/|Omega| at turn fraction -k/M.
// Atoms at equal exact fractions are merged; negligible weights dropped.
inline SpectralMeasureAtoms spectral_measure(const Permutation& perm,
                                             const L2Vector& f, const L2Vector& g) {
  if (f.size() != perm.size || g.size() != perm.size)
    throw argument_error("spectral_measure: size mismatch");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double omega = static_cast<double>(perm.size);
  std::map<std::pair<long long, long long>, std::complex<double>> merged;
  for (const auto& cyc : perm.cycles) {
    const std::size_t m = cyc.size();
    const double md = static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
      std::complex<double> a{0.0, 0.0}, b{0.0, 0.0};
      for (std::size_t l = 0; l < m; ++l) {
        const auto w = std::polar(1.0, -two_pi * static_cast<double>(k * l) / md);
        a += f[cyc[l]] * w;
        b += g[cyc[l]] * w;
      }
      a /= md;
      b /= md;
      std::complex<double> weight = a * std::conj(b) * md / omega;
      long long num = -static_cast<long long>(k);
      long long den = static_cast<long long>(m);
      long long d = std::gcd(static_cast<long long>(k), den);
      if (d > 1) {
        num /= d;
        den /= d;
      }
      merged[{num, den}] += weight;
    }
  }
  SpectralMeasureAtoms out;
  for (const auto& [angle, weight] : merged) {
    if (std::abs(weight) <= 1e-14) continue;
    SpectralAtom atom;
    atom.angle_num = angle.first;
    atom.angle_den = angle.second;
    atom.theta = two_pi * static_cast<double>(angle.first) /
                 static_cast<double>(angle.second);
    atom.theta_mod = atom.theta < 0.0 ? atom.theta + two_pi : atom.theta;
    atom.weight = weight;
    out.atoms.push_back(atom);
  }
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const SpectralAtom& a, const SpectralAtom& b) {
              return a.theta_mod < b.theta_mod;
            });
  return out;
}

// Exact autocorrelation |T^(-n)B intersect B| / |Omega|.
inline BigRat autocorrelation(const Permutation& perm,
                              const std::vector<std::size_t>& subset, long long n) {
  if (perm.size == 0) throw argument_error("autocorrelation on empty permutation");
  std::vector<bool> in_b(perm.size, false);
  for (std::size_t x : subset) {
    if (x >= perm.size) throw argument_error("subset element out of range");
    in_b[x] = true;
  }
  long long hits = 0;
  for (std::size_t x = 0; x < perm.size; ++x)
    if (in_b[x] && in_b[perm.apply_n(x, n)]) ++hits;
  return BigRat(hits, static_cast<long long>(perm.size));
}

struct GroupLawReport {
  bool pass = false;
  double worst_group = 0.0;      // ||T^(t+s)f - T^t T^s f||
  double worst_unitarity = 0.0;  // | ||T^t f|| - ||f|| |
  double worst_indicator = 0.0;  // | sum |T^t chi_B|^2 - |B| |
};

// Group law, unitarity, and the indicator norm identity on random vectors
// and random subsets.
inline GroupLawReport group_law_check(const Permutation& perm, double t, double s,
                                      int trials, double tol = 1e-12,
                                      std::uint64_t seed = 0x9d2c5680) {
  if (trials < 1) throw argument_error("group_law_check requires trials >= 1");
  SplitMix64 rng(seed);
  GroupLawReport rep;
  for (int trial = 0; trial < trials; ++trial) {
    L2Vector f(perm.size);
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < perm.size; ++i) {
      f[i] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      if (rng.coin()) subset.push_back(i);
    }
    auto lhs = power_t(perm, f, t + s);
    auto rhs = power_t(perm, power_t(perm, f, s), t);
    double dev = 0.0;
    for (std::size_t i = 0; i < perm.size; ++i)
      dev += std::norm(lhs[i] - rhs[i]);
    dev = std::sqrt(dev / std::max<std::size_t>(perm.size, 1));
    rep.worst_group = std::max(rep.worst_group, dev);

    rep.worst_unitarity = std::max(
        rep.worst_unitarity, std::abs(l2_norm(power_t(perm, f, t)) - l2_norm(f)));

    auto chi = indicator(perm.size, subset);
    auto chi_t = power_t(perm, chi, t);
    double norm2 = 0.0;
    for (const auto& v : chi_t) norm2 += std::norm(v);
    rep.worst_indicator = std::max(
        rep.worst_indicator, std::abs(norm2 - static_cast<double>(subset.size())));
  }
  rep.pass = rep.worst_group <= tol && rep.worst_unitarity <= tol &&
             rep.worst_indicator <= tol * static_cast<double>(perm.size);
  return rep;
}

}  // namespace qdyn::perm
