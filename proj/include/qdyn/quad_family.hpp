#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "qdyn/errors.hpp"
#include "qdyn/orbit_core.hpp"
#include "qdyn/rational_poly.hpp"
#include "qdyn/systems.hpp"

// Closed forms and classifiers for the family T_alpha(x) = 1 - alpha*x^2
// on [-1, 1]: fixed point and two-cycle with their multipliers, the
// attracting-regime classifier, the critical orbit, and the
// derivative-growth statistic along the orbit of 1.

namespace qdyn::quad {

inline double map(double alpha, double x) { return 1.0 - alpha * x * x; }

// Radius of the invariant disk: |z| > escape_radius implies |T(z)| > |z|,
// so the Julia set (and every bounded orbit) lies inside it. Also the
// magnitude of the repelling fixed point -x_* mirror on the positive axis.
inline double escape_radius(double alpha) {
  if (alpha <= 0.0) throw argument_error("escape_radius requires alpha > 0");
  return (1.0 + std::sqrt(1.0 + 4.0 * alpha)) / (2.0 * alpha);
}

// Positive fixed point (sqrt(1+4a)-1)/(2a).
inline double fixed_point(double alpha) {
  if (alpha <= 0.0) throw argument_error("fixed_point requires alpha > 0");
  return (std::sqrt(1.0 + 4.0 * alpha) - 1.0) / (2.0 * alpha);
}

// |T'(x_*)| = sqrt(1+4a) - 1; equals 1 exactly at alpha = 3/4.
inline double fixed_multiplier(double alpha) {
  if (alpha <= 0.0) throw argument_error("fixed_multiplier requires alpha > 0");
  return std::sqrt(1.0 + 4.0 * alpha) - 1.0;
}

// The period-2 orbit (x1 > x_* > x2), real for alpha > 3/4. The cycle
// points are the roots of a^2 x^2 - a x - (a - 1), the cofactor of the
// fixed-point quadratic inside T^2(x) - x, so x2 = (1 - sqrt(4a-3))/(2a):
// only with that sign does T swap the pair.
inline std::pair<double, double> two_cycle(double alpha) {
  if (alpha <= 0.75)
    throw argument_error("no real two-cycle for alpha <= 3/4");
  double s = std::sqrt(4.0 * alpha - 3.0);
  return {(1.0 + s) / (2.0 * alpha), (1.0 - s) / (2.0 * alpha)};
}

// |d/dx T^2| along the two-cycle: 4|1-alpha|; equals 1 at alpha = 5/4.
inline double cycle_multiplier(double alpha) {
  if (alpha <= 0.75)
    throw argument_error("no real two-cycle for alpha <= 3/4");
  return 4.0 * std::abs(1.0 - alpha);
}

// Exact boundary identities for rational alpha. The multiplier
// sqrt(1+4a)-1 equals 1 iff (1+1)^2 == 1+4a, checked by squaring rather
// than by floating-point square roots.
inline bool fixed_multiplier_is_one(const BigRat& alpha) {
  return BigRat(1) + 4 * alpha == BigRat(4);
}

inline bool cycle_multiplier_is_one(const BigRat& alpha) {
  if (!(alpha > BigRat(3, 4))) return false;
  BigRat d = alpha - 1;
  if (d < 0) d = -d;
  return 4 * d == BigRat(1);
}

enum class Regime {
  fixed_point_attracting,   // alpha in (0, 3/4]
  two_cycle_attracting,     // alpha in (3/4, 5/4)
  beyond_five_quarters,     // alpha in [5/4, 2)
};

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::fixed_point_attracting: return "fixed-point-attracting";
    case Regime::two_cycle_attracting: return "two-cycle-attracting";
    case Regime::beyond_five_quarters: return "beyond-5/4";
  }
  return "?";
}

struct RegimeReport {
  double alpha = 0.0;
  Regime regime = Regime::fixed_point_attracting;
  double x_star = 0.0;
  double fixed_mult = 0.0;
  std::optional<std::pair<double, double>> cycle;  // (x1, x2), alpha > 3/4
  std::optional<double> cycle_mult;
};

inline RegimeReport classify(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw argument_error("classify requires alpha in (0, 2)");
  RegimeReport r;
  r.alpha = alpha;
  r.x_star = fixed_point(alpha);
  r.fixed_mult = fixed_multiplier(alpha);
  if (alpha > 0.75) {
    r.cycle = two_cycle(alpha);
    r.cycle_mult = cycle_multiplier(alpha);
  }
  if (alpha <= 0.75)
    r.regime = Regime::fixed_point_attracting;
  else if (alpha < 1.25)
    r.regime = Regime::two_cycle_attracting;
  else
    r.regime = Regime::beyond_five_quarters;
  return r;
}

// Orbit of the critical point: xi_0 = 0, xi_{n+1} = 1 - alpha*xi_n^2.
inline std::vector<double> critical_orbit(double alpha, std::size_t n) {
  std::vector<double> xi;
  xi.reserve(n + 1);
  xi.push_back(0.0);
  for (std::size_t i = 0; i < n; ++i) xi.push_back(map(alpha, xi.back()));
  return xi;
}

// Growth of |d/dx T^n(1)|, accumulated in log space along the orbit of 1
// (the product grows like 4^n at alpha = 2, far past double range).
// flags[m-1] records log|d/dx T^m(1)| >= m^(2/3).
struct BCStatistic {
  std::size_t n = 0;
  std::vector<double> log_deriv;   // index m-1 <-> iterate count m
  std::vector<double> threshold;   // m^(2/3)
  std::vector<bool> flags;
  std::optional<std::size_t> degenerate_index;  // first j with T^j(1) == 0
};

inline BCStatistic bc_statistic(double alpha, std::size_t n) {
  if (n < 1) throw argument_error("bc_statistic requires n >= 1");
  if (alpha <= 0.0) throw argument_error("bc_statistic requires alpha > 0");
  BCStatistic out;
  out.n = n;
  out.log_deriv.reserve(n);
  out.threshold.reserve(n);
  out.flags.reserve(n);
  double x = 1.0;
  double acc = 0.0;
  for (std::size_t m = 1; m <= n; ++m) {
    if (x == 0.0 && !out.degenerate_index) out.degenerate_index = m - 1;
    if (out.degenerate_index)
      acc = -std::numeric_limits<double>::infinity();
    else
      acc += std::log(2.0 * alpha * std::abs(x));
    double thr = std::pow(static_cast<double>(m), 2.0 / 3.0);
    out.log_deriv.push_back(acc);
    out.threshold.push_back(thr);
    out.flags.push_back(acc >= thr);
    x = map(alpha, x);
  }
  return out;
}

enum class ProbeVerdict {
  attracting_cycle_found,
  no_cycle_detected,
  degenerate_eventually_periodic,  // critical orbit landed on a repelling cycle
};

inline const char* probe_verdict_name(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::attracting_cycle_found: return "attracting-cycle-found";
    case ProbeVerdict::no_cycle_detected: return "no-cycle-detected";
    case ProbeVerdict::degenerate_eventually_periodic:
      return "degenerate-eventually-periodic";
  }
  return "?";
}

// Heuristic verdict only: "no cycle detected up to horizon" never claims
// that no attracting cycle exists.
struct DeltaInfReport {
  ProbeVerdict verdict = ProbeVerdict::no_cycle_detected;
  std::size_t period = 0;
  double multiplier = 0.0;  // product of |T'| over the detected cycle
  bool heuristic = true;
};

// Follows the critical orbit (the unique critical point is 0, so it is
// attracted by any attracting cycle) and scans its tail for a cycle.
inline DeltaInfReport delta_inf_probe(double alpha, std::size_t horizon,
                                      double tol) {
  if (horizon < 1000) throw argument_error("delta_inf_probe requires horizon >= 1000");
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw argument_error("delta_inf_probe requires alpha in (0, 2]");
  if (tol <= 0.0) throw argument_error("delta_inf_probe requires tol > 0");
  QuadMapSystem sys{alpha};
  auto record = iterate(sys, 0.0, horizon);
  auto cyc = detect_cycle(sys, record, tol);
  DeltaInfReport out;
  if (!cyc) return out;
  out.period = cyc->period;
  double mult = 1.0;
  for (double x : cyc->points) mult *= 2.0 * alpha * std::abs(x);
  out.multiplier = mult;
  out.verdict = mult < 1.0 ? ProbeVerdict::attracting_cycle_found
                           : ProbeVerdict::degenerate_eventually_periodic;
  return out;
}

}  // namespace qdyn::quad
