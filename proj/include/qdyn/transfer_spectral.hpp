#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdyn/errors.hpp"
#include "qdyn/rng.hpp"

// Transfer operators A f(x) = sum_{T(y)=x} e^(c(y)) f(y) on a finite
// self-map, their spectral potential lambda(a) = ln r(A_a) computed by
// power iteration, the standard property checks, invariance witnesses for
// the dual functional, and finite-difference equilibrium (subgradient)
// measures.

namespace qdyn::transfer {

struct FiniteSystem {
  std::size_t size = 0;
  std::vector<std::size_t> map;  // map[y] = T(y)

  static FiniteSystem from_map(std::vector<std::size_t> table) {
    FiniteSystem s;
    s.size = table.size();
    for (std::size_t v : table)
      if (v >= s.size) throw argument_error("map image out of range");
    s.map = std::move(table);
    return s;
  }

  std::size_t apply(std::size_t x) const { return map[x]; }

  // Cycles of the functional graph, each rotated to start at its minimal
  // element and sorted by it. Every component has exactly one cycle.
  std::vector<std::vector<std::size_t>> cycles() const {
    std::vector<int> color(size, 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> path;
    for (std::size_t start = 0; start < size; ++start) {
      if (color[start] != 0) continue;
      path.clear();
      std::size_t x = start;
      while (color[x] == 0) {
        color[x] = 1;
        path.push_back(x);
        x = map[x];
      }
      if (color[x] == 1) {
        auto it = std::find(path.begin(), path.end(), x);
        std::vector<std::size_t> cyc(it, path.end());
        auto min_it = std::min_element(cyc.begin(), cyc.end());
        std::rotate(cyc.begin(), min_it, cyc.end());
        out.push_back(std::move(cyc));
      }
      for (std::size_t y : path) color[y] = 2;
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
  }
};

// max over cycles of the average of vals along the cycle; for these
// operators this equals ln r(A) with vals = c, since every long orbit is
// eventually periodic and the best cycle dominates the norm growth.
inline double max_cycle_mean(const FiniteSystem& sys, const std::vector<double>& vals) {
  auto cycles = sys.cycles();
  if (cycles.empty()) throw internal_error("functional graph without a cycle");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& cyc : cycles) {
    double s = 0.0;
    for (std::size_t y : cyc) s += vals[y];
    best = std::max(best, s / static_cast<double>(cyc.size()));
  }
  return best;
}

struct TransferOp {
  FiniteSystem system;
  std::vector<double> potential;  // c

  std::size_t size() const { return system.size; }

  // (A f)(x) = sum over preimages y of x of e^(c(y)) f(y)
  std::vector<double> apply(const std::vector<double>& f) const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t y = 0; y < size(); ++y)
      out[system.map[y]] += std::exp(potential[y]) * f[y];
    return out;
  }

  // dense matrix M[x][y] = e^(c(y)) [T(y) = x]
  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> m(size(), std::vector<double>(size(), 0.0));
    for (std::size_t y = 0; y < size(); ++y)
      m[system.map[y]][y] = std::exp(potential[y]);
    return m;
  }
};

inline TransferOp build(FiniteSystem system, std::vector<double> c) {
  if (c.size() != system.size)
    throw argument_error("potential length must match state count");
  return TransferOp{std::move(system), std::move(c)};
}

// A_a = A(e^a .): the same operator with base potential c + a.
inline TransferOp weight(const TransferOp& op, const std::vector<double>& a) {
  if (a.size() != op.size()) throw argument_error("weight length mismatch");
  TransferOp w = op;
  for (std::size_t i = 0; i < a.size(); ++i) w.potential[i] += a[i];
  return w;
}

struct PotentialValue {
  double value = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// lambda(a) = lim (1/n) ln ||A_a^n 1||, by power iteration from the unit
// vector with sup-norm log rescaling. Iterate norms of these operators are
// periodically modulated exponentials (period = lcm of cycle lengths), so
// the growth rate is read off over a window of that length; successive
// window estimates agreeing within tol twice in a row counts as converged.
//
// Stopping needs one structural guard: with several cycles the eventual
// winner overtakes the early leader only after roughly
// (log of the initial imbalance) / (gap between the top two cycle means)
// steps, and until then the iterate looks exactly periodic. Convergence is
// therefore not declared before that horizon. When the gap is below the
// target accuracy the plateaus agree to within it and no horizon is needed.
inline PotentialValue spectral_potential(const TransferOp& op,
                                         const std::vector<double>& a,
                                         double tol = 1e-11,
                                         std::size_t n_cap = 300000) {
  if (a.size() != op.size()) throw argument_error("potential length mismatch");
  if (!(tol > 0.0)) throw argument_error("spectral_potential requires tol > 0");
  const std::size_t n_states = op.size();
  if (n_states == 0) throw argument_error("empty system");

  std::vector<double> total(n_states);
  for (std::size_t y = 0; y < n_states; ++y) total[y] = op.potential[y] + a[y];
  std::vector<double> wexp(n_states);
  for (std::size_t y = 0; y < n_states; ++y) wexp[y] = std::exp(total[y]);

  const auto cycles = op.system.cycles();
  std::size_t window = 1;
  for (const auto& cyc : cycles) {
    window = std::lcm(window, cyc.size());
    if (window > 4096) {
      window = 4096;
      break;
    }
  }

  std::size_t horizon = window + n_states + 8;
  if (cycles.size() > 1) {
    std::vector<double> means;
    for (const auto& cyc : cycles) {
      double s = 0.0;
      for (std::size_t y : cyc) s += total[y];
      means.push_back(s / static_cast<double>(cyc.size()));
    }
    std::sort(means.begin(), means.end(), std::greater<double>());
    double gap = means[0] - means[1];
    if (gap > 1e-7) {
      double pot_bound = 0.0;
      for (double t : total) pot_bound = std::max(pot_bound, std::abs(t));
      double crossover = (std::log(static_cast<double>(n_states)) +
                          4.0 * pot_bound * static_cast<double>(n_states)) /
                         gap;
      horizon += static_cast<std::size_t>(std::min(
          crossover, static_cast<double>(n_cap)));
    }
  }

  std::vector<double> accums;  // accums[n-1] = ln ||A_a^n 1|| (rescaled sum)
  accums.reserve(std::min(n_cap, static_cast<std::size_t>(1) << 20));

  std::vector<double> v(n_states, 1.0), next(n_states);
  double accum = 0.0;
  PotentialValue out;
  double prev_est = 0.0;
  bool have_prev = false;
  int small_streak = 0;
  for (std::size_t n = 1; n <= n_cap; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t y = 0; y < n_states; ++y)
      next[op.system.map[y]] += wexp[y] * v[y];
    double m = 0.0;
    for (double x : next) m = std::max(m, std::abs(x));
    if (m <= 0.0) throw internal_error("transfer iterate vanished");
    accum += std::log(m);
    for (auto& x : next) x /= m;
    v.swap(next);
    accums.push_back(accum);
    out.iterations = n;
    if (n > window) {
      double est = (accum - accums[n - window - 1]) / static_cast<double>(window);
      if (have_prev) {
        out.residual = std::abs(est - prev_est);
        small_streak = out.residual <= tol ? small_streak + 1 : 0;
        if (small_streak >= 2 && n >= horizon) {
          out.value = est;
          out.converged = true;
          return out;
        }
      }
      prev_est = est;
      have_prev = true;
      out.value = est;
    }
  }
  return out;  // non-converged; value holds the last window estimate
}

struct PropertyWitness {
  std::vector<double> a;
  std::vector<double> b;  // second weight, when the property involves one
  double t = 0.0;         // scalar parameter (shift or convexity weight)
};

struct PropertyCheck {
  std::string name;
  bool pass = true;
  double worst = 0.0;  // largest violation observed (0 when clean)
  std::optional<PropertyWitness> witness;
};

struct PropertySuiteReport {
  std::vector<PropertyCheck> checks;
  bool all_pass = true;

  const PropertyCheck& operator[](const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw argument_error("no such property: " + name);
  }
};

// The standard spectral-potential properties, tested on random weights:
// reality, monotonicity, additive shift, precomposition invariance,
// convexity, sup-norm Lipschitz bound, and the zero-weight value against
// the structural value of ln r(A).
inline PropertySuiteReport property_suite(const TransferOp& op, int trials,
                                          double tol, std::uint64_t seed = 1) {
  if (trials < 1) throw argument_error("property_suite requires trials >= 1");
  SplitMix64 rng(seed);
  const std::size_t n = op.size();
  auto lam = [&](const std::vector<double>& a) {
    return spectral_potential(op, a).value;
  };
  auto randvec = [&](double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
  };

  PropertyCheck real{"real-valued"}, mono{"monotone"}, shift{"additive-shift"},
      precomp{"precomposition"}, convex{"convex"}, lipschitz{"lipschitz"},
      zero{"zero-weight-log-radius"};

  const std::vector<double> zeros(n, 0.0);
  const double lam0 = lam(zeros);
  {
    double dev = std::abs(lam0 - max_cycle_mean(op.system, op.potential));
    zero.worst = dev;
    zero.pass = dev <= tol;
  }

  for (int t = 0; t < trials; ++t) {
    auto a = randvec(-1.0, 1.0);
    auto b = randvec(-1.0, 1.0);
    const double la = lam(a);
    const double lb = lam(b);

    auto record = [&](PropertyCheck& check, double dev, double t_param,
                      bool with_b) {
      if (dev > check.worst) {
        check.worst = dev;
        if (dev > tol)
          check.witness = PropertyWitness{a, with_b ? b : std::vector<double>{},
                                          t_param};
      }
      if (dev > tol) check.pass = false;
    };

    if (!std::isfinite(la) || !std::isfinite(lb)) {
      real.pass = false;
      real.worst = std::numeric_limits<double>::infinity();
      real.witness = PropertyWitness{a, b, 0.0};
    }

    {  // a <= a + |b| pointwise
      auto c = a;
      for (std::size_t i = 0; i < n; ++i) c[i] += std::abs(b[i]);
      record(mono, la - lam(c), 0.0, true);
    }
    {
      double t0 = rng.uniform(-2.0, 2.0);
      auto c = a;
      for (auto& x : c) x += t0;
      record(shift, std::abs(lam(c) - la - t0), t0, false);
    }
    {  // lambda(a + b o T) = lambda(a + b)
      auto c = a, d = a;
      for (std::size_t i = 0; i < n; ++i) {
        c[i] += b[op.system.map[i]];
        d[i] += b[i];
      }
      record(precomp, std::abs(lam(c) - lam(d)), 0.0, true);
    }
    {
      double s = rng.uniform01();
      std::vector<double> c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = s * a[i] + (1.0 - s) * b[i];
      record(convex, lam(c) - (s * la + (1.0 - s) * lb), s, true);
    }
    {
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
      record(lipschitz, std::abs(la - lb) - diff, 0.0, true);
    }
  }

  PropertySuiteReport rep;
  rep.checks = {real, mono, shift, precomp, convex, lipschitz, zero};
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

struct IdentityCheckResult {
  bool pass = false;
  double deviation = 0.0;
};

// A_a^n f must equal A^n(e^(S_n a) f) with S_n a = a + a o T + ... + a o T^(n-1).
inline IdentityCheckResult birkhoff_identity_check(const TransferOp& op,
                                                   const std::vector<double>& a,
                                                   const std::vector<double>& f,
                                                   int n, double rel_tol = 1e-10) {
  if (n < 1 || n > 20) throw argument_error("birkhoff_identity_check requires 1 <= n <= 20");
  if (a.size() != op.size() || f.size() != op.size())
    throw argument_error("birkhoff_identity_check: size mismatch");
  TransferOp weighted = weight(op, a);
  std::vector<double> lhs = f;
  for (int i = 0; i < n; ++i) lhs = weighted.apply(lhs);

  std::vector<double> sna(op.size(), 0.0);
  for (std::size_t y = 0; y < op.size(); ++y) {
    std::size_t x = y;
    for (int j = 0; j < n; ++j) {
      sna[y] += a[x];
      x = op.system.map[x];
    }
  }
  std::vector<double> rhs(op.size());
  for (std::size_t y = 0; y < op.size(); ++y) rhs[y] = std::exp(sna[y]) * f[y];
  for (int i = 0; i < n; ++i) rhs = op.apply(rhs);

  double scale = 1.0, dev = 0.0;
  for (std::size_t x = 0; x < op.size(); ++x) {
    scale = std::max(scale, std::abs(rhs[x]));
    dev = std::max(dev, std::abs(lhs[x] - rhs[x]));
  }
  return {dev <= rel_tol * scale, dev / scale};
}

// min over the supplied test weights of lambda(a) - mu(a): an upper bound
// for the dual functional inf_a [lambda(a) - mu(a)].
inline double xi_upper(const TransferOp& op, const std::vector<double>& mu,
                       const std::vector<std::vector<double>>& test_set) {
  if (test_set.empty()) throw argument_error("xi_upper requires a nonempty test set");
  if (mu.size() != op.size()) throw argument_error("xi_upper: size mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : test_set) {
    if (a.size() != op.size()) throw argument_error("xi_upper: test weight size mismatch");
    double pairing = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i) pairing += mu[i] * a[i];
    best = std::min(best, spectral_potential(op, a).value - pairing);
  }
  return best;
}

struct InvarianceWitness {
  bool invariant = false;
  std::size_t state = 0;  // indicator direction with the largest gap
  double gap = 0.0;       // mu(1_s) - mu(1_s o T)
  double t = 0.0;
  double bound = 0.0;  // lambda(t*d) - t*mu(d), ~ lambda(0) - t*|gap|
};

// Searches indicator directions for mu(a) != mu(a o T). A nonzero gap
// makes lambda(t(a - a o T)) - t*mu(a - a o T) = lambda(0) - t*gap
// arbitrarily negative, certifying Xi(mu) = -infinity; the certificate is
// evaluated at t = t_max.
inline InvarianceWitness invariance_witness(const TransferOp& op,
                                            const std::vector<double>& mu,
                                            double t_max, double tol = 1e-9) {
  if (mu.size() != op.size()) throw argument_error("invariance_witness: size mismatch");
  if (!(t_max > 0.0)) throw argument_error("invariance_witness requires t_max > 0");
  std::vector<double> push(op.size(), 0.0);
  for (std::size_t y = 0; y < op.size(); ++y) push[op.system.map[y]] += mu[y];
  std::size_t best = 0;
  double best_gap = 0.0;
  for (std::size_t s = 0; s < op.size(); ++s) {
    // mu(1_s o T) = sum over preimages of s = push[s]
    double gap = mu[s] - push[s];
    if (std::abs(gap) > std::abs(best_gap)) {
      best_gap = gap;
      best = s;
    }
  }
  InvarianceWitness w;
  if (std::abs(best_gap) <= tol) {
    w.invariant = true;
    return w;
  }
  w.state = best;
  w.gap = best_gap;
  w.t = best_gap > 0.0 ? t_max : -t_max;
  std::vector<double> dir(op.size(), 0.0);
  dir[best] += w.t;
  for (std::size_t y = 0; y < op.size(); ++y)
    if (op.system.map[y] == best) dir[y] -= w.t;
  double pairing = 0.0;
  for (std::size_t i = 0; i < op.size(); ++i) pairing += mu[i] * dir[i];
  w.bound = spectral_potential(op, dir, 1e-9).value - pairing;
  return w;
}

struct EquilibriumMeasure {
  std::vector<double> weights;
  double invariance_gap = 0.0;  // sup |mu - pushforward(mu)|
  bool clip_warning = false;    // negative finite differences beyond 10*h
};

// Central finite differences of lambda at a, clipped at zero and
// renormalized to a probability vector. A clean subgradient is an
// invariant probability measure; a large clipped mass signals a kink of
// lambda at a (possible with competing cycles).
inline EquilibriumMeasure equilibrium_subgradient(const TransferOp& op,
                                                  const std::vector<double>& a,
                                                  double h = 1e-4) {
  if (!(h > 0.0)) throw argument_error("equilibrium_subgradient requires h > 0");
  if (a.size() != op.size()) throw argument_error("equilibrium_subgradient: size mismatch");
  EquilibriumMeasure out;
  out.weights.assign(op.size(), 0.0);
  for (std::size_t x = 0; x < op.size(); ++x) {
    auto hi = a, lo = a;
    hi[x] += h;
    lo[x] -= h;
    double g = (spectral_potential(op, hi).value - spectral_potential(op, lo).value) /
               (2.0 * h);
    if (g < 0.0) {
      if (g < -10.0 * h) out.clip_warning = true;
      g = 0.0;
    }
    out.weights[x] = g;
  }
  double mass = 0.0;
  for (double wgt : out.weights) mass += wgt;
  if (mass <= 0.0) throw internal_error("subgradient estimate has no mass");
  for (auto& wgt : out.weights) wgt /= mass;

  std::vector<double> push(op.size(), 0.0);
  for (std::size_t y = 0; y < op.size(); ++y)
    push[op.system.map[y]] += out.weights[y];
  for (std::size_t x = 0; x < op.size(); ++x)
    out.invariance_gap =
        std::max(out.invariance_gap, std::abs(push[x] - out.weights[x]));
  return out;
}

struct Theorem4Result {
  bool pass = false;
  double worst = 0.0;
  std::vector<std::size_t> cycle;  // the unique cycle carrying the measure
};

// On a uniquely ergodic system (exactly one cycle in the functional graph)
// the potential splits as lambda(a) = lambda(0) + mu(a) with mu uniform on
// the cycle.
inline Theorem4Result theorem4_check(const TransferOp& op, int trials, double tol,
                                     std::uint64_t seed = 7) {
  if (trials < 1) throw argument_error("theorem4_check requires trials >= 1");
  auto cycles = op.system.cycles();
  if (cycles.size() != 1) {
    std::ostringstream os;
    os << "system is not uniquely ergodic: " << cycles.size()
       << " cycles; first two start at " << cycles[0].front() << " and "
       << cycles[1].front();
    throw precondition_error(os.str());
  }
  const auto& cyc = cycles[0];
  std::vector<double> mu(op.size(), 0.0);
  for (std::size_t y : cyc) mu[y] = 1.0 / static_cast<double>(cyc.size());

  SplitMix64 rng(seed);
  const double lam0 = spectral_potential(op, std::vector<double>(op.size(), 0.0)).value;
  Theorem4Result res;
  res.cycle = cyc;
  res.pass = true;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(op.size());
    for (auto& x : a) x = rng.uniform(-1.0, 1.0);
    double pairing = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i) pairing += mu[i] * a[i];
    double dev = std::abs(spectral_potential(op, a).value - lam0 - pairing);
    res.worst = std::max(res.worst, dev);
    if (dev > tol) res.pass = false;
  }
  return res;
}

}  // namespace qdyn::transfer
