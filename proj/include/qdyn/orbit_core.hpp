#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdyn/errors.hpp"

// Generic orbit machinery over pluggable dynamical systems: iteration,
// tolerance-based cycle detection, omega-limit estimation by greedy
// clustering, Birkhoff averaging, and the periodic-limit / minimality /
// connectivity probes used by the fixture harnesses.

namespace qdyn {

template <typename S>
concept dynamical_system = requires(const S& sys, const typename S::state_type& x) {
  { sys.map(x) } -> std::convertible_to<typename S::state_type>;
  { sys.metric(x, x) } -> std::convertible_to<double>;
};

template <typename S>
concept has_domain = requires(const S& sys, const typename S::state_type& x) {
  { sys.contains(x) } -> std::convertible_to<bool>;
};

template <typename S>
concept has_name = requires(const S& sys) {
  { sys.name() } -> std::convertible_to<std::string>;
};

template <dynamical_system S>
std::string system_name(const S& sys) {
  if constexpr (has_name<S>)
    return sys.name();
  else
    return "system";
}

template <dynamical_system S>
struct OrbitRecord {
  using state_type = typename S::state_type;
  // states[n] = T^n(u); states[0] = u
  std::vector<state_type> states;

  std::size_t steps() const { return states.size() - 1; }
  const state_type& initial() const { return states.front(); }
};

// Orbit of u up to T^n(u) inclusive. Throws domain_escape_error with the
// first offending index if an iterate leaves the declared domain.
template <dynamical_system S>
OrbitRecord<S> iterate(const S& sys, typename S::state_type u, std::size_t n) {
  if constexpr (has_domain<S>) {
    if (!sys.contains(u)) throw argument_error("initial state outside the declared domain");
  }
  OrbitRecord<S> rec;
  rec.states.reserve(n + 1);
  rec.states.push_back(u);
  for (std::size_t i = 0; i < n; ++i) {
    auto next = sys.map(rec.states.back());
    if constexpr (has_domain<S>) {
      if (!sys.contains(next))
        throw domain_escape_error("orbit left the declared domain", i + 1);
    }
    rec.states.push_back(std::move(next));
  }
  return rec;
}

template <dynamical_system S>
struct CycleReport {
  using state_type = typename S::state_type;
  std::size_t period = 0;
  std::vector<state_type> points;  // x, Tx, ..., T^(period-1) x
  double residual = 0.0;           // metric(T^period x, x)
};

// Scans the orbit tail for the minimal period p with
// metric(T^N u, T^(N-p) u) <= tol. A candidate is accepted only if T^p
// returns within tol from every point of the candidate cycle, so the
// closure bound holds for each reported point, not just the base.
template <dynamical_system S>
std::optional<CycleReport<S>> detect_cycle(const S& sys, const OrbitRecord<S>& rec,
                                           double tol) {
  if (rec.states.empty()) throw argument_error("detect_cycle on an empty record");
  if (tol <= 0.0) throw argument_error("detect_cycle requires tol > 0");
  const auto& xs = rec.states;
  const std::size_t last = xs.size() - 1;
  for (std::size_t p = 1; p <= last; ++p) {
    if (sys.metric(xs[last], xs[last - p]) > tol) continue;
    const std::size_t base = last - p;
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < p && ok; ++i) {
      auto y = xs[base + i];
      for (std::size_t s = 0; s < p; ++s) y = sys.map(y);
      double d = sys.metric(y, xs[base + i]);
      worst = std::max(worst, d);
      ok = d <= tol;
    }
    if (!ok) continue;
    CycleReport<S> report;
    report.period = p;
    report.points.assign(xs.begin() + static_cast<std::ptrdiff_t>(base),
                         xs.begin() + static_cast<std::ptrdiff_t>(last));
    report.residual = worst;
    return report;
  }
  return std::nullopt;
}

template <dynamical_system S>
struct OmegaEstimate {
  using state_type = typename S::state_type;
  std::vector<state_type> representatives;
  double tol = 0.0;
  std::size_t burn_in = 0;
  std::size_t tail = 0;
  std::string source;
};

// Clusters the iterates with index in [burn_in, burn_in + tail) by greedy
// sequential leader clustering in iteration order; deterministic and
// order-stable.
template <dynamical_system S>
OmegaEstimate<S> omega_estimate(const S& sys, typename S::state_type u,
                                std::size_t burn_in, std::size_t tail, double tol) {
  if (burn_in < 1 || tail < 1)
    throw argument_error("omega_estimate requires burn_in, tail >= 1");
  if (tol <= 0.0) throw argument_error("omega_estimate requires tol > 0");
  auto rec = iterate(sys, u, burn_in + tail - 1);
  OmegaEstimate<S> est;
  est.tol = tol;
  est.burn_in = burn_in;
  est.tail = tail;
  est.source = system_name(sys);
  for (std::size_t i = burn_in; i < burn_in + tail; ++i) {
    const auto& x = rec.states[i];
    bool covered = false;
    for (const auto& r : est.representatives) {
      if (sys.metric(x, r) <= tol) {
        covered = true;
        break;
      }
    }
    if (!covered) est.representatives.push_back(x);
  }
  return est;
}

enum class CheckStatus { pass, fail, inconclusive };

template <dynamical_system S>
struct PeriodicLimitResult {
  using state_type = typename S::state_type;
  CheckStatus status = CheckStatus::inconclusive;
  std::optional<state_type> witness;  // representative not on the periodic orbit
  std::size_t period = 0;             // period of the representative found periodic
};

// A finite omega-limit set containing a periodic point must be exactly that
// periodic orbit: if some representative is periodic within tol (period at
// most period_cap), every representative must lie within tol of its orbit.
// Reports inconclusive when no representative is periodic within the cap.
template <dynamical_system S>
PeriodicLimitResult<S> theorem1_check(const S& sys, const OmegaEstimate<S>& est,
                                      double tol, std::size_t period_cap = 64) {
  if (tol <= 0.0) throw argument_error("theorem1_check requires tol > 0");
  PeriodicLimitResult<S> result;
  for (const auto& p : est.representatives) {
    std::vector<typename S::state_type> orbit{p};
    auto x = p;
    std::size_t period = 0;
    for (std::size_t m = 1; m <= period_cap; ++m) {
      x = sys.map(x);
      if (sys.metric(x, p) <= tol) {
        period = m;
        break;
      }
      orbit.push_back(x);
    }
    if (period == 0) continue;
    orbit.resize(period);  // p, Tp, ..., T^(period-1) p
    result.period = period;
    for (const auto& r : est.representatives) {
      bool near = false;
      for (const auto& q : orbit) {
        if (sys.metric(r, q) <= tol) {
          near = true;
          break;
        }
      }
      if (!near) {
        result.status = CheckStatus::fail;
        result.witness = r;
        return result;
      }
    }
    result.status = CheckStatus::pass;
    return result;
  }
  return result;  // inconclusive: no periodic representative within the cap
}

// (f(u) + f(Tu) + ... + f(T^n u)) / (n+1)
template <dynamical_system S, typename F>
  requires std::invocable<F, typename S::state_type>
double birkhoff_average(const S& sys, F&& f, typename S::state_type u, std::size_t n) {
  if constexpr (has_domain<S>) {
    if (!sys.contains(u)) throw argument_error("initial state outside the declared domain");
  }
  double sum = 0.0;
  auto x = u;
  for (std::size_t j = 0;; ++j) {
    sum += static_cast<double>(f(x));
    if (j == n) break;
    x = sys.map(x);
    if constexpr (has_domain<S>) {
      if (!sys.contains(x))
        throw domain_escape_error("orbit left the declared domain", j + 1);
    }
  }
  return sum / static_cast<double>(n + 1);
}

template <dynamical_system S>
struct MinimalityResult {
  using state_type = typename S::state_type;
  bool pass = false;
  // (representative whose orbit fails, representative it never approaches)
  std::optional<std::pair<state_type, state_type>> witness;
};

// Every representative's finite orbit must come eps-close to every other
// representative; a minimal system has all orbits dense in it.
template <dynamical_system S>
MinimalityResult<S> minimality_probe(const S& sys, const OmegaEstimate<S>& est,
                                     double eps, std::size_t steps) {
  if (!(eps > est.tol))
    throw argument_error("minimality_probe requires eps > estimate tolerance");
  const auto& reps = est.representatives;
  for (const auto& y : reps) {
    std::vector<std::size_t> uncovered(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) uncovered[i] = i;
    auto x = y;
    for (std::size_t s = 0; s < steps && !uncovered.empty(); ++s) {
      for (std::size_t i = 0; i < uncovered.size();) {
        if (sys.metric(x, reps[uncovered[i]]) <= eps) {
          uncovered[i] = uncovered.back();
          uncovered.pop_back();
        } else {
          ++i;
        }
      }
      x = sys.map(x);
    }
    if (!uncovered.empty())
      return {false, std::make_pair(y, reps[uncovered.front()])};
  }
  return {true, std::nullopt};
}

// Number of connected components of the graph on representatives with
// edges at distance <= link_radius.
template <dynamical_system S>
std::size_t connectivity_probe(const S& sys, const OmegaEstimate<S>& est,
                               double link_radius) {
  if (link_radius <= 0.0)
    throw argument_error("connectivity_probe requires link_radius > 0");
  const auto& reps = est.representatives;
  std::vector<std::size_t> parent(reps.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      if (sys.metric(reps[i], reps[j]) <= link_radius) parent[find(i)] = find(j);
  std::size_t components = 0;
  for (std::size_t i = 0; i < reps.size(); ++i)
    if (find(i) == i) ++components;
  return components;
}

}  // namespace qdyn
