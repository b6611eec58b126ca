#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qdyn/errors.hpp"

// Concrete dynamical systems used as fixtures: each exposes a state type,
// the map, a metric, and (where an orbit can genuinely diverge) a domain
// membership test.

namespace qdyn {

// x -> 1 - alpha*x^2 on the reals. Orbits starting outside [-1,1] for
// alpha in (0,2] can diverge; |x| > escape_bound is declared out of domain.
struct QuadMapSystem {
  using state_type = double;
  double alpha;
  double escape_bound = 1e6;

  state_type map(state_type x) const { return 1.0 - alpha * x * x; }
  double metric(state_type a, state_type b) const { return std::abs(a - b); }
  bool contains(state_type x) const { return std::abs(x) <= escape_bound; }
  std::string name() const {
    std::ostringstream os;
    os << "quad(alpha=" << alpha << ")";
    return os.str();
  }
};

// z -> z^2 on the complex plane.
struct SquaringMapSystem {
  using state_type = std::complex<double>;
  double escape_bound = 1e6;

  state_type map(state_type z) const { return z * z; }
  double metric(state_type a, state_type b) const { return std::abs(a - b); }
  bool contains(state_type z) const { return std::abs(z) <= escape_bound; }
  std::string name() const { return "squaring"; }
};

// Rigid rotation of the circle; states are angles in [0, 2*pi) with the
// wrap-around metric min(|d|, 2*pi - |d|).
struct CircleRotationSystem {
  using state_type = double;
  double step;  // rotation angle in radians

  static constexpr double two_pi = 2.0 * std::numbers::pi;

  static double wrap(double theta) {
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    return t;
  }

  state_type map(state_type theta) const { return wrap(theta + step); }
  double metric(state_type a, state_type b) const {
    double d = std::abs(wrap(a) - wrap(b));
    return std::min(d, two_pi - d);
  }
  std::string name() const {
    std::ostringstream os;
    os << "rotation(step=" << step << ")";
    return os.str();
  }

  // rotation by 2*pi*g with g the golden mean (sqrt(5)-1)/2
  static CircleRotationSystem golden() {
    return CircleRotationSystem{two_pi * (std::sqrt(5.0) - 1.0) / 2.0};
  }
};

// Self-map of {0, .., n-1} given by an image table, with the discrete metric.
struct FiniteMapSystem {
  using state_type = std::size_t;
  std::vector<std::size_t> table;

  explicit FiniteMapSystem(std::vector<std::size_t> t) : table(std::move(t)) {
    for (std::size_t v : table)
      if (v >= table.size())
        throw argument_error("finite map image out of range");
  }

  state_type map(state_type x) const { return table.at(x); }
  double metric(state_type a, state_type b) const { return a == b ? 0.0 : 1.0; }
  bool contains(state_type x) const { return x < table.size(); }
  std::string name() const {
    std::ostringstream os;
    os << "finite(n=" << table.size() << ")";
    return os.str();
  }
};

}  // namespace qdyn
