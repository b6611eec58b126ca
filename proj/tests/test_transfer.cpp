#include "qdyn/transfer_spectral.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qdyn/rng.hpp"

using namespace qdyn;
namespace transfer = qdyn::transfer;

namespace {

transfer::TransferOp five_cycle(std::vector<double> c = std::vector<double>(5, 0.0)) {
  return transfer::build(transfer::FiniteSystem::from_map({1, 2, 3, 4, 0}),
                         std::move(c));
}

transfer::TransferOp funnel(std::vector<double> c = std::vector<double>(4, 0.0)) {
  // T = [0,2,0,2]: single fixed point 0; states 1,3 feed 2, state 2 feeds 0
  return transfer::build(transfer::FiniteSystem::from_map({0, 2, 0, 2}),
                         std::move(c));
}

// random functional map (not necessarily a bijection) with random weights
transfer::TransferOp random_op(std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> map(n);
  for (auto& v : map) v = static_cast<std::size_t>(rng.next() % n);
  std::vector<double> c(n);
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);
  return transfer::build(transfer::FiniteSystem::from_map(std::move(map)),
                         std::move(c));
}

// independent estimate of ln r(A_a): dense matrix powers of the weighted
// operator applied to the unit vector, growth read over doubling horizons
double brute_force_log_radius(const transfer::TransferOp& op,
                              const std::vector<double>& a, int n_total) {
  auto weighted = transfer::weight(op, a);
  std::vector<double> v(op.size(), 1.0);
  double accum = 0.0;
  double half_accum = 0.0;
  for (int n = 1; n <= n_total; ++n) {
    v = weighted.apply(v);
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    accum += std::log(m);
    for (auto& x : v) x /= m;
    if (n == n_total / 2) half_accum = accum;
  }
  return (accum - half_accum) / (n_total - n_total / 2);
}

}  // namespace

TEST_CASE("functional graph cycles") {
  auto cycles = transfer::FiniteSystem::from_map({1, 2, 3, 4, 0}).cycles();
  REQUIRE(cycles.size() == 1);
  CHECK(cycles[0] == std::vector<std::size_t>{0, 1, 2, 3, 4});

  auto funnel_cycles = transfer::FiniteSystem::from_map({0, 2, 0, 2}).cycles();
  REQUIRE(funnel_cycles.size() == 1);
  CHECK(funnel_cycles[0] == std::vector<std::size_t>{0});

  auto pair = transfer::FiniteSystem::from_map({1, 0, 3, 2}).cycles();
  REQUIRE(pair.size() == 2);
  CHECK(pair[0] == std::vector<std::size_t>{0, 1});
  CHECK(pair[1] == std::vector<std::size_t>{2, 3});

  CHECK_THROWS_AS(transfer::FiniteSystem::from_map({0, 7}), argument_error);
}

TEST_CASE("matrix form of the operator") {
  auto op = five_cycle();
  auto m = op.matrix();
  // column y has its single nonzero entry at row T(y)
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 5; ++x)
      CHECK(m[x][y] == (x == (y + 1) % 5 ? 1.0 : 0.0));

  auto f = funnel();
  auto fm = f.matrix();
  CHECK(fm[0][0] == 1.0);
  CHECK(fm[0][2] == 1.0);
  CHECK(fm[2][1] == 1.0);
  CHECK(fm[2][3] == 1.0);
  double row1 = fm[1][0] + fm[1][1] + fm[1][2] + fm[1][3];
  double row3 = fm[3][0] + fm[3][1] + fm[3][2] + fm[3][3];
  CHECK(row1 == 0.0);
  CHECK(row3 == 0.0);

  auto doubled = five_cycle(std::vector<double>(5, std::log(2.0)));
  CHECK(doubled.matrix()[1][0] == Catch::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("module identity A(g * (f o T)) = f * A(g)") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto op = random_op(2 + rng.next() % 11, rng);
    std::size_t n = op.size();
    std::vector<double> f(n), g(n);
    for (auto& v : f) v = rng.uniform(-2.0, 2.0);
    for (auto& v : g) v = rng.uniform(-2.0, 2.0);
    std::vector<double> gf(n);
    for (std::size_t y = 0; y < n; ++y) gf[y] = g[y] * f[op.system.map[y]];
    auto lhs = op.apply(gf);
    auto ag = op.apply(g);
    for (std::size_t x = 0; x < n; ++x)
      CHECK(lhs[x] == Catch::Approx(f[x] * ag[x]).margin(1e-12));
  }
}

TEST_CASE("positivity of the matrix") {
  SplitMix64 rng(32);
  auto op = random_op(9, rng);
  for (const auto& row : op.matrix())
    for (double v : row) CHECK(v >= 0.0);
}

TEST_CASE("weighting shifts the base potential") {
  auto op = five_cycle();
  std::vector<double> a{1.0, 0.0, -0.5, 0.25, 0.0};
  auto w = transfer::weight(op, a);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(w.potential[i] == a[i]);
  CHECK_THROWS_AS(transfer::weight(op, {1.0}), argument_error);

  // indicator weight scales exactly one column by e
  auto scaled = transfer::weight(op, {1.0, 0.0, 0.0, 0.0, 0.0});
  auto m0 = op.matrix();
  auto m1 = scaled.matrix();
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = 0; y < 5; ++y) {
      double factor = y == 0 ? std::exp(1.0) : 1.0;
      CHECK(m1[x][y] == Catch::Approx(m0[x][y] * factor).margin(1e-15));
    }
}

TEST_CASE("spectral potential on a cycle is the mean weight") {
  auto op = five_cycle();
  std::vector<double> a{1.0, 0.0, 0.0, 0.0, 0.0};
  auto pv = transfer::spectral_potential(op, a);
  CHECK(pv.converged);
  CHECK(pv.value == Catch::Approx(0.2).margin(1e-10));
  CHECK(pv.residual <= 1e-11);

  // independent route: brute-force matrix powers
  CHECK(brute_force_log_radius(op, a, 2000) == Catch::Approx(0.2).margin(1e-6));
}

TEST_CASE("spectral potential of the funnel comes from its fixed point") {
  auto op = funnel();
  auto pv = transfer::spectral_potential(op, std::vector<double>(4, 0.0));
  CHECK(pv.converged);
  CHECK(pv.value == Catch::Approx(0.0).margin(1e-10));

  std::vector<double> a{0.7, -0.3, 0.1, 0.4};
  auto pva = transfer::spectral_potential(op, a);
  CHECK(pva.value == Catch::Approx(0.7).margin(1e-9));  // a at the fixed point
}

TEST_CASE("constant weights shift the potential value") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    auto op = random_op(3 + rng.next() % 9, rng);
    double lam0 = transfer::spectral_potential(
                      op, std::vector<double>(op.size(), 0.0)).value;
    double t0 = rng.uniform(-2.0, 2.0);
    double lam = transfer::spectral_potential(
                     op, std::vector<double>(op.size(), t0)).value;
    CHECK(lam == Catch::Approx(lam0 + t0).margin(1e-9));
  }
}

TEST_CASE("potential value agrees with the cycle-mean formula") {
  SplitMix64 rng(34);
  for (int trial = 0; trial < 25; ++trial) {
    auto op = random_op(2 + rng.next() % 11, rng);
    std::vector<double> a(op.size());
    for (auto& v : a) v = rng.uniform(-1.0, 1.0);
    std::vector<double> total = op.potential;
    for (std::size_t i = 0; i < a.size(); ++i) total[i] += a[i];
    auto pv = transfer::spectral_potential(op, a);
    REQUIRE(pv.converged);
    CHECK(pv.value ==
          Catch::Approx(transfer::max_cycle_mean(op.system, total)).margin(1e-8));
  }
}

TEST_CASE("non-convergence is flagged at tiny caps") {
  auto op = five_cycle();
  std::vector<double> a{1.0, 0.0, 0.0, 0.0, 0.0};
  auto pv = transfer::spectral_potential(op, a, 1e-14, 3);
  CHECK_FALSE(pv.converged);
}

TEST_CASE("property suite is clean on fixtures") {
  CHECK(transfer::property_suite(five_cycle(), 25, 1e-6).all_pass);
  CHECK(transfer::property_suite(funnel(), 25, 1e-6).all_pass);
  SplitMix64 rng(35);
  for (int i = 0; i < 5; ++i) {
    auto op = random_op(2 + rng.next() % 11, rng);
    auto rep = transfer::property_suite(op, 10, 1e-6, rng.next());
    INFO("trial op " << i);
    for (const auto& c : rep.checks) {
      INFO(c.name << " worst " << c.worst);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("iterated weighting identity") {
  SplitMix64 rng(36);
  auto op5 = five_cycle({0.3, -0.2, 0.1, 0.0, 0.5});
  std::vector<double> a(5), f(5);
  for (auto& v : a) v = rng.uniform(-1.0, 1.0);
  for (auto& v : f) v = rng.uniform(-1.0, 1.0);
  CHECK(transfer::birkhoff_identity_check(op5, a, f, 1).pass);
  CHECK(transfer::birkhoff_identity_check(op5, a, f, 5).pass);
  CHECK(transfer::birkhoff_identity_check(op5, a, f, 20).pass);

  auto opf = funnel();
  std::vector<double> a4(4), f4(4);
  for (auto& v : a4) v = rng.uniform(-1.0, 1.0);
  for (auto& v : f4) v = rng.uniform(-1.0, 1.0);
  CHECK(transfer::birkhoff_identity_check(opf, a4, f4, 3).pass);

  for (int trial = 0; trial < 10; ++trial) {
    auto op = random_op(2 + rng.next() % 11, rng);
    std::vector<double> aa(op.size()), ff(op.size());
    for (auto& v : aa) v = rng.uniform(-1.0, 1.0);
    for (auto& v : ff) v = rng.uniform(-1.0, 1.0);
    int n = 1 + static_cast<int>(rng.next() % 20);
    CHECK(transfer::birkhoff_identity_check(op, aa, ff, n).pass);
  }
  CHECK_THROWS_AS(transfer::birkhoff_identity_check(op5, a, f, 21), argument_error);
}

TEST_CASE("xi upper bound") {
  auto op = five_cycle();
  double lam0 = transfer::spectral_potential(op, std::vector<double>(5, 0.0)).value;

  // invariant measure of the uniquely ergodic cycle: the bound collapses
  // to lambda(0) whatever the test set
  std::vector<double> uniform(5, 0.2);
  std::vector<std::vector<double>> tests{std::vector<double>(5, 0.0),
                                         {1, 0, 0, 0, 0},
                                         {0.3, -0.2, 0.7, 0.0, 0.1}};
  CHECK(transfer::xi_upper(op, uniform, tests) ==
        Catch::Approx(lam0).margin(1e-8));
  CHECK(transfer::xi_upper(op, uniform, {std::vector<double>(5, 0.0)}) ==
        Catch::Approx(lam0).margin(1e-10));

  // a non-invariant measure with its witness direction in the test set
  // drives the bound far below lambda(0)
  std::vector<double> point{1, 0, 0, 0, 0};
  double t = 10.0;
  std::vector<double> dir(5, 0.0);
  dir[0] += t;                     // t * 1_{0}
  dir[4] -= t;                     // -t * 1_{0} o T (preimage of 0 is 4)
  auto bound = transfer::xi_upper(op, point, {dir});
  CHECK(bound <= lam0 - t + 1e-6);
}

TEST_CASE("invariance witness") {
  auto op = five_cycle();
  std::vector<double> uniform(5, 0.2);
  auto inv = transfer::invariance_witness(op, uniform, 50.0);
  CHECK(inv.invariant);

  std::vector<double> point{1, 0, 0, 0, 0};
  auto wit = transfer::invariance_witness(op, point, 50.0);
  REQUIRE_FALSE(wit.invariant);
  CHECK(wit.gap == Catch::Approx(1.0));
  double lam0 = transfer::spectral_potential(op, std::vector<double>(5, 0.0)).value;
  CHECK(wit.bound == Catch::Approx(lam0 - 50.0).margin(1e-6));

  // a point mass at a fixed point is invariant
  auto opf = funnel();
  std::vector<double> delta0{1, 0, 0, 0};
  CHECK(transfer::invariance_witness(opf, delta0, 50.0).invariant);
}

TEST_CASE("equilibrium subgradient on fixtures") {
  auto op = five_cycle();
  auto eq = transfer::equilibrium_subgradient(op, std::vector<double>(5, 0.0));
  for (double w : eq.weights) CHECK(w == Catch::Approx(0.2).margin(1e-6));
  CHECK(eq.invariance_gap <= 1e-3);

  auto opf = funnel();
  std::vector<double> a{0.3, -0.1, 0.2, 0.5};
  auto eqf = transfer::equilibrium_subgradient(opf, a);
  CHECK(eqf.weights[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(eqf.weights[1] + eqf.weights[2] + eqf.weights[3] ==
        Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("subgradient inequality holds") {
  SplitMix64 rng(37);
  auto op = five_cycle({0.2, -0.4, 0.1, 0.3, 0.0});
  std::vector<double> a{0.5, -0.2, 0.1, 0.0, 0.3};
  auto eq = transfer::equilibrium_subgradient(op, a);
  double lam_a = transfer::spectral_potential(op, a).value;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> b(5);
    for (auto& v : b) v = rng.uniform(-1.0, 1.0);
    auto ab = a;
    for (std::size_t i = 0; i < 5; ++i) ab[i] += b[i];
    double pairing = 0.0;
    for (std::size_t i = 0; i < 5; ++i) pairing += eq.weights[i] * b[i];
    CHECK(transfer::spectral_potential(op, ab).value - lam_a >= pairing - 1e-5);
  }
}

TEST_CASE("subgradients of random single-cycle systems are invariant") {
  SplitMix64 rng(38);
  int done = 0;
  while (done < 8) {
    auto op = random_op(2 + rng.next() % 11, rng);
    if (op.system.cycles().size() != 1) continue;
    ++done;
    std::vector<double> a(op.size());
    for (auto& v : a) v = rng.uniform(-0.5, 0.5);
    auto eq = transfer::equilibrium_subgradient(op, a);
    double mass = 0.0;
    for (double w : eq.weights) {
      CHECK(w >= 0.0);
      mass += w;
    }
    CHECK(mass == Catch::Approx(1.0).margin(1e-9));
    CHECK(eq.invariance_gap <= 1e-3);
  }
}

TEST_CASE("unique-cycle identity for the potential") {
  auto op = five_cycle({0.3, -0.2, 0.1, 0.0, 0.5});
  auto res = transfer::theorem4_check(op, 20, 1e-6);
  CHECK(res.pass);
  CHECK(res.cycle == std::vector<std::size_t>{0, 1, 2, 3, 4});

  auto opf = funnel();
  auto resf = transfer::theorem4_check(opf, 20, 1e-6);
  CHECK(resf.pass);
  CHECK(resf.cycle == std::vector<std::size_t>{0});

  // two disjoint 2-cycles: not uniquely ergodic
  auto bad = transfer::build(transfer::FiniteSystem::from_map({1, 0, 3, 2}),
                             std::vector<double>(4, 0.0));
  CHECK_THROWS_AS(transfer::theorem4_check(bad, 5, 1e-6), precondition_error);
  CHECK_THROWS_WITH(transfer::theorem4_check(bad, 5, 1e-6),
                    Catch::Matchers::ContainsSubstring("0") &&
                        Catch::Matchers::ContainsSubstring("2"));
}
