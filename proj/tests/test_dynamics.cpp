#include "doctest.h"

#include <cmath>
#include <numbers>

#include "radcorr/dynamics.hpp"
#include "radcorr/errors.hpp"
#include "radcorr/generator.hpp"

using namespace radcorr;

namespace {

ModelParams nelson(double mu) {
  ModelParams p;
  p.mu = mu;
  p.epsilon = 0.25;
  p.form_factor = FormFactor::nelson(1.0);
  return p;
}

double direct_distance(const WavePacket& phi, double t, const GeneratorFn& a, const GeneratorFn& b) {
  const auto pa = propagate(phi, t, a);
  const auto pb = propagate(phi, t, b);
  double s = 0.0;
  for (std::size_t i = 0; i < phi.p.size(); ++i) s += phi.weights[i] * std::norm(pa.amplitudes[i] - pb.amplitudes[i]);
  return std::sqrt(s);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("wave packet weights carry the shell measure and normalize") {
  const auto phi = WavePacket::bump(2.0, 5.0, 32);
  double w = 0.0;
  for (double x : phi.weights) w += x;
  CHECK(w == doctest::Approx(4.0 * std::numbers::pi * (125.0 - 8.0) / 3.0).epsilon(1e-13));
  CHECK(phi.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kind_of([] { WavePacket::bump(3.0, 1.0, 8); }) == ErrorKind::Domain);
  CHECK(kind_of([] { WavePacket::shell(0.0, 1.0, 8, [](double) { return 0.0; }); }) == ErrorKind::Domain);
}

TEST_CASE("effective window check") {
  const auto params = nelson(100.0);
  CHECK_NOTHROW(require_effective_window(WavePacket::bump(1.0, 25.0, 8), params));
  CHECK(kind_of([&] { require_effective_window(WavePacket::bump(1.0, 26.0, 8), params); }) ==
        ErrorKind::Domain);
}

TEST_CASE("propagate: identity at t = 0, unitary, group law") {
  const auto params = nelson(200.0);
  const PolyGenerator poly(4, solve_g(0.0, params, 1e-12), params);
  const auto gen = as_generator(poly);
  const auto phi = WavePacket::bump(1.0, 40.0, 48);
  const auto same = propagate(phi, 0.0, gen);
  for (std::size_t i = 0; i < phi.p.size(); ++i) CHECK(same.amplitudes[i] == phi.amplitudes[i]);
  for (double t : {0.3, -2.0, 17.0}) {
    const auto out = propagate(phi, t, gen);
    CHECK(std::abs(out.norm() - 1.0) <= 1e-14);
    for (std::size_t i = 0; i < phi.p.size(); ++i) {
      CHECK(std::abs(out.amplitudes[i]) == doctest::Approx(std::abs(phi.amplitudes[i])).epsilon(1e-14));
    }
  }
  const auto two = propagate(propagate(phi, 0.011, gen), 0.007, gen);
  const auto one = propagate(phi, 0.018, gen);
  for (std::size_t i = 0; i < phi.p.size(); ++i) CHECK(std::abs(two.amplitudes[i] - one.amplitudes[i]) <= 1e-13);
}

TEST_CASE("propagate raises when the table does not cover the packet") {
  const auto params = nelson(100.0);
  const auto table = GeneratorTable::build(params, 12, 20.0, 1e-11, 1);
  const auto phi = WavePacket::bump(10.0, 30.0, 8);
  CHECK(kind_of([&] { propagate(phi, 1.0, as_generator(table)); }) == ErrorKind::Domain);
}

TEST_CASE("generator distance") {
  const auto params = nelson(300.0);
  const double g0 = solve_g(0.0, params, 1e-12);
  const auto g2 = as_generator(PolyGenerator(2, g0, params));
  const auto ginf = as_generator(PolyGenerator(PolyGenerator::kInfinite, g0, params));
  const auto phi = WavePacket::bump(20.0, 70.0, 40);

  CHECK(generator_distance(phi, 5.0, g2, g2) == 0.0);
  for (double t : {0.5, 3.0, 40.0, 1e4}) {
    const double d = generator_distance(phi, t, g2, ginf);
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);
    CHECK(d == doctest::Approx(direct_distance(phi, t, g2, ginf)).epsilon(1e-9));
  }
  // First-order Duhamel: d(t) = |t| ||(h_a - h_b) phi|| + O(t^2).
  const auto [m1, m2] = generator_gap_moments(phi, g2, ginf);
  CHECK(m1 > 0.0);
  CHECK(m2 > 0.0);
  const double t = 1e-6;
  CHECK(generator_distance(phi, t, g2, ginf) == doctest::Approx(t * m1).epsilon(1e-6));
}

TEST_CASE("region membership") {
  CHECK(region_member(0.0, 0.49, 0));
  CHECK(region_member(0.0, 0.49, 10));
  CHECK_FALSE(region_member(0.95, 0.3, 2));
  CHECK(region_member(0.95, 0.3, 6));
  CHECK_FALSE(region_member(0.1, 0.5, 100));

  const auto v = region_verdict(0.95, 0.3, 2);
  CHECK(v.binding == "b < (N+2)(1-a)");
  CHECK(v.limit == doctest::Approx(0.2));
  CHECK(region_verdict(0.1, 0.7, 2).binding == "b < 1/2");
  CHECK(kind_of([] { region_member(1.0, 0.1, 2); }) == ErrorKind::Domain);
  CHECK(kind_of([] { region_member(0.5, 0.1, 3); }) == ErrorKind::Domain);

  // I_N is nested and inside I = [0,1) x [0,1/2).
  for (int N = 0; N <= 12; N += 2) {
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j <= 60; ++j) {
        const double a = i / 100.0;
        const double b = j / 100.0;
        if (region_member(a, b, N)) {
          CHECK(region_member(a, b, N + 2));
          CHECK(b < 0.5);
        }
      }
    }
  }
  const auto poly = region_polyline(2);
  REQUIRE(poly.size() == 5);
  CHECK(poly[2].first == doctest::Approx(1.0 - 1.0 / 8.0));
  CHECK(poly[2].second == 0.5);
  // The kink is on both constraint lines.
  CHECK(4.0 * (1.0 - poly[2].first) == doctest::Approx(0.5));
}

TEST_CASE("probe preconditions") {
  const auto params = nelson(100.0);
  CHECK(kind_of([&] { nonconvergence_probe(2, 0.8, {1e3}, params); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { nonconvergence_probe(2, 1.0, {1e3}, params); }) == ErrorKind::Domain);
  auto pl = params;
  pl.form_factor = FormFactor::power_law(0.25, 1.0);
  CHECK(kind_of([&] { nonconvergence_probe(2, 0.9, {1e3}, pl); }) == ErrorKind::Domain);
}

TEST_CASE("probe: linear small-tau limit, proxy below distance") {
  const auto params = nelson(100.0);
  ProbeOptions opts;
  opts.nodes = 24;
  opts.tau = 1e-7;
  const auto small = nonconvergence_probe(2, 0.9, {1e4}, params, opts);
  REQUIRE(small.rows.size() == 1);
  const auto& r = small.rows[0];
  CHECK(r.distance == doctest::Approx(r.t * r.gap1).epsilon(1e-5));

  opts.tau = 0.0;
  const auto fit = nonconvergence_probe(2, 0.9, {1e3, 1e4, 1e5}, params, opts);
  CHECK(fit.tau > 0.0);
  CHECK(fit.b == doctest::Approx(0.4));
  for (const auto& row : fit.rows) {
    CHECK(row.t == doctest::Approx(fit.tau * std::pow(row.mu, 0.4)));
    if (row.lower_proxy > 0.0) CHECK(row.distance >= row.lower_proxy * (1.0 - 1e-12));
  }
}

TEST_CASE("distance to h^(N) is controlled by R_N and |g - g_eff|") {
  const auto params = nelson(1000.0);
  const double g0 = solve_g(0.0, params, 1e-12);
  const auto phi = WavePacket::bump(50.0, 200.0, 32);
  require_effective_window(phi, params);
  double sup_r = 0.0;
  double sup_env = 0.0;
  for (double p : phi.p) {
    sup_r = std::max(sup_r, remainder_RN(2, p, g0, params));
    sup_env = std::max(sup_env, std::abs(solve_g(p, params, 1e-12) - eval_g_eff(p, g0, params)));
  }
  const GeneratorFn exact = [&](double p) { return solve_g(p, params, 1e-12); };
  const auto poly = as_generator(PolyGenerator(2, g0, params));
  for (double t : {0.1, 1.0, 3.0}) {
    CHECK(generator_distance(phi, t, exact, poly) <= t * (sup_r + sup_env) * 1.01);
  }
}

TEST_CASE("bound evaluators") {
  const auto params = nelson(1e4);
  const double v = mu_norm(params.form_factor, 1.0, 1e4, 0.0);
  CHECK(bound_rhs(Bound::Massless, 0.0, 0, 2.0, params) == doctest::Approx(2.0 * v / 100.0).epsilon(1e-12));
  CHECK(bound_rhs(Bound::Massless, 3.0, 0, 1.0, params) ==
        doctest::Approx(v / 100.0 + 3.0 * v * v / 100.0).epsilon(1e-12));
  CHECK(bound_rhs(Bound::Polynomial, 2.0, 2, 1.0, params, 100.0) ==
        doctest::Approx(bound_rhs(Bound::Massless, 2.0, 0, 1.0, params) + 2.0 * 1e-8).epsilon(1e-12));
  CHECK(bound_rhs(Bound::Polynomial, 2.0, PolyGenerator::kInfinite, 1.0, params) ==
        doctest::Approx(bound_rhs(Bound::Massless, 2.0, 0, 1.0, params)));
  CHECK(bound_rhs(Bound::Window, 1.0, 0, 1.0, params) ==
        doctest::Approx(std::sqrt(std::log(1e4) / 1e4) * 2.0).epsilon(1e-14));
  auto pl = params;
  pl.form_factor = FormFactor::power_law(0.25, 1.0);
  CHECK(bound_rhs(Bound::Window, 0.0, 0, 3.0, pl) == doctest::Approx(3.0 / std::pow(1e4, 0.75)).epsilon(1e-14));

  auto massive = params;
  massive.dispersion.mass = 1.0;
  const double vm = mu_norm(massive.form_factor, 1.0, 1e4, 1.0);
  CHECK(bound_rhs(Bound::Massive, 0.0, 1, 1.0, massive) == doctest::Approx(2.0 * vm / 100.0).epsilon(1e-12));
  CHECK(bound_rhs(Bound::Massive, 0.0, 3, 1.0, massive) ==
        doctest::Approx(std::sqrt(6.0) * (vm / 100.0 + vm * vm * vm / (100.0 * 1e4))).epsilon(1e-12));

  CHECK(kind_of([&] { bound_rhs(Bound::Massless, 0.0, 0, 1.0, massive); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { bound_rhs(Bound::Massive, 0.0, 2, 1.0, massive); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { bound_rhs(Bound::Massive, 0.0, 1, 1.0, params); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { bound_rhs(Bound::Polynomial, 0.0, 2, 1.0, params, 0.0); }) == ErrorKind::Domain);
  CHECK(kind_of([] { parse_bound("loose"); }) == ErrorKind::Usage);
  CHECK(parse_bound("window") == Bound::Window);
}

TEST_CASE("massive bound is continuous where the min factor switches") {
  auto params = nelson(100.0);
  // ||V||_mu = mu^{1/2} m at the switch; find m by bisection.
  auto gap = [&](double m) { return mu_norm(params.form_factor, 1.0, 100.0, m) - 10.0 * m; };
  double lo = 0.01;
  double hi = 10.0;
  REQUIRE(gap(lo) > 0.0);
  REQUIRE(gap(hi) < 0.0);
  for (int i = 0; i < 200; ++i) (gap(0.5 * (lo + hi)) > 0.0 ? lo : hi) = 0.5 * (lo + hi);
  auto at = [&](double m) {
    params.dispersion.mass = m;
    return bound_rhs(Bound::Massive, 5.0, 3, 1.0, params);
  };
  const double m = 0.5 * (lo + hi);
  CHECK(at(m * (1.0 - 1e-9)) == doctest::Approx(at(m * (1.0 + 1e-9))).epsilon(1e-7));
}
