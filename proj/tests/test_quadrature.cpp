#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "radcorr/errors.hpp"
#include "radcorr/quadrature.hpp"

using namespace radcorr;
using namespace radcorr::quad;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("radial quadrature of smooth and singular monomials") {
  auto r = integrate_radial([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-12);
  CHECK(r.error_estimate >= 0.0);
  CHECK(r.evaluations > 0);

  auto s = integrate_radial([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(s.value - 2.0) < 1e-11);

  // rho^(-0.9): beta < 1 but stronger than the exact u^2 cure.
  auto t = integrate_radial([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, 1e-8);
  CHECK(std::abs(t.value - 10.0) < 1e-6);
}

TEST_CASE("Nelson mu-norm integrand matches the logarithmic closed form") {
  const double mu = 10.0;
  auto f = [&](double r) { return r * r / r / ((r + 1.0 / mu) * (r + 1.0 / mu)); };
  const auto bp = log_breakpoints(0.0, 1.0 / mu, 1.0);
  auto r = integrate_radial(f, bp, 1e-12);
  CHECK(std::abs(r.value - (std::log(11.0) - 10.0 / 11.0)) < 1e-12);
}

TEST_CASE("halving the tolerance moves the value by less than the coarse error estimate") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.01, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double c = unif(rng);
    auto f = [c](double x) { return std::exp(-c * x) / (x + 0.05 * c) * std::sqrt(x); };
    auto coarse = integrate_radial(f, 0.0, 2.0, 1e-6);
    auto fine = integrate_radial(f, 0.0, 2.0, 5e-7);
    CHECK(std::abs(coarse.value - fine.value) <= std::max(coarse.error_estimate, 1e-15));
  }
}

TEST_CASE("non-integrable integrand reports an accuracy error with an estimate") {
  bool thrown = false;
  try {
    integrate_radial([](double x) { return std::pow(x, -1.5); }, 0.0, 1.0, 1e-10);
  } catch (const AccuracyError& e) {
    thrown = true;
    CHECK(e.kind() == ErrorKind::Accuracy);
  }
  CHECK(thrown);
  CHECK_THROWS_AS(integrate_radial([](double x) { return x; }, 1.0, 0.5), Error);
}

TEST_CASE("angular kernel closed form and limits") {
  CHECK(angular_log_kernel(2.0, 1.0) == doctest::Approx(4 * kPi * std::atanh(0.5)).epsilon(1e-14));
  CHECK(angular_log_kernel(3.0, 0.0) == doctest::Approx(4 * kPi / 3.0).epsilon(1e-15));

  // Series branch agrees with the log form just above the switch.
  const double a = 1.7;
  const double b_lo = 0.99e-4 * a;
  const double b_hi = 1.01e-4 * a;
  const double exact_lo = 4 * kPi / b_lo * std::atanh(b_lo / a);
  CHECK(angular_log_kernel(a, b_lo) == doctest::Approx(exact_lo).epsilon(1e-14));
  CHECK(std::abs(angular_log_kernel(a, b_lo) - angular_log_kernel(a, b_hi)) < 1e-6);

  // Near resonance: reference in extended precision. a - 1 is exact in double.
  const double ar = 1.0 + 1e-9;
  const long double ref =
      2.0L * std::numbers::pi_v<long double> *
      std::log((static_cast<long double>(ar) + 1.0L) / (static_cast<long double>(ar) - 1.0L));
  CHECK(std::isfinite(angular_log_kernel(ar, 1.0)));
  CHECK(std::abs(angular_log_kernel(ar, 1.0) / static_cast<double>(ref) - 1.0) < 1e-6);

  CHECK_THROWS_AS(angular_log_kernel(1.0, 1.0), Error);
  try {
    angular_log_kernel(1.0, 2.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resonance);
  }
}

TEST_CASE("angular kernel equals direct integration over cos(theta)") {
  const auto rule = gauss_legendre(200, -1.0, 1.0);
  for (double b : {0.1, 0.5, 0.9, 1.5}) {
    const double a = 2.0;
    double direct = 0.0;
    double direct_sq = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double den = a - b * rule.nodes[i];
      direct += 2 * kPi * rule.weights[i] / den;
      direct_sq += 2 * kPi * rule.weights[i] / (den * den);
    }
    CHECK(angular_log_kernel(a, b) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(angular_inverse_square_kernel(a, b) == doctest::Approx(direct_sq).epsilon(1e-12));
  }
}

TEST_CASE("B * kernel / 4 pi is strictly increasing in B") {
  const double a = 1.3;
  double prev = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double b = a * i / 200.0;
    const double v = angular_log_kernel(a, b) * b / (4 * kPi);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("Monte-Carlo: constants, products and determinism") {
  McConfig cfg;
  cfg.samples = 20000;
  cfg.seed = 42;
  Box cube{{0, 0, 0}, {1, 1, 1}};
  auto one = integrate_mc([](std::span<const double>) { return 1.0; }, cube, cfg);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.error_estimate < 1e-12);

  Box sq{{0, 0}, {1, 1}};
  auto prod = integrate_mc([](std::span<const double> x) { return x[0] * x[1]; }, sq, cfg);
  CHECK(std::abs(prod.value - 0.25) < 3 * prod.error_estimate);

  auto again = integrate_mc([](std::span<const double> x) { return x[0] * x[1]; }, sq, cfg);
  CHECK(prod.value == again.value);
  CHECK(prod.error_estimate == again.error_estimate);

  cfg.seed = 43;
  auto other = integrate_mc([](std::span<const double> x) { return x[0] * x[1]; }, sq, cfg);
  CHECK(other.value != prod.value);

  cfg.samples = 10;
  CHECK_THROWS_AS(integrate_mc([](std::span<const double>) { return 1.0; }, sq, cfg), Error);
}

TEST_CASE("Monte-Carlo three-sigma coverage over analytic integrands") {
  // integral over [0,1]^d of prod_i (c_i + 1) x_i^(c_i), c_i random: exactly 1.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  int covered = 0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t d = 1 + i % 5;
    std::vector<double> c(d);
    for (auto& v : c) v = unif(rng);
    Box box{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
    McConfig cfg{4000, static_cast<std::uint64_t>(1000 + i), true};
    auto r = integrate_mc(
        [&](std::span<const double> x) {
          double p = 1.0;
          for (std::size_t k = 0; k < d; ++k) p *= (c[k] + 1.0) * std::pow(x[k], c[k]);
          return p;
        },
        box, cfg);
    if (std::abs(r.value - 1.0) <= 3 * r.error_estimate) ++covered;
  }
  CHECK(covered >= 18);
}

TEST_CASE("stratification diagnostic counts strata where the integrand vanished") {
  Box sq{{0, 0}, {1, 1}};
  McConfig cfg{8000, 3, true};
  auto r = integrate_mc(
      [](std::span<const double> x) { return x[0] < 0.25 ? 1.0 : 0.0; }, sq, cfg);
  CHECK(r.zero_strata > 0);
  CHECK(std::abs(r.value - 0.25) < 3 * r.error_estimate + 1e-12);
}

TEST_CASE("Gauss-Legendre is exact for polynomials of degree 2n-1") {
  const auto rule = gauss_legendre(5, -1.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 9);
  CHECK(s == doctest::Approx((std::pow(2.0, 10) - 1.0) / 10.0).epsilon(1e-13));

  Box box{{0, 0, 0}, {1, 2, 3}};
  auto r = integrate_tensor_gauss(
      [](std::span<const double> x) { return x[0] * x[0] * x[1] * x[2] * x[2] * x[2]; }, box, 4);
  CHECK(r.value == doctest::Approx(1.0 / 3.0 * 2.0 * 81.0 / 4.0).epsilon(1e-13));
}
