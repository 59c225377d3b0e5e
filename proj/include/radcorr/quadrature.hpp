#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace radcorr::quad {

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  // Monte-Carlo only: strata in which every sample evaluated to exactly zero.
  std::size_t zero_strata = 0;
};

using RadialIntegrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod integration of a one-dimensional integrand on
/// [lo, hi]. When lo == 0 the variable is changed to rho = u^2, which makes
/// endpoint singularities rho^(-beta) with beta <= 1/2 smooth.
/// Throws AccuracyError (carrying the best estimate) when the relative error
/// estimate stays above tol.
IntegralResult integrate_radial(const RadialIntegrand& f, double lo, double hi,
                                double tol = 1e-10);

/// Same as above, but integrates piecewise over consecutive breakpoints.
/// The tolerance applies to the total.
IntegralResult integrate_radial(const RadialIntegrand& f, std::span<const double> breakpoints,
                                double tol = 1e-10);

/// Breakpoints lo, s, 10 s, 100 s, ... , hi, for integrands with a feature
/// at scale s near the lower endpoint.
std::vector<double> log_breakpoints(double lo, double scale, double hi);

/// Solid-angle integral of 1 / (A - B cos theta) over the unit sphere:
/// (4 pi / B) artanh(B / A). Switches to the series in (B/A)^2 when B/A < 1e-4.
/// Throws a resonance error unless A > B >= 0.
double angular_log_kernel(double a, double b);

/// Solid-angle integral of 1 / (A - B cos theta)^2: 4 pi / (A^2 - B^2).
double angular_inverse_square_kernel(double a, double b);

struct McConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  bool stratify = true;
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t dim() const { return lo.size(); }
  double volume() const;
};

using BoxIntegrand = std::function<double(std::span<const double>)>;

/// Monte-Carlo estimate of the integral of f over a box of dimension <= 6.
/// With stratification the box is cut into a regular grid of strata, each
/// sampled by its own generator seeded from (seed, stratum index); the
/// result does not depend on the order in which strata are processed.
/// error_estimate is the sample standard error.
IntegralResult integrate_mc(const BoxIntegrand& f, const Box& box, const McConfig& cfg);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
double unit_uniform(std::uint64_t bits);

/// SplitMix64 step; used to derive sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [lo, hi].
GaussRule gauss_legendre(std::size_t n, double lo, double hi);

/// Tensor-product Gauss-Legendre cubature with n points per dimension.
IntegralResult integrate_tensor_gauss(const BoxIntegrand& f, const Box& box, std::size_t n);

}  // namespace radcorr::quad
