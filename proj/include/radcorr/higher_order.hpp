#pragma once

#include <span>
#include <utility>
#include <vector>

#include "radcorr/model.hpp"
#include "radcorr/quadrature.hpp"

namespace radcorr {

/// A sequence of +1 (creation) and -1 (annihilation) entries.
struct SignSequence {
  std::vector<int> entries;

  std::vector<int> partial_sums() const;
  int total() const;
  bool operator==(const SignSequence&) const = default;
  auto operator<=>(const SignSequence&) const = default;
};

/// Length-j sequences whose proper prefix sums are >= 1 and whose total is
/// 0, in lexicographic order (-1 before +1). Empty for odd or non-positive j.
std::vector<SignSequence> enumerate_sigma0(int j);

/// Length-n sequences whose prefix sums are all >= 1.
std::vector<SignSequence> enumerate_sigma(int n);

/// Contraction of creation index i with annihilation index l (1-based, i < l).
struct WickPairing {
  std::vector<std::pair<int, int>> pairs;
  bool operator==(const WickPairing&) const = default;
  auto operator<=>(const WickPairing&) const = default;
};

/// All ways to pair every -1 with a distinct earlier +1. Empty when the
/// sequence is unbalanced.
std::vector<WickPairing> wick_pairings(const SignSequence& sigma);

/// The j = 4, sigma = (+,+,-,-) term of F_3 reduced to five scalar
/// variables (rho1, rho2, cos theta1, cos theta2, phi) with p along z; both
/// Wick pairings summed:
///   2 pi rho1^2 rho2^2 mu^2 V1^2 V2^2 [1 / (D1^2 D12) + 1 / (D1 D12 D2)].
double j4_integrand(std::span<const double> v, double p_abs, double x, const ModelParams& params);

/// Integration box of j4_integrand.
quad::Box j4_box(const ModelParams& params);

/// F_n(p, x) for odd n in {1, 3}; even n delegates to n - 1 and n >= 5 is an
/// unimplemented-order error. n = 1 is the deterministic F(p, x). Requires a
/// massive field.
quad::IntegralResult eval_Fn(int n, double p_abs, double x, const ModelParams& params,
                             const quad::McConfig& mc);

struct GnResult {
  double g = 0.0;
  double mc_error = 0.0;  // standard error of F_n at the root
  double residual = 0.0;  // |g - F_n(p, g)| with the averaged estimator
};

/// Root of x = F_n(p, x). F_n is averaged over `seeds` common-random-number
/// replicas derived from mc.seed; the residual target widens to
/// tol + 3 * (standard error). Zero for |p| >= mu / 2.
GnResult solve_gn(int n, double p_abs, const ModelParams& params, double tol,
                  const quad::McConfig& mc, int seeds = 3);

}  // namespace radcorr
