#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "radcorr/model.hpp"

namespace radcorr {

/// F(p, x) = mu int |V(k)|^2 / (mu omega(k) - 2 p.k + k^2 + x) dk, reduced to
/// a radial integral with the exact angular kernel. Throws a resonance error
/// if the denominator can vanish (only possible for |p| >= mu / 2).
double eval_F(double p_abs, double x, const ModelParams& params);
double eval_F(double p_abs, double x, const ModelParams& params, double quad_tol);

/// dF/dx = -mu int |V|^2 / (mu omega - 2 p.k + k^2 + x)^2 dk < 0.
double eval_dF_dx(double p_abs, double x, const ModelParams& params, double quad_tol);

struct FixedPoint {
  double g = 0.0;
  double residual = 0.0;  // |g - F(p, g)|
  int iterations = 0;
};

/// Unique root of x = F(p, x) by bracketing bisection with safeguarded
/// Newton steps. Zero for |p| >= mu / 2. `start` (if positive) seeds Newton.
FixedPoint solve_g_detailed(double p_abs, const ModelParams& params, double tol,
                            double start = 0.0);
double solve_g(double p_abs, const ModelParams& params, double tol);

/// Integral of |V|^2 / |k| over R^3.
double inverse_k_integral(const ModelParams& params);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double g) const { return g >= lower && g <= upper; }
};

/// Bracket for g(p), |p| <= epsilon mu, in the massless case:
/// [(1 - slack) I / (1 + 2 epsilon), I / (1 - 2 epsilon)] with I the
/// integral of |V|^2 / |k|.
Bracket g_bounds(const ModelParams& params);

/// Explicit generator with the g(0) regularization: denominator
/// D(k) = mu |k| + k^2 + g0 in the massless case, so g_eff(p) = F(p, g0).
double eval_g_eff(double p_abs, double g0, const ModelParams& params);

/// alpha_j(mu) = 2^j mu / (j + 1) int |V|^2 |k|^j / D(k)^(j+1) dk, j even.
double alpha_coeff(int j, double g0, const ModelParams& params);

/// Radial table of g on Chebyshev-Lobatto nodes of [0, p_max] with
/// monotone cubic interpolation.
class GeneratorTable {
 public:
  GeneratorTable(std::vector<double> p, std::vector<double> g, double mu,
                 std::string params_hash);

  /// Solves g at `nodes` Chebyshev-Lobatto points of [0, p_max]; p_max < mu / 2.
  static GeneratorTable build(const ModelParams& params, std::size_t nodes, double p_max,
                              double tol, unsigned jobs = 0);

  /// Interpolated g. Zero for p >= mu / 2; domain error on (p_max, mu / 2).
  double operator()(double p_abs) const;

  const std::vector<double>& p_samples() const { return p_; }
  const std::vector<double>& g_values() const { return g_; }
  double p_max() const { return p_.back(); }
  double mu() const { return mu_; }
  const std::string& params_hash() const { return hash_; }

  /// CSV with header `p,g`.
  void write_csv(const std::string& path) const;
  static GeneratorTable read_csv(const std::string& path, double mu, std::string params_hash);

 private:
  std::vector<double> p_;
  std::vector<double> g_;
  double mu_;
  std::string hash_;
  std::shared_ptr<const std::function<double(double)>> interp_;
};

/// Truncated power-series generator sum_{j <= N, even} alpha_j |p|^j, or
/// for N = infinite the closed form g_eff.
class PolyGenerator {
 public:
  static constexpr int kInfinite = -1;

  PolyGenerator(int order, double g0, const ModelParams& params);

  double operator()(double p_abs) const;
  int order() const { return order_; }
  bool infinite() const { return order_ == kInfinite; }
  double g0() const { return g0_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  int order_;
  double g0_;
  ModelParams params_;
  std::vector<double> coeffs_;  // alpha_0, alpha_2, ..., alpha_N
};

/// h(p) = p^2 - g(p).
double eval_h(const GeneratorTable& gen, double p_abs);
double eval_h(const PolyGenerator& gen, double p_abs);

/// R_N(p) = sum_{j >= N+2, even} alpha_j |p|^j, summed until a term drops
/// below 1e-3 of the running sum. Requires 2|p| < mu.
double remainder_RN(int N, double p_abs, double g0, const ModelParams& params);

}  // namespace radcorr
