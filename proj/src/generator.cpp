#include "radcorr/generator.hpp"

#include <cmath>
// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "radcorr/csv.hpp"
#include "radcorr/errors.hpp"
#include "radcorr/parallel.hpp"

namespace radcorr {

namespace {

constexpr const char* kModule = "generator";
constexpr double kFourPi = 4.0 * std::numbers::pi;

// Breakpoint seed for the radial integrals: the denominator changes
// character where mu rho ~ x, and at the mass scale.
double feature_scale(double x, const ModelParams& params) {
  double s = x / params.mu;
  if (params.mass() > 0.0) s = std::min(s, params.mass());
  return std::min(s, 0.1 * params.form_factor.support_radius());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_massless(const ModelParams& params, const char* what) {
  if (!params.massless()) {
    fail(ErrorKind::Domain, kModule, std::string(what) + " is defined for the massless field only");
  }
}

// alpha_j |p|^j as one integral, mu / ((j+1) D) (2 |p| rho / D)^j, which
// stays finite where alpha_j and |p|^j separately would overflow.
double alpha_times_power(int j, double p_abs, double g0, const ModelParams& params,
                         double quad_tol) {
  const double mu = params.mu;
  auto w = [&](double r) {
    const double d = mu * r + r * r + g0;
    const double ratio = 2.0 * p_abs * r / d;
    return mu / ((j + 1.0) * d) * (j == 0 ? 1.0 : std::pow(ratio, j));
  };
  return shell_integral(params.form_factor, 0.0, w, feature_scale(g0, params), quad_tol).value;
}

}  // namespace

double eval_F(double p_abs, double x, const ModelParams& params, double quad_tol) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, kModule, "F(p, x) requires x > 0, got x = " + fmt(x));
  if (!(p_abs >= 0.0)) fail(ErrorKind::Domain, kModule, "|p| must be >= 0");
  const double mu = params.mu;
  auto w = [&](double r) {
    const double a = mu * params.omega(r) + r * r + x;
    const double b = 2.0 * p_abs * r;
    if (!(a > b)) {
      fail(ErrorKind::Resonance, kModule,
           "denominator vanishes at |k| = " + fmt(r) + " for |p| = " + fmt(p_abs) +
               ", x = " + fmt(x));
    }
    return mu * quad::angular_log_kernel(a, b) / kFourPi;
  };
  return shell_integral(params.form_factor, params.mass(), w, feature_scale(x, params), quad_tol)
      .value;
}

double eval_F(double p_abs, double x, const ModelParams& params) {
  return eval_F(p_abs, x, params, params.tol.quad_rel);
}

double eval_dF_dx(double p_abs, double x, const ModelParams& params, double quad_tol) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, kModule, "dF/dx requires x > 0");
  const double mu = params.mu;
  auto w = [&](double r) {
    const double a = mu * params.omega(r) + r * r + x;
    const double b = 2.0 * p_abs * r;
    if (!(a > b)) fail(ErrorKind::Resonance, kModule, "denominator vanishes at |k| = " + fmt(r));
    return -mu * quad::angular_inverse_square_kernel(a, b) / kFourPi;
  };
  return shell_integral(params.form_factor, params.mass(), w, feature_scale(x, params), quad_tol)
      .value;
}

double inverse_k_integral(const ModelParams& params) {
  return inverse_k_norm_sq(params.form_factor, params.mass(), params.tol.quad_rel);
}

FixedPoint solve_g_detailed(double p_abs, const ModelParams& params, double tol, double start) {
  if (!(p_abs >= 0.0)) fail(ErrorKind::Domain, kModule, "|p| must be >= 0");
  if (!(tol > 0.0)) fail(ErrorKind::Domain, kModule, "fixed-point tolerance must be > 0");
  if (!(params.epsilon >= 0.0 && params.epsilon < 0.5)) {
    fail(ErrorKind::Domain, kModule, "epsilon must be < 1/2");
  }
  if (p_abs >= 0.5 * params.mu) return {};

  const double upper = inverse_k_integral(params) / (1.0 - 2.0 * params.epsilon) + 1.0;
  // F must be resolved well below the residual target.
  const double qtol = std::clamp(0.02 * tol / upper, 1e-14, params.tol.quad_rel);
  auto G = [&](double x) { return x - eval_F(p_abs, x, params, qtol); };

  double lo = 1e-12 * upper;
  double hi = upper;
  const double g_lo = G(lo);
  if (!(g_lo < 0.0)) {
    fail(ErrorKind::Internal, kModule, "x - F(p, x) is not negative at x = 0+");
  }
  if (!(G(hi) > 0.0)) {
    // Beyond |p| <= epsilon mu the a-priori upper bound may fail; F(p, 0+)
    // always exceeds the root because F decreases in x.
    hi = lo - g_lo;
    if (!(G(hi) > 0.0)) {
      fail(ErrorKind::Internal, kModule,
           "fixed-point bracket [" + fmt(lo) + ", " + fmt(hi) + "] does not change sign");
    }
  }

  double x = (start > lo && start < hi) ? start : 0.5 * (lo + hi);
  FixedPoint out;
  double best = x;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 200; ++it) {
    const double gx = G(x);
    out.iterations = it;
    if (std::abs(gx) < best_res) {
      best_res = std::abs(gx);
      best = x;
    }
    if (std::abs(gx) <= tol) break;
    (gx < 0.0 ? lo : hi) = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double slope = 1.0 - eval_dF_dx(p_abs, x, params, qtol);
    double next = x - gx / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  out.g = best;
  out.residual = best_res;
  if (!(best_res <= tol)) {
    throw AccuracyError(kModule,
                        "fixed point residual " + fmt(best_res) + " above tolerance " + fmt(tol),
                        best, best_res);
  }
  return out;
}

double solve_g(double p_abs, const ModelParams& params, double tol) {
  return solve_g_detailed(p_abs, params, tol).g;
}

Bracket g_bounds(const ModelParams& params) {
  require_massless(params, "the fixed-point bracket");
  if (!(params.epsilon >= 0.0 && params.epsilon < 0.5)) {
    fail(ErrorKind::Domain, kModule, "epsilon must be < 1/2");
  }
  const double I = inverse_k_integral(params);
  if (!std::isfinite(I)) fail(ErrorKind::Integrability, kModule, "int |V|^2 / |k| is not finite");
  return {(1.0 - params.tol.lemma_slack) * I / (1.0 + 2.0 * params.epsilon),
          I / (1.0 - 2.0 * params.epsilon)};
}

double eval_g_eff(double p_abs, double g0, const ModelParams& params) {
  require_massless(params, "g_eff");
  if (!(g0 > 0.0)) fail(ErrorKind::Domain, kModule, "g_eff requires g0 > 0");
  // With omega = |k| the denominator mu|k| + k^2 + g0 - 2 p.k is exactly the
  // one of F at x = g0.
  return eval_F(p_abs, g0, params);
}

double alpha_coeff(int j, double g0, const ModelParams& params) {
  require_massless(params, "alpha_j");
  if (j < 0 || j % 2 != 0) {
    fail(ErrorKind::Domain, kModule, "alpha_j needs an even j >= 0, got " + std::to_string(j));
  }
  if (!(g0 > 0.0)) fail(ErrorKind::Domain, kModule, "alpha_j requires g0 > 0");
  return alpha_times_power(j, 1.0, g0, params, params.tol.quad_rel);
}

GeneratorTable::GeneratorTable(std::vector<double> p, std::vector<double> g, double mu,
                               std::string params_hash)
    : p_(std::move(p)), g_(std::move(g)), mu_(mu), hash_(std::move(params_hash)) {
  if (p_.size() != g_.size() || p_.size() < 4) {
    fail(ErrorKind::Domain, kModule, "generator table needs >= 4 matching (p, g) samples");
  }
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!std::isfinite(p_[i]) || !std::isfinite(g_[i]) || p_[i] < 0.0) {
      fail(ErrorKind::Domain, kModule, "generator table has invalid samples");
    }
    if (i > 0 && !(p_[i] > p_[i - 1])) {
      fail(ErrorKind::Domain, kModule, "generator table p must be strictly increasing");
    }
  }
  if (!(p_.back() < 0.5 * mu_)) {
    fail(ErrorKind::Domain, kModule, "generator table must stay below |p| = mu / 2");
  }
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::vector<double>(p_), std::vector<double>(g_));
  interp_ = std::make_shared<const std::function<double(double)>>(
      [spline](double r) { return (*spline)(r); });
}

GeneratorTable GeneratorTable::build(const ModelParams& params, std::size_t nodes, double p_max,
                                     double tol, unsigned jobs) {
  if (nodes < 4) fail(ErrorKind::Domain, kModule, "generator table needs at least 4 nodes");
  if (!(p_max > 0.0 && p_max < 0.5 * params.mu)) {
    fail(ErrorKind::Domain, kModule, "table range p_max must lie in (0, mu / 2)");
  }
  std::vector<double> p(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(nodes - 1);
    p[i] = 0.5 * p_max * (1.0 - std::cos(theta));
  }
  p.front() = 0.0;
  p.back() = p_max;
  std::vector<double> g(nodes);
  parallel_for(nodes, jobs, [&](std::size_t i) { g[i] = solve_g(p[i], params, tol); });
  return GeneratorTable(std::move(p), std::move(g), params.mu, fingerprint(params));
}

double GeneratorTable::operator()(double p_abs) const {
  if (!(p_abs >= 0.0)) fail(ErrorKind::Domain, kModule, "|p| must be >= 0");
  if (p_abs >= 0.5 * mu_) return 0.0;
  if (p_abs > p_.back() * (1.0 + 1e-12)) {
    fail(ErrorKind::Domain, kModule,
         "|p| = " + fmt(p_abs) + " beyond the table range " + fmt(p_.back()));
  }
  return (*interp_)(std::min(p_abs, p_.back()));
}

void GeneratorTable::write_csv(const std::string& path) const {
  Table t{{"p", "g"}, {}};
  for (std::size_t i = 0; i < p_.size(); ++i) t.rows.push_back({p_[i], g_[i]});
  emit_csv(t, path);
}

GeneratorTable GeneratorTable::read_csv(const std::string& path, double mu,
                                        std::string params_hash) {
  const Table t = radcorr::read_csv(path);
  if (t.header != std::vector<std::string>{"p", "g"}) {
    fail(ErrorKind::Domain, kModule, path + ": expected header p,g");
  }
  std::vector<double> p;
  std::vector<double> g;
  for (const auto& row : t.rows) {
    p.push_back(row[0]);
    g.push_back(row[1]);
  }
  return GeneratorTable(std::move(p), std::move(g), mu, std::move(params_hash));
}

PolyGenerator::PolyGenerator(int order, double g0, const ModelParams& params)
    : order_(order), g0_(g0), params_(params) {
  if (order != kInfinite && (order < 0 || order % 2 != 0)) {
    fail(ErrorKind::Domain, kModule, "polynomial order N must be even and >= 0");
  }
  require_massless(params, "the polynomial generator");
  if (!(g0 > 0.0)) fail(ErrorKind::Domain, kModule, "polynomial generator requires g0 > 0");
  for (int j = 0; order != kInfinite && j <= order; j += 2) {
    coeffs_.push_back(alpha_coeff(j, g0, params));
  }
}

double PolyGenerator::operator()(double p_abs) const {
  if (!(p_abs >= 0.0)) fail(ErrorKind::Domain, kModule, "|p| must be >= 0");
  if (infinite()) return p_abs >= 0.5 * params_.mu ? 0.0 : eval_g_eff(p_abs, g0_, params_);
  // Horner in p^2.
  const double p2 = p_abs * p_abs;
  double s = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * p2 + *it;
  return s;
}

double eval_h(const GeneratorTable& gen, double p_abs) { return p_abs * p_abs - gen(p_abs); }

double eval_h(const PolyGenerator& gen, double p_abs) { return p_abs * p_abs - gen(p_abs); }

double remainder_RN(int N, double p_abs, double g0, const ModelParams& params) {
  require_massless(params, "R_N");
  if (N < 0 || N % 2 != 0) fail(ErrorKind::Domain, kModule, "N must be even and >= 0");
  if (!(p_abs >= 0.0)) fail(ErrorKind::Domain, kModule, "|p| must be >= 0");
  if (!(2.0 * p_abs < params.mu)) {
    fail(ErrorKind::Domain, kModule, "power series diverges: 2|p|/mu = " + fmt(2.0 * p_abs / params.mu));
  }
  if (!(g0 > 0.0)) fail(ErrorKind::Domain, kModule, "R_N requires g0 > 0");
  if (p_abs == 0.0) return 0.0;
  double sum = 0.0;
  for (int j = N + 2; j <= N + 4000; j += 2) {
    const double term = alpha_times_power(j, p_abs, g0, params, params.tol.quad_rel);
    sum += term;
    if (term < 1e-3 * sum) return sum;
  }
  throw AccuracyError(kModule, "R_N series did not reach the truncation criterion", sum, sum);
}

}  // namespace radcorr
