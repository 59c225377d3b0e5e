#include "radcorr/model.hpp"

#include <cmath>
// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <sstream>

#include "radcorr/errors.hpp"

namespace radcorr {

namespace {

constexpr const char* kModule = "model";
constexpr double kFourPi = 4.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

TabulatedFormFactor::TabulatedFormFactor(std::vector<double> rho, std::vector<double> values)
    : rho_(std::move(rho)), values_(std::move(values)) {
  if (rho_.size() != values_.size()) {
    fail(ErrorKind::Domain, kModule, "tabulated form factor: rho and V sample counts differ");
  }
  if (rho_.size() < 4) {
    fail(ErrorKind::Domain, kModule, "tabulated form factor needs at least 4 samples");
  }
  if (rho_.front() < 0.0) fail(ErrorKind::Domain, kModule, "tabulated rho must be >= 0");
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    if (!std::isfinite(rho_[i]) || !std::isfinite(values_[i])) {
      fail(ErrorKind::Domain, kModule, "tabulated form factor has non-finite samples");
    }
    if (i > 0 && !(rho_[i] > rho_[i - 1])) {
      fail(ErrorKind::Domain, kModule, "tabulated rho must be strictly increasing");
    }
  }

  const double r0 = rho_[0];
  const double v0 = values_[0];
  const double v1 = values_[1];
  if (r0 > 0.0 && v0 != 0.0 && v1 != 0.0 && (v0 > 0.0) == (v1 > 0.0)) {
    inner_exponent_ = std::log(std::abs(v1 / v0)) / std::log(rho_[1] / r0);
  }

  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::vector<double>(rho_), std::vector<double>(values_));
  interp_ = std::make_shared<const std::function<double(double)>>(
      [spline](double r) { return (*spline)(r); });
}

double TabulatedFormFactor::operator()(double rho) const {
  if (rho > rho_.back()) return 0.0;
  if (rho < rho_.front()) {
    if (inner_exponent_ == 0.0) return values_.front();
    return values_.front() * std::pow(rho / rho_.front(), inner_exponent_);
  }
  return (*interp_)(rho);
}

double Dispersion::operator()(double rho) const { return std::sqrt(rho * rho + mass * mass); }

double FormFactor::value(double rho, double mass) const {
  return std::visit(
      overloaded{
          [&](const NelsonFormFactor& f) {
            return rho <= f.lambda ? 1.0 / std::sqrt(std::sqrt(rho * rho + mass * mass)) : 0.0;
          },
          [&](const PowerLawFormFactor& f) {
            if (rho > f.lambda) return 0.0;
            return f.a == 0.0 ? 1.0 : std::pow(rho, -f.a);
          },
          [&](const TabulatedFormFactor& f) { return f(rho); },
      },
      v_);
}

double FormFactor::support_radius() const {
  return std::visit(overloaded{
                        [](const NelsonFormFactor& f) { return f.lambda; },
                        [](const PowerLawFormFactor& f) { return f.lambda; },
                        [](const TabulatedFormFactor& f) { return f.support(); },
                    },
                    v_);
}

std::string FormFactor::kind() const {
  return std::visit(overloaded{
                        [](const NelsonFormFactor&) { return std::string("nelson"); },
                        [](const PowerLawFormFactor&) { return std::string("powerlaw"); },
                        [](const TabulatedFormFactor&) { return std::string("tabulated"); },
                    },
                    v_);
}

quad::IntegralResult shell_integral(const FormFactor& ff, double mass,
                                    const std::function<double(double)>& weight,
                                    double feature_scale, double tol) {
  const double support = ff.support_radius();
  auto integrand = [&](double r) { return r * r * ff.value_sq(r, mass) * weight(r); };

  const auto* tab = std::get_if<TabulatedFormFactor>(&ff.variant());
  if (tab == nullptr || tab->first_sample() == 0.0) {
    const auto bp = quad::log_breakpoints(0.0, feature_scale, support);
    auto r = quad::integrate_radial(integrand, bp, tol);
    r.value *= kFourPi;
    r.error_estimate *= kFourPi;
    return r;
  }

  // Below the first sample V is the power law rho^beta. The integral of
  // rho^2 |V|^2 / rho diverges unless beta > -1; rho = r0 u^q with
  // q = 1 / (2 beta + 2) flattens that worst case to a constant.
  const double beta = tab->inner_exponent();
  if (!(beta > -1.0)) {
    std::ostringstream os;
    os << "tabulated form factor behaves like rho^" << beta
       << " below the first sample; || |k|^(-1/2) V || diverges";
    fail(ErrorKind::Integrability, kModule, os.str());
  }
  const double r0 = tab->first_sample();
  const double q = 1.0 / (2.0 * beta + 2.0);
  auto inner = [&](double u) {
    if (u == 0.0) return 0.0;
    const double r = r0 * std::pow(u, q);
    return integrand(r) * r0 * q * std::pow(u, q - 1.0);
  };
  auto res = quad::integrate_radial(inner, 1e-300, 1.0, tol);

  std::vector<double> bp = quad::log_breakpoints(r0, feature_scale, support);
  if (tab->rho().size() <= 64) {
    bp.insert(bp.end(), tab->rho().begin(), tab->rho().end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  }
  const auto outer = quad::integrate_radial(integrand, bp, tol);
  res.value = kFourPi * (res.value + outer.value);
  res.error_estimate = kFourPi * (res.error_estimate + outer.error_estimate);
  res.evaluations += outer.evaluations;
  return res;
}

double mu_norm(const FormFactor& ff, double s, double mu, double mass, double tol) {
  if (!(s >= 0.0)) fail(ErrorKind::Domain, kModule, "mu_norm exponent s must be >= 0");
  if (!(mu > 0.0)) fail(ErrorKind::Domain, kModule, "mu must be > 0");
  const double inv_mu = 1.0 / mu;
  auto w = [&](double r) {
    if (s == 0.0) return 1.0;
    return std::pow(std::sqrt(r * r + mass * mass) + inv_mu, -2.0 * s);
  };
  const double scale = mass > 0.0 ? std::min(inv_mu, mass) : inv_mu;
  return std::sqrt(shell_integral(ff, mass, w, scale, tol).value);
}

double l2_norm(const FormFactor& ff, double mass, double tol) {
  return std::sqrt(shell_integral(ff, mass, [](double) { return 1.0; }, 0.0, tol).value);
}

double inverse_k_norm_sq(const FormFactor& ff, double mass, double tol) {
  return shell_integral(ff, mass, [](double r) { return 1.0 / r; }, 0.0, tol).value;
}

std::vector<Violation> validate(const ModelParams& params) {
  std::vector<Violation> out;
  if (!(params.mu > 0.0) || !std::isfinite(params.mu)) out.push_back({"mu", "mu must be > 0"});
  if (!(params.epsilon >= 0.0)) out.push_back({"epsilon", "epsilon must be >= 0"});
  if (!(params.epsilon < 0.5)) out.push_back({"epsilon", "epsilon must be < 1/2"});
  if (!(params.mass() >= 0.0) || !std::isfinite(params.mass())) {
    out.push_back({"mass", "mass must be finite and >= 0"});
  }

  bool shape_ok = true;
  std::visit(overloaded{
                 [&](const NelsonFormFactor& f) {
                   if (!(f.lambda > 0.0) || !std::isfinite(f.lambda)) {
                     out.push_back({"form_factor.lambda", "lambda must be > 0"});
                     shape_ok = false;
                   }
                 },
                 [&](const PowerLawFormFactor& f) {
                   if (!(f.lambda > 0.0) || !std::isfinite(f.lambda)) {
                     out.push_back({"form_factor.lambda", "lambda must be > 0"});
                     shape_ok = false;
                   }
                   if (!(f.a >= 0.0 && f.a <= 0.5)) {
                     out.push_back({"form_factor.a", "power-law exponent a must lie in [0, 1/2]"});
                     shape_ok = false;
                   }
                 },
                 [](const TabulatedFormFactor&) {},
             },
             params.form_factor.variant());
  if (!shape_ok || !(params.mass() >= 0.0)) return out;

  try {
    const double l2 = l2_norm(params.form_factor, params.mass(), params.tol.quad_rel);
    const double kinv = inverse_k_norm_sq(params.form_factor, params.mass(), params.tol.quad_rel);
    if (!std::isfinite(l2) || !std::isfinite(kinv)) {
      out.push_back({"integrability", "form-factor norms are not finite"});
    } else if (!(l2 > 0.0)) {
      out.push_back({"form_factor", "form factor vanishes identically"});
    }
  } catch (const Error& e) {
    out.push_back({"integrability", e.what()});
  }
  return out;
}

void require_valid(const ModelParams& params) {
  const auto violations = validate(params);
  if (violations.empty()) return;
  const auto& v = violations.front();
  fail(v.field == "integrability" ? ErrorKind::Integrability : ErrorKind::Domain, kModule,
       v.field + ": " + v.message);
}

std::string describe(const ModelParams& params) {
  std::ostringstream os;
  os.precision(17);
  os << "mu=" << params.mu << ";mass=" << params.mass() << ";epsilon=" << params.epsilon
     << ";form_factor=" << params.form_factor.kind();
  std::visit(overloaded{
                 [&](const NelsonFormFactor& f) { os << ";lambda=" << f.lambda; },
                 [&](const PowerLawFormFactor& f) { os << ";a=" << f.a << ";lambda=" << f.lambda; },
                 [&](const TabulatedFormFactor& f) {
                   for (std::size_t i = 0; i < f.rho().size(); ++i) {
                     os << ";" << f.rho()[i] << ":" << f.values()[i];
                   }
                 },
             },
             params.form_factor.variant());
  return os.str();
}

std::string fingerprint(const ModelParams& params) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : describe(params)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace radcorr
