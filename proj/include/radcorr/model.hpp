#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "radcorr/quadrature.hpp"

namespace radcorr {

/// V(k) = 1(|k| <= lambda) / sqrt(omega(k)).
struct NelsonFormFactor {
  double lambda = 1.0;
};

/// V(k) = |k|^(-a) 1(|k| <= lambda), a in [0, 1/2].
struct PowerLawFormFactor {
  double a = 0.0;
  double lambda = 1.0;
};

/// Radial samples (rho_i, V_i) joined by a monotone piecewise cubic.
/// Below the first sample the curve continues as the power law through the
/// first two samples; beyond the last sample it is zero.
class TabulatedFormFactor {
 public:
  TabulatedFormFactor(std::vector<double> rho, std::vector<double> values);

  double operator()(double rho) const;
  double support() const { return rho_.back(); }
  double first_sample() const { return rho_.front(); }
  double first_value() const { return values_.front(); }
  /// Exponent beta of the V ~ rho^beta continuation below the first sample.
  double inner_exponent() const { return inner_exponent_; }
  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> rho_;
  std::vector<double> values_;
  double inner_exponent_ = 0.0;
  std::shared_ptr<const std::function<double(double)>> interp_;
};

class FormFactor {
 public:
  using Variant = std::variant<NelsonFormFactor, PowerLawFormFactor, TabulatedFormFactor>;

  FormFactor() : v_(NelsonFormFactor{}) {}
  explicit FormFactor(Variant v) : v_(std::move(v)) {}

  static FormFactor nelson(double lambda) { return FormFactor(NelsonFormFactor{lambda}); }
  static FormFactor power_law(double a, double lambda) {
    return FormFactor(PowerLawFormFactor{a, lambda});
  }
  static FormFactor tabulated(std::vector<double> rho, std::vector<double> values) {
    return FormFactor(TabulatedFormFactor(std::move(rho), std::move(values)));
  }

  /// V at radius rho for field mass m (the Nelson variant depends on omega).
  double value(double rho, double mass) const;
  double value_sq(double rho, double mass) const {
    const double v = value(rho, mass);
    return v * v;
  }
  /// V vanishes for rho beyond this radius.
  double support_radius() const;
  std::string kind() const;
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

struct Dispersion {
  double mass = 0.0;
  double operator()(double rho) const;
};

struct Tolerances {
  double quad_rel = 1e-10;
  double fixed_point = 1e-11;
  double lemma_slack = 0.02;
  double krylov = 1e-12;
};

struct ModelParams {
  double mu = 100.0;
  Dispersion dispersion{};
  FormFactor form_factor{};
  double epsilon = 0.25;
  Tolerances tol{};

  double mass() const { return dispersion.mass; }
  bool massless() const { return dispersion.mass == 0.0; }
  double omega(double rho) const { return dispersion(rho); }
  double v_sq(double rho) const { return form_factor.value_sq(rho, dispersion.mass); }
};

/// 4 pi int_0^R rho^2 |V(rho)|^2 w(rho) d rho over the support of V, with
/// log-spaced breakpoints above `feature_scale` (pass 0 for none).
quad::IntegralResult shell_integral(const FormFactor& ff, double mass,
                                    const std::function<double(double)>& weight,
                                    double feature_scale, double tol);

/// || omega_mu^(-s) V ||_L2 with omega_mu = omega + 1/mu. s = 0 gives ||V||_L2.
double mu_norm(const FormFactor& ff, double s, double mu, double mass, double tol = 1e-10);

double l2_norm(const FormFactor& ff, double mass, double tol = 1e-10);

/// || |k|^(-1/2) V ||_L2, squared: the integral of |V|^2 / |k|.
double inverse_k_norm_sq(const FormFactor& ff, double mass, double tol = 1e-10);

struct Violation {
  std::string field;
  std::string message;
};

/// All violated model constraints (empty when the parameters are admissible).
std::vector<Violation> validate(const ModelParams& params);

/// Throws the first violation as a domain or integrability error.
void require_valid(const ModelParams& params);

/// Canonical one-line description of the physical parameters.
std::string describe(const ModelParams& params);

/// 16 hex digits identifying `describe(params)`; stamped on computed tables.
std::string fingerprint(const ModelParams& params);

}  // namespace radcorr
