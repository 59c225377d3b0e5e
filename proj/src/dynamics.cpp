#include "radcorr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "radcorr/errors.hpp"
#include "radcorr/parallel.hpp"
#include "radcorr/quadrature.hpp"

namespace radcorr {

namespace {

constexpr const char* kModule = "effective_dynamics";

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double weighted_sum(const WavePacket& phi, const std::function<double(std::size_t)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < phi.p.size(); ++i) s += phi.weights[i] * std::norm(phi.amplitudes[i]) * f(i);
  return s;
}

std::vector<double> gaps(const WavePacket& phi, const GeneratorFn& a, const GeneratorFn& b) {
  std::vector<double> d(phi.p.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = b(phi.p[i]) - a(phi.p[i]);
  return d;
}

double distance_from_gaps(const WavePacket& phi, double t, const std::vector<double>& d) {
  const double s = weighted_sum(phi, [&](std::size_t i) {
    const double h = std::sin(0.5 * t * d[i]);
    return 4.0 * h * h;
  });
  return std::min(2.0, std::sqrt(s));
}

std::pair<double, double> moments_from_gaps(const WavePacket& phi, const std::vector<double>& d) {
  const double m1 = weighted_sum(phi, [&](std::size_t i) { return d[i] * d[i]; });
  const double m2 = weighted_sum(phi, [&](std::size_t i) { return std::pow(d[i], 4); });
  return {std::sqrt(m1), std::sqrt(m2)};
}

double power_law_exponent(const ModelParams& params) {
  const auto& v = params.form_factor.variant();
  if (std::holds_alternative<NelsonFormFactor>(v)) return 0.5;
  if (const auto* pl = std::get_if<PowerLawFormFactor>(&v)) return pl->a;
  fail(ErrorKind::Domain, kModule, "the window bound requires a Nelson or power-law form factor");
}

}  // namespace

WavePacket WavePacket::shell(double p_lo, double p_hi, std::size_t nodes,
                             const std::function<double(double)>& profile) {
  if (!(p_lo >= 0.0 && p_hi > p_lo)) {
    fail(ErrorKind::Domain, kModule, "wave packet support needs 0 <= p_lo < p_hi");
  }
  if (nodes < 1) fail(ErrorKind::Domain, kModule, "wave packet needs at least one node");
  const auto rule = quad::gauss_legendre(nodes, p_lo, p_hi);
  WavePacket phi;
  phi.p_lo = p_lo;
  phi.p_hi = p_hi;
  phi.p = rule.nodes;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double p = rule.nodes[i];
    phi.weights.push_back(4.0 * std::numbers::pi * p * p * rule.weights[i]);
    phi.amplitudes.emplace_back(profile(p), 0.0);
  }
  const double n = phi.norm();
  if (!(n > 0.0) || !std::isfinite(n)) fail(ErrorKind::Domain, kModule, "wave packet profile has zero norm");
  for (auto& c : phi.amplitudes) c /= n;
  return phi;
}

WavePacket WavePacket::bump(double p_lo, double p_hi, std::size_t nodes) {
  return shell(p_lo, p_hi, nodes, [=](double p) {
    return std::sin(std::numbers::pi * (p - p_lo) / (p_hi - p_lo));
  });
}

double WavePacket::norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += weights[i] * std::norm(amplitudes[i]);
  return std::sqrt(s);
}

void require_effective_window(const WavePacket& phi, const ModelParams& params) {
  if (phi.p_hi > params.epsilon * params.mu) {
    fail(ErrorKind::Domain, kModule,
         "wave packet support reaches " + fmt(phi.p_hi) + " > epsilon mu = " +
             fmt(params.epsilon * params.mu));
  }
}

GeneratorFn as_generator(const GeneratorTable& table) {
  return [table](double p) { return table(p); };
}

GeneratorFn as_generator(const PolyGenerator& poly) {
  return [poly](double p) { return poly(p); };
}

WavePacket propagate(const WavePacket& phi, double t, const GeneratorFn& gen) {
  WavePacket out = phi;
  for (std::size_t i = 0; i < phi.p.size(); ++i) {
    const double p = phi.p[i];
    const double h = p * p - gen(p);
    out.amplitudes[i] *= std::polar(1.0, -t * h);
  }
  return out;
}

double generator_distance(const WavePacket& phi, double t, const GeneratorFn& gen_a,
                          const GeneratorFn& gen_b) {
  return distance_from_gaps(phi, t, gaps(phi, gen_a, gen_b));
}

std::pair<double, double> generator_gap_moments(const WavePacket& phi, const GeneratorFn& gen_a,
                                                const GeneratorFn& gen_b) {
  return moments_from_gaps(phi, gaps(phi, gen_a, gen_b));
}

RegionVerdict region_verdict(double a, double b, int N) {
  if (!(a >= 0.0 && a < 1.0)) fail(ErrorKind::Domain, kModule, "region needs a in [0, 1)");
  if (!(b >= 0.0)) fail(ErrorKind::Domain, kModule, "region needs b >= 0");
  if (N < 0 || N % 2 != 0) fail(ErrorKind::Domain, kModule, "region needs an even N >= 0");
  const double diag = (N + 2) * (1.0 - a);
  RegionVerdict v;
  v.limit = std::min(0.5, diag);
  v.inside = b < v.limit;
  v.binding = diag < 0.5 ? "b < (N+2)(1-a)" : "b < 1/2";
  return v;
}

bool region_member(double a, double b, int N) { return region_verdict(a, b, N).inside; }

std::vector<std::pair<double, double>> region_polyline(int N) {
  if (N < 0 || N % 2 != 0) fail(ErrorKind::Domain, kModule, "region needs an even N >= 0");
  const double kink = 1.0 - 0.5 / (N + 2);
  return {{0.0, 0.0}, {1.0, 0.0}, {kink, 0.5}, {0.0, 0.5}, {0.0, 0.0}};
}

ProbeResult nonconvergence_probe(int N, double a, const std::vector<double>& mu_list,
                                 const ModelParams& params, const ProbeOptions& opts) {
  if (N < 0 || N % 2 != 0) fail(ErrorKind::Domain, kModule, "probe needs an even N >= 0");
  const double a_min = 1.0 - 1.0 / (2.0 * (N + 1));
  if (!(a > a_min && a < 1.0)) {
    fail(ErrorKind::Domain, kModule,
         "probe needs a in (" + fmt(a_min) + ", 1) for N = " + std::to_string(N) + ", got " + fmt(a));
  }
  if (params.form_factor.kind() != "nelson" || !params.massless()) {
    fail(ErrorKind::Domain, kModule, "probe needs the massless Nelson model");
  }
  if (mu_list.empty()) fail(ErrorKind::Domain, kModule, "probe needs at least one mu");

  ProbeResult out;
  out.b = opts.time_exponent >= 0.0 ? opts.time_exponent : (N + 2) * (1.0 - a);
  const double scale_exp = (N + 2) * (a - 1.0);

  std::vector<WavePacket> packets;
  std::vector<std::vector<double>> deltas;
  for (double mu : mu_list) {
    ModelParams pm = params;
    pm.mu = mu;
    const double p0 = std::pow(mu, a);
    WavePacket phi = WavePacket::bump(0.5 * p0, p0, opts.nodes);
    const double g0 = solve_g(0.0, pm, opts.tol);
    const PolyGenerator poly(N, g0, pm);
    std::vector<double> g(phi.p.size());
    parallel_for(phi.p.size(), opts.jobs, [&](std::size_t i) { g[i] = solve_g(phi.p[i], pm, opts.tol); });
    std::vector<double> d(phi.p.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = poly(phi.p[i]) - g[i];
    ProbeRow row;
    row.mu = mu;
    std::tie(row.gap1, row.gap2) = moments_from_gaps(phi, d);
    out.rows.push_back(row);
    packets.push_back(std::move(phi));
    deltas.push_back(std::move(d));
  }

  out.tau = opts.tau;
  if (!(out.tau > 0.0)) {
    double c_v = std::numeric_limits<double>::infinity();
    double d_v = 0.0;
    for (const auto& r : out.rows) {
      c_v = std::min(c_v, r.gap1 * std::pow(r.mu, -scale_exp));
      d_v = std::max(d_v, r.gap2 * std::pow(r.mu, -2.0 * scale_exp));
    }
    if (!(c_v > 0.0 && d_v > 0.0)) {
      fail(ErrorKind::Internal, kModule, "probe gaps vanish; tau cannot be fitted");
    }
    out.tau = std::sqrt(c_v / d_v);
  }
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    auto& r = out.rows[k];
    r.t = out.tau * std::pow(r.mu, out.b);
    r.distance = distance_from_gaps(packets[k], r.t, deltas[k]);
    r.lower_proxy = r.t * r.gap1 - 0.5 * r.t * r.t * r.gap2;
  }
  return out;
}

Bound parse_bound(const std::string& name) {
  if (name == "massless") return Bound::Massless;
  if (name == "polynomial") return Bound::Polynomial;
  if (name == "massive") return Bound::Massive;
  if (name == "window") return Bound::Window;
  fail(ErrorKind::Usage, kModule, "unknown bound '" + name + "' (massless, polynomial, massive, window)");
}

std::string to_string(Bound b) {
  switch (b) {
    case Bound::Massless: return "massless";
    case Bound::Polynomial: return "polynomial";
    case Bound::Massive: return "massive";
    case Bound::Window: return "window";
  }
  return "?";
}

double bound_rhs(Bound b, double t, int order, double C, const ModelParams& params, double p0) {
  if (!(C >= 0.0)) fail(ErrorKind::Domain, kModule, "constant C must be >= 0");
  const double mu = params.mu;
  const double at = std::abs(t);
  const double tol = params.tol.quad_rel;
  auto need_massless = [&] {
    if (!params.massless()) {
      fail(ErrorKind::Domain, kModule, to_string(b) + " requires omega(k) = |k| (mass 0)");
    }
  };
  switch (b) {
    case Bound::Massless: {
      need_massless();
      const double v = mu_norm(params.form_factor, 1.0, mu, 0.0, tol);
      return C * (v / std::sqrt(mu) + at * v * v / std::sqrt(mu));
    }
    case Bound::Polynomial: {
      need_massless();
      const double v = mu_norm(params.form_factor, 1.0, mu, 0.0, tol);
      double rhs = v / std::sqrt(mu) + at * v * v / std::sqrt(mu);
      if (order != PolyGenerator::kInfinite) {
        if (order < 0 || order % 2 != 0) fail(ErrorKind::Domain, kModule, "the polynomial bound needs an even N >= 0");
        if (!(p0 > 0.0)) fail(ErrorKind::Domain, kModule, "the polynomial bound needs P0 > 0");
        rhs += at * std::pow(p0 / mu, order + 2);
      }
      return C * rhs;
    }
    case Bound::Massive: {
      const double m = params.mass();
      if (!(m >= 1.0 / mu)) {
        fail(ErrorKind::Domain, kModule, "the massive bound requires m >= 1/mu, got m = " + fmt(m));
      }
      if (order < 1 || order % 2 == 0) fail(ErrorKind::Domain, kModule, "the massive bound requires an odd n >= 1");
      const double n = order;
      const double v = mu_norm(params.form_factor, 1.0, mu, m, tol);
      const double sq = std::sqrt(mu);
      const double mm = std::pow(mu * m, 0.5 * (n - 1.0));
      const double rhs = v / sq + std::pow(v, n) / (sq * mm) +
                         at / sq * std::pow(v, n + 1.0) / mm * std::min(1.0, v / (sq * m));
      return std::pow(C, n) * std::sqrt(std::tgamma(n + 1.0)) * rhs;
    }
    case Bound::Window: {
      need_massless();
      const double a = power_law_exponent(params);
      if (a == 0.5) return C * std::sqrt(std::log(mu) / mu) * (1.0 + at);
      return C / std::pow(mu, 1.0 - a) * (1.0 + at);
    }
  }
  fail(ErrorKind::Internal, kModule, "unhandled bound");
}

}  // namespace radcorr
