#include "radcorr/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "radcorr/errors.hpp"

namespace radcorr::quad {

namespace {

constexpr const char* kModule = "quadrature";
constexpr std::size_t kMaxPanels = 4000;

struct Piece {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  std::size_t evaluations = 0;
};

struct Panel {
  double lo, hi, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// 21-point Kronrod panel on [a, b] with the QUADPACK error estimate built
// from the embedded 10-point Gauss rule. Node tables come from Boost.
template <class G>
Panel kronrod_panel(const G& g, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  static const auto& x = Kronrod::abscissa();
  static const auto& wk = Kronrod::weights();
  static const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> fv{};
  fv[0] = g(center);
  for (std::size_t i = 1; i < 11; ++i) {
    fv[2 * i - 1] = g(center - half * x[i]);
    fv[2 * i] = g(center + half * x[i]);
  }
  double kron = wk[0] * fv[0];
  double gauss = 0.0;
  double abs_sum = wk[0] * std::abs(fv[0]);
  for (std::size_t i = 1; i < 11; ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    kron += wk[i] * pair;
    abs_sum += wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
    if (i % 2 == 1) gauss += wg[i / 2] * pair;
  }
  const double mean = 0.5 * kron;
  double asc = wk[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < 11; ++i) {
    asc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }
  const double resabs = abs_sum * std::abs(half);
  const double resasc = asc * std::abs(half);
  double err = std::abs((kron - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, kron * half, err, resabs};
}

// Globally adaptive bisection: the panel with the largest error estimate is
// split until the summed estimate meets the request or the budget runs out.
template <class G>
Piece global_adaptive(const G& g, double lo, double hi, double tol) {
  auto rule = [&](double a, double b) { return kronrod_panel(g, a, b); };
  std::priority_queue<Panel> heap;
  heap.push(rule(lo, hi));
  Piece out;
  out.value = heap.top().value;
  out.error = heap.top().error;
  out.l1 = heap.top().l1;
  const double eps = std::numeric_limits<double>::epsilon();
  while (heap.size() < kMaxPanels &&
         out.error > std::max(tol * std::max(std::abs(out.value), out.l1), 100.0 * eps * out.l1)) {
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;
    heap.pop();
    const Panel left = rule(worst.lo, mid);
    const Panel right = rule(mid, worst.hi);
    out.value += left.value + right.value - worst.value;
    out.error += left.error + right.error - worst.error;
    out.l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  out.value = out.error = out.l1 = 0.0;
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    out.l1 += heap.top().l1;
    heap.pop();
  }
  return out;
}

Piece gauss_kronrod_piece(const RadialIntegrand& f, double lo, double hi, double tol) {
  std::size_t count = 0;
  Piece out;
  if (lo == 0.0) {
    // rho = u^2 removes rho^(-1/2) endpoint singularities exactly.
    auto g = [&](double u) {
      ++count;
      return u == 0.0 ? 0.0 : 2.0 * u * f(u * u);
    };
    out = global_adaptive(g, 0.0, std::sqrt(hi), tol);
    if (!(out.error <= tol * std::max(std::abs(out.value), out.l1))) {
      // Stronger singularities (1/2 < beta < 1) survive the substitution;
      // the double-exponential rule clusters nodes at the endpoint instead.
      auto h = [&](double x) {
        ++count;
        return f(x);
      };
      boost::math::quadrature::tanh_sinh<double> ts;
      double ts_error = 0.0;
      double ts_l1 = 0.0;
      try {
        const double ts_value = ts.integrate(h, 0.0, hi, tol, &ts_error, &ts_l1);
        if (std::isfinite(ts_value) && ts_error < out.error) {
          out.value = ts_value;
          out.error = ts_error;
          out.l1 = ts_l1;
        }
      } catch (const std::exception&) {
        // keep the Gauss-Kronrod estimate; the caller reports the accuracy failure
      }
    }
  } else {
    auto g = [&](double x) {
      ++count;
      return f(x);
    };
    out = global_adaptive(g, lo, hi, tol);
  }
  out.evaluations = count;
  return out;
}

}  // namespace

IntegralResult integrate_radial(const RadialIntegrand& f, double lo, double hi, double tol) {
  const double bp[2] = {lo, hi};
  return integrate_radial(f, std::span<const double>(bp, 2), tol);
}

IntegralResult integrate_radial(const RadialIntegrand& f, std::span<const double> breakpoints,
                                double tol) {
  if (breakpoints.size() < 2) fail(ErrorKind::Domain, kModule, "need at least two breakpoints");
  if (!(tol > 0.0)) fail(ErrorKind::Domain, kModule, "tolerance must be positive");
  IntegralResult out;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    if (!(lo < hi) || lo < 0.0 || !std::isfinite(hi)) {
      std::ostringstream os;
      os << "invalid interval [" << lo << ", " << hi << "]";
      fail(ErrorKind::Domain, kModule, os.str());
    }
    const Piece p = gauss_kronrod_piece(f, lo, hi, tol);
    out.value += p.value;
    out.error_estimate += p.error;
    out.evaluations += p.evaluations;
    l1 += p.l1;
  }
  if (!std::isfinite(out.value) || !std::isfinite(out.error_estimate)) {
    throw AccuracyError(kModule, "integrand produced a non-finite value", out.value,
                        out.error_estimate);
  }
  // Roundoff floor as in QUADPACK: a request below ~100 eps cannot be met.
  const double scale = std::max(std::abs(out.value), l1);
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * l1;
  if (out.error_estimate > std::max(tol * scale, floor) && out.error_estimate > 1e-300) {
    std::ostringstream os;
    os << "adaptive subdivision did not reach relative tolerance " << tol << " (estimate "
       << out.value << " +- " << out.error_estimate << ")";
    throw AccuracyError(kModule, os.str(), out.value, out.error_estimate);
  }
  return out;
}

std::vector<double> log_breakpoints(double lo, double scale, double hi) {
  std::vector<double> bp{lo};
  if (scale > 0.0) {
    for (double s = scale; s < hi; s *= 10.0) {
      if (s > lo * 1.000001 && s < hi / 1.000001) bp.push_back(s);
    }
  }
  bp.push_back(hi);
  return bp;
}

double angular_log_kernel(double a, double b) {
  if (!(b >= 0.0) || !(a > b)) {
    std::ostringstream os;
    os << "angular kernel requires A > B >= 0 (A=" << a << ", B=" << b << ")";
    fail(ErrorKind::Resonance, kModule, os.str());
  }
  constexpr double four_pi = 4.0 * std::numbers::pi;
  const double r = b / a;
  if (r < 1e-4) {
    const double r2 = r * r;
    return four_pi / a * (1.0 + r2 / 3.0 + r2 * r2 / 5.0);
  }
  // artanh(B/A) = log1p(2B / (A - B)) / 2, accurate when A - B is tiny.
  return four_pi / b * 0.5 * std::log1p(2.0 * b / (a - b));
}

double angular_inverse_square_kernel(double a, double b) {
  if (!(b >= 0.0) || !(a > b)) fail(ErrorKind::Resonance, kModule, "requires A > B >= 0");
  return 4.0 * std::numbers::pi / ((a - b) * (a + b));
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

IntegralResult integrate_mc(const BoxIntegrand& f, const Box& box, const McConfig& cfg) {
  const std::size_t d = box.dim();
  if (d == 0 || d > 6 || box.hi.size() != d) {
    fail(ErrorKind::Domain, kModule, "Monte-Carlo box dimension must be in 1..6");
  }
  if (cfg.samples < 1000) fail(ErrorKind::Domain, kModule, "Monte-Carlo needs >= 1000 samples");
  for (std::size_t i = 0; i < d; ++i) {
    if (!(box.lo[i] < box.hi[i])) fail(ErrorKind::Domain, kModule, "empty Monte-Carlo box");
  }

  std::size_t per_dim = 1;
  if (cfg.stratify) {
    per_dim = static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(cfg.samples) / 8.0, 1.0 / static_cast<double>(d))));
    per_dim = std::max<std::size_t>(per_dim, 1);
  }
  std::size_t strata = 1;
  for (std::size_t i = 0; i < d; ++i) strata *= per_dim;
  const std::size_t per_stratum = std::max<std::size_t>(cfg.samples / strata, 2);

  std::vector<double> width(d);
  for (std::size_t i = 0; i < d; ++i) {
    width[i] = (box.hi[i] - box.lo[i]) / static_cast<double>(per_dim);
  }
  const double stratum_volume = box.volume() / static_cast<double>(strata);

  IntegralResult out;
  double variance = 0.0;
  std::vector<std::size_t> cell(d, 0);
  std::vector<double> x(d);
  const std::uint64_t base = splitmix64(cfg.seed);
  for (std::size_t s = 0; s < strata; ++s) {
    std::size_t rem = s;
    for (std::size_t i = 0; i < d; ++i) {
      cell[i] = rem % per_dim;
      rem /= per_dim;
    }
    std::uint64_t state = splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(s) + 1));
    double sum = 0.0;
    double sum_sq = 0.0;
    bool all_zero = true;
    for (std::size_t n = 0; n < per_stratum; ++n) {
      for (std::size_t i = 0; i < d; ++i) {
        state += 0x9e3779b97f4a7c15ULL;
        const double u = unit_uniform(splitmix64(state));
        x[i] = box.lo[i] + width[i] * (static_cast<double>(cell[i]) + u);
      }
      const double v = f(std::span<const double>(x));
      if (v != 0.0) all_zero = false;
      sum += v;
      sum_sq += v * v;
    }
    const double nn = static_cast<double>(per_stratum);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
    out.value += stratum_volume * mean;
    variance += stratum_volume * stratum_volume * var / nn;
    out.evaluations += per_stratum;
    if (all_zero) ++out.zero_strata;
  }
  out.error_estimate = std::sqrt(variance);
  if (!std::isfinite(out.value)) {
    throw AccuracyError(kModule, "Monte-Carlo integrand produced a non-finite value", out.value,
                        out.error_estimate);
  }
  return out;
}

GaussRule gauss_legendre(std::size_t n, double lo, double hi) {
  if (n == 0) fail(ErrorKind::Domain, kModule, "Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 - (static_cast<double>(j) - 1.0) * p2) /
             static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

IntegralResult integrate_tensor_gauss(const BoxIntegrand& f, const Box& box, std::size_t n) {
  const std::size_t d = box.dim();
  if (d == 0 || d > 6) fail(ErrorKind::Domain, kModule, "tensor cubature dimension must be 1..6");
  std::vector<GaussRule> rules;
  for (std::size_t i = 0; i < d; ++i) rules.push_back(gauss_legendre(n, box.lo[i], box.hi[i]));
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  IntegralResult out;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rules[i].nodes[idx[i]];
      w *= rules[i].weights[idx[i]];
    }
    out.value += w * f(std::span<const double>(x));
    ++out.evaluations;
    std::size_t k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
  return out;
}

}  // namespace radcorr::quad
