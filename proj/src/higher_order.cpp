#include "radcorr/higher_order.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "radcorr/errors.hpp"
#include "radcorr/generator.hpp"

namespace radcorr {

namespace {

constexpr const char* kModule = "higher_order";

void extend(std::vector<int>& seq, int remaining, int sum, bool balanced_end,
            std::vector<SignSequence>& out) {
  if (remaining == 0) {
    if (!balanced_end || sum == 0) out.push_back({seq});
    return;
  }
  for (int s : {-1, +1}) {
    const int next = sum + s;
    // Proper prefixes stay >= 1; for Sigma_0 the final entry may reach 0.
    const bool last = remaining == 1;
    if (next < 1 && !(balanced_end && last && next == 0)) continue;
    // A balanced end needs enough room to come back down.
    if (balanced_end && next > remaining - 1) continue;
    seq.push_back(s);
    extend(seq, remaining - 1, next, balanced_end, out);
    seq.pop_back();
  }
}

void pair_up(const std::vector<int>& e, std::size_t pos, std::vector<int>& open,
             std::vector<std::pair<int, int>>& pairs, std::vector<WickPairing>& out) {
  if (pos == e.size()) {
    if (open.empty()) out.push_back({pairs});
    return;
  }
  const int index = static_cast<int>(pos) + 1;
  if (e[pos] == +1) {
    open.push_back(index);
    pair_up(e, pos + 1, open, pairs, out);
    open.pop_back();
    return;
  }
  for (std::size_t k = 0; k < open.size(); ++k) {
    const int creator = open[k];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(k));
    pairs.emplace_back(creator, index);
    pair_up(e, pos + 1, open, pairs, out);
    pairs.pop_back();
    open.insert(open.begin() + static_cast<std::ptrdiff_t>(k), creator);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::vector<int> SignSequence::partial_sums() const {
  std::vector<int> out;
  int s = 0;
  for (int e : entries) out.push_back(s += e);
  return out;
}

int SignSequence::total() const {
  int s = 0;
  for (int e : entries) s += e;
  return s;
}

std::vector<SignSequence> enumerate_sigma0(int j) {
  std::vector<SignSequence> out;
  if (j < 2 || j % 2 != 0) return out;
  std::vector<int> seq;
  extend(seq, j, 0, true, out);
  return out;
}

std::vector<SignSequence> enumerate_sigma(int n) {
  std::vector<SignSequence> out;
  if (n < 1) return out;
  std::vector<int> seq;
  extend(seq, n, 0, false, out);
  return out;
}

std::vector<WickPairing> wick_pairings(const SignSequence& sigma) {
  std::vector<WickPairing> out;
  if (sigma.total() != 0) return out;
  std::vector<int> open;
  std::vector<std::pair<int, int>> pairs;
  pair_up(sigma.entries, 0, open, pairs, out);
  return out;
}

double j4_integrand(std::span<const double> v, double p_abs, double x, const ModelParams& params) {
  const double r1 = v[0];
  const double r2 = v[1];
  const double c1 = v[2];
  const double c2 = v[3];
  const double phi = v[4];
  const double mu = params.mu;
  const double w1 = params.omega(r1);
  const double w2 = params.omega(r2);
  const double s1 = std::sqrt(std::max(0.0, 1.0 - c1 * c1));
  const double s2 = std::sqrt(std::max(0.0, 1.0 - c2 * c2));
  const double k12_sq = r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * (c1 * c2 + s1 * s2 * std::cos(phi));
  const double d1 = mu * w1 + r1 * r1 - 2.0 * p_abs * r1 * c1 + x;
  const double d2 = mu * w2 + r2 * r2 - 2.0 * p_abs * r2 * c2 + x;
  const double d12 = mu * (w1 + w2) + k12_sq - 2.0 * p_abs * (r1 * c1 + r2 * c2) + x;
  if (!(d1 > 0.0 && d2 > 0.0 && d12 > 0.0)) {
    fail(ErrorKind::Resonance, kModule,
         "non-positive denominator in the j = 4 term at |k1| = " + fmt(r1) + ", |k2| = " + fmt(r2));
  }
  const double weight = 2.0 * std::numbers::pi * r1 * r1 * r2 * r2 * mu * mu *
                        params.v_sq(r1) * params.v_sq(r2);
  return weight / (d1 * d12) * (1.0 / d1 + 1.0 / d2);
}

quad::Box j4_box(const ModelParams& params) {
  const double L = params.form_factor.support_radius();
  return {{0.0, 0.0, -1.0, -1.0, 0.0}, {L, L, 1.0, 1.0, 2.0 * std::numbers::pi}};
}

quad::IntegralResult eval_Fn(int n, double p_abs, double x, const ModelParams& params,
                             const quad::McConfig& mc) {
  if (n < 1) fail(ErrorKind::Domain, kModule, "order n must be >= 1");
  if (n % 2 == 0) return eval_Fn(n - 1, p_abs, x, params, mc);
  if (n >= 5) {
    fail(ErrorKind::Unimplemented, kModule,
         "order n = " + std::to_string(n) + " needs j = 6 terms; implemented orders are 1 and 3");
  }
  if (!(params.mass() > 0.0)) fail(ErrorKind::Domain, kModule, "F_n requires a massive field");
  if (!(x > 0.0)) fail(ErrorKind::Domain, kModule, "F_n requires x > 0");

  quad::IntegralResult out;
  out.value = eval_F(p_abs, x, params);
  if (n == 1) return out;
  const auto j4 = quad::integrate_mc(
      [&](std::span<const double> v) { return j4_integrand(v, p_abs, x, params); },
      j4_box(params), mc);
  out.value += j4.value;
  out.error_estimate = j4.error_estimate;
  out.evaluations = j4.evaluations;
  out.zero_strata = j4.zero_strata;
  return out;
}

GnResult solve_gn(int n, double p_abs, const ModelParams& params, double tol,
                  const quad::McConfig& mc, int seeds) {
  if (n < 1) fail(ErrorKind::Domain, kModule, "order n must be >= 1");
  if (n % 2 == 0) return solve_gn(n - 1, p_abs, params, tol, mc, seeds);
  if (n >= 5) {
    fail(ErrorKind::Unimplemented, kModule,
         "order n = " + std::to_string(n) + " needs j = 6 terms; implemented orders are 1 and 3");
  }
  if (!(params.mass() > 0.0)) fail(ErrorKind::Domain, kModule, "g_n requires a massive field");
  if (!(tol > 0.0) || seeds < 1) fail(ErrorKind::Domain, kModule, "need tol > 0 and seeds >= 1");
  if (!(p_abs >= 0.0)) fail(ErrorKind::Domain, kModule, "|p| must be >= 0");
  if (p_abs >= 0.5 * params.mu) return {};
  if (n == 1) {
    const auto fp = solve_g_detailed(p_abs, params, tol);
    return {fp.g, 0.0, fp.residual};
  }

  // Common random numbers: every x uses the same replicas, so the averaged
  // F_3 is a deterministic, strictly decreasing function of x.
  struct Eval {
    double value;
    double se;
  };
  auto F3 = [&](double x) {
    Eval e{eval_F(p_abs, x, params), 0.0};
    double var = 0.0;
    double j4 = 0.0;
    for (int s = 0; s < seeds; ++s) {
      quad::McConfig cfg = mc;
      cfg.seed = quad::splitmix64(mc.seed + static_cast<std::uint64_t>(s));
      const auto r = quad::integrate_mc(
          [&](std::span<const double> v) { return j4_integrand(v, p_abs, x, params); },
          j4_box(params), cfg);
      j4 += r.value;
      var += r.error_estimate * r.error_estimate;
    }
    e.value += j4 / seeds;
    e.se = std::sqrt(var) / seeds;
    return e;
  };

  // The n = 1 bracket, inflated by 2 to hold the small positive j = 4 term.
  const double upper1 = inverse_k_integral(params) / (1.0 - 2.0 * params.epsilon) + 1.0;
  double lo = 1e-12 * upper1;
  double hi = 2.0 * upper1;
  const Eval f_lo = F3(lo);
  const Eval f_hi = F3(hi);
  if (!(lo < f_lo.value) || !(hi > f_hi.value)) {
    fail(ErrorKind::Internal, kModule,
         "g_3 bracket does not change sign: F_3(" + fmt(lo) + ") = " + fmt(f_lo.value) +
             ", F_3(" + fmt(hi) + ") = " + fmt(f_hi.value));
  }
  GnResult out;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    x = 0.5 * (lo + hi);
    const Eval e = F3(x);
    const double gx = x - e.value;
    out = {x, e.se, std::abs(gx)};
    if (std::abs(gx) <= tol || hi - lo <= 1e-15 * hi) break;
    (gx < 0.0 ? lo : hi) = x;
  }
  if (!(out.residual <= tol + 3.0 * out.mc_error)) {
    throw AccuracyError(kModule, "g_3 residual " + fmt(out.residual) + " above tolerance", out.g,
                        out.residual);
  }
  return out;
}

}  // namespace radcorr
