#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "radcorr/generator.hpp"
#include "radcorr/model.hpp"

namespace radcorr {

/// Radial momentum-space wave function sampled on Gauss-Legendre nodes of
/// [p_lo, p_hi]. The weights carry the 4 pi p^2 shell measure, so
/// sum_i weights[i] |amplitudes[i]|^2 is the L2 norm squared.
struct WavePacket {
  std::vector<double> p;
  std::vector<double> weights;
  std::vector<std::complex<double>> amplitudes;
  double p_lo = 0.0;
  double p_hi = 0.0;

  /// Normalized packet with the given radial profile on `nodes` points.
  static WavePacket shell(double p_lo, double p_hi, std::size_t nodes,
                          const std::function<double(double)>& profile);
  /// Normalized smooth bump sin(pi (p - p_lo) / (p_hi - p_lo)).
  static WavePacket bump(double p_lo, double p_hi, std::size_t nodes);

  double norm() const;
};

/// Domain error unless the support lies inside |p| <= epsilon mu.
void require_effective_window(const WavePacket& phi, const ModelParams& params);

/// A generator is represented by its correction g(p); the dispersion is
/// h(p) = p^2 - g(p). Differences of two generators never form p^2.
using GeneratorFn = std::function<double(double)>;

GeneratorFn as_generator(const GeneratorTable& table);
GeneratorFn as_generator(const PolyGenerator& poly);

/// Multiplies by exp(-i t h(p)) at every node.
WavePacket propagate(const WavePacket& phi, double t, const GeneratorFn& gen);

/// || (e^{-it h_a} - e^{-it h_b}) phi ||, evaluated as
/// (sum w |phi|^2 4 sin^2(t (g_a - g_b) / 2))^{1/2}.
double generator_distance(const WavePacket& phi, double t, const GeneratorFn& gen_a,
                          const GeneratorFn& gen_b);

/// ||(h_a - h_b)^k phi|| for k = 1, 2.
std::pair<double, double> generator_gap_moments(const WavePacket& phi, const GeneratorFn& gen_a,
                                                const GeneratorFn& gen_b);

/// Membership in I_N = union over a' of [0, a'] x [0, min(1/2, (N+2)(1 - a'))),
/// which reduces to b < min(1/2, (N+2)(1 - a)).
bool region_member(double a, double b, int N);

struct RegionVerdict {
  bool inside = false;
  /// The constraint that decides membership: "b < 1/2" or "b < (N+2)(1-a)".
  std::string binding;
  double limit = 0.0;  // min(1/2, (N+2)(1 - a))
};
RegionVerdict region_verdict(double a, double b, int N);

/// Vertices (a, b) of the boundary of I_N, counter-clockwise from the origin.
std::vector<std::pair<double, double>> region_polyline(int N);

struct ProbeRow {
  double mu = 0.0;
  double t = 0.0;
  double distance = 0.0;
  double lower_proxy = 0.0;
  double gap1 = 0.0;  // ||(h_g - h^(N)) phi||
  double gap2 = 0.0;  // ||(h_g - h^(N))^2 phi||
};

struct ProbeResult {
  double tau = 0.0;
  double b = 0.0;
  std::vector<ProbeRow> rows;
};

struct ProbeOptions {
  double tau = 0.0;            // <= 0: fit tau^2 = C_V / D_V over the mu list
  double time_exponent = -1;   // < 0: b = (N + 2)(1 - a)
  std::size_t nodes = 64;
  double tol = 1e-11;
  unsigned jobs = 0;
};

/// For phi a bump on [mu^a / 2, mu^a] and t = tau mu^b, the distance between
/// the exact-g and degree-N polynomial evolutions, with the Duhamel lower
/// bound t ||D phi|| - t^2 / 2 ||D^2 phi||, D = h_g - h^(N). C_V and D_V are
/// the extreme rescaled gaps min ||D phi|| mu^{-(N+2)(a-1)} and
/// max ||D^2 phi|| mu^{-2(N+2)(a-1)} over the list.
ProbeResult nonconvergence_probe(int N, double a, const std::vector<double>& mu_list,
                                 const ModelParams& params, const ProbeOptions& opts = {});

/// Error bounds on the effective dynamics:
///   Massless    C (v / sqrt(mu) + |t| v^2 / sqrt(mu)), m = 0, v = ||V||_{1,mu}
///   Polynomial  Massless plus |t| (P0 / mu)^(N + 2) for the degree-N generator
///   Massive     the order-n bound for m >= 1 / mu, n odd
///   Window      C sqrt(log mu / mu)(1 + |t|) at a = 1/2, else C mu^(a-1) (1 + |t|)
enum class Bound { Massless, Polynomial, Massive, Window };

Bound parse_bound(const std::string& name);
std::string to_string(Bound b);

/// The printed right-hand side of each error bound with the constant C as
/// input. `order` is N for Polynomial (PolyGenerator::kInfinite allowed), n
/// (odd) for Massive, and ignored otherwise. p0 is the momentum cut P0.
double bound_rhs(Bound b, double t, int order, double C, const ModelParams& params,
                 double p0 = 0.0);

}  // namespace radcorr
