#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "radcorr/model.hpp"

namespace radcorr {

using Vec3 = std::array<double, 3>;

/// Modes k in h Z^3 with 0 < |k| <= K_max (the origin is kept only for a
/// massive field, where V(0) is finite). Each mode carries the cell volume h^3.
struct MomentumLattice {
  double spacing = 0.25;
  double k_max = 1.25;
  std::vector<Vec3> modes;
  double weight = 0.0;

  static MomentumLattice cubic(double spacing, double k_max, bool keep_origin);
  /// Arbitrary mode list with a common weight; used for hand-checked cases.
  static MomentumLattice from_modes(std::vector<Vec3> modes, double weight);
};

struct FiberSpec {
  Vec3 p_total{0.0, 0.0, 0.0};
  MomentumLattice lattice;
  int n_max = 2;
  ModelParams params;
  std::size_t max_dimension = 4'000'000;
};

/// Occupation basis over the modes with V(k) != 0. Modes with V = 0 never
/// leave the vacuum when the initial state is the vacuum, so they are
/// dropped. States of each sector are sorted mode-index multisets ranked in
/// colexicographic order.
class FockBasis {
 public:
  FockBasis(std::size_t modes, int n_max);

  std::size_t dimension() const { return offsets_.back(); }
  std::size_t modes() const { return modes_; }
  int n_max() const { return n_max_; }
  std::size_t sector_offset(int n) const { return offsets_[n]; }
  std::size_t sector_size(int n) const { return offsets_[n + 1] - offsets_[n]; }

  /// Index of a sorted multiset of mode indices.
  std::size_t index(const std::vector<int>& sorted_modes) const;
  /// Sorted multiset at `index`.
  std::vector<int> state(std::size_t index) const;
  int sector_of(std::size_t index) const;

  /// Number of sorted n-multisets of `modes` items.
  static std::uint64_t multiset_count(std::size_t modes, int n);

 private:
  std::size_t modes_;
  int n_max_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<std::uint64_t>> binom_;  // binom_[k][c] = C(c, k)
  std::vector<std::array<int, 3>> states_;
};

/// Real symmetric sparse matrix in compressed-row form.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  void multiply(const std::vector<std::complex<double>>& x, std::vector<std::complex<double>>& y,
                unsigned jobs = 1) const;
  /// Largest |H_ij - H_ji|; exactly 0 for an assembled fiber Hamiltonian.
  double asymmetry() const;
  /// Gershgorin bound on the spectral radius.
  double gershgorin_bound() const;
};

struct FiberHamiltonian {
  FockBasis basis;
  CsrMatrix H;
  std::vector<int> coupled_modes;  // lattice indices of the basis modes
};

/// H(P) = (P - P_f)^2 + mu sum_j omega(k_j) a*_j a_j
///      + mu^{1/2} sum_j V(k_j) h^{3/2} (a_j + a*_j)
/// on the boson-number-truncated occupation basis.
FiberHamiltonian build_fiber_hamiltonian(const FiberSpec& spec);

using FockVector = std::vector<std::complex<double>>;

/// Root of x = sum_j w mu V_j^2 / (mu omega_j + k_j^2 - 2 P.k_j + x); zero for
/// |P| >= mu / 2.
double solve_g_lattice(const Vec3& p_total, const MomentumLattice& lattice,
                       const ModelParams& params, double tol);

struct KrylovOptions {
  double tol = 1e-12;       // local error estimate per step
  int subspace = 32;        // maximal Lanczos dimension
  unsigned jobs = 1;
};

struct KrylovStats {
  int steps = 0;
  int matvecs = 0;
};

/// e^{-itH} psi by restarted Lanczos with adaptive sub-steps.
FockVector krylov_propagate(const CsrMatrix& H, const FockVector& psi0, double t,
                            const KrylovOptions& opts = {}, KrylovStats* stats = nullptr);

struct FiberRun {
  double t = 0.0;
  double error = 0.0;        // ||e^{-itH(P)} Omega - e^{-it h_glat(P)} Omega||
  double vacuum_pop = 0.0;   // |<Omega, e^{-itH(P)} Omega>|^2
  double energy_drift = 0.0; // |<H>_t - <H>_0| / max(|<H>_0|, ||H Omega||)
  double norm_error = 0.0;   // | ||psi(t)|| - 1 |
  double g_lat = 0.0;
  std::size_t dimension = 0;
};

/// Fiber errors on an increasing time grid, propagating from one grid point
/// to the next. `force_g` (if set) replaces the lattice fixed point.
std::vector<FiberRun> fiber_errors(const FiberSpec& spec, const std::vector<double>& t_grid,
                                   const KrylovOptions& opts = {},
                                   const double* force_g = nullptr);
FiberRun fiber_error(const FiberSpec& spec, double t, const KrylovOptions& opts = {});

/// Full-space error from fiber errors: (sum_i w_i |phi(P_i)|^2 e_i^2)^{1/2},
/// with `weights` already carrying w_i |phi(P_i)|^2.
double combine_fibers(const std::vector<double>& weights, const std::vector<double>& errors);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square log residual
  std::size_t points = 0;
};

/// Least-squares fit of log y = intercept + exponent log x. Points with
/// y < 1e-12 are dropped; fewer than 3 remaining is an error.
ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  double mu = 0.0;
  FiberRun run;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  ScalingFit fit;
};

/// fiber_error at t_rule(mu) for each mu (>= 4 values spanning >= 1 decade)
/// and the log-log fit of the error against mu.
SweepResult sweep_mu(const FiberSpec& base, const std::vector<double>& mu_list,
                     const std::function<double(double)>& t_rule, const KrylovOptions& opts = {});

}  // namespace radcorr
