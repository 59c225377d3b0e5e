#include "radcorr/fock.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "radcorr/errors.hpp"
#include "radcorr/parallel.hpp"

namespace radcorr {

namespace {

constexpr const char* kModule = "fock_oracle";
constexpr int kMaxBosons = 3;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double norm3(const Vec3& k) { return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }

double dot(const FockVector& a, const FockVector& b, std::complex<double>* out = nullptr) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  if (out) *out = s;
  return s.real();
}

double norm(const FockVector& a) {
  double s = 0.0;
  for (const auto& c : a) s += std::norm(c);
  return std::sqrt(s);
}

// y += a x for real a.
void axpy(double a, const FockVector& x, FockVector& y) {
  const double* xp = reinterpret_cast<const double*>(x.data());
  double* yp = reinterpret_cast<double*>(y.data());
  for (std::size_t r = 0; r < 2 * x.size(); ++r) yp[r] += a * xp[r];
}

// Row block for the fused Gram-Schmidt kernels; keeps a slice of w in cache.
constexpr std::size_t kBlock = 2048;

// w -= V[0..count) V^H w in one classical Gram-Schmidt sweep. Complex values
// are handled as interleaved doubles so the loops vectorize. Returns the
// projections in h.
void project_out(const std::vector<FockVector>& V, int count, FockVector& w,
                 std::vector<std::complex<double>>& h) {
  const std::size_t n = w.size();
  std::vector<double> re(count, 0.0), im(count, 0.0);
  double* wp = reinterpret_cast<double*>(w.data());
  for (std::size_t lo = 0; lo < n; lo += kBlock) {
    const std::size_t hi = std::min(n, lo + kBlock);
    for (int i = 0; i < count; ++i) {
      const double* vp = reinterpret_cast<const double*>(V[i].data());
      double sr = 0.0, si = 0.0;
      for (std::size_t r = 2 * lo; r < 2 * hi; r += 2) {
        sr += vp[r] * wp[r] + vp[r + 1] * wp[r + 1];
        si += vp[r] * wp[r + 1] - vp[r + 1] * wp[r];
      }
      re[i] += sr;
      im[i] += si;
    }
  }
  h.resize(count);
  for (int i = 0; i < count; ++i) h[i] = {re[i], im[i]};
  for (std::size_t lo = 0; lo < n; lo += kBlock) {
    const std::size_t hi = std::min(n, lo + kBlock);
    for (int i = 0; i < count; ++i) {
      const double* vp = reinterpret_cast<const double*>(V[i].data());
      const double hr = re[i], hi_ = im[i];
      for (std::size_t r = 2 * lo; r < 2 * hi; r += 2) {
        wp[r] -= hr * vp[r] - hi_ * vp[r + 1];
        wp[r + 1] -= hr * vp[r + 1] + hi_ * vp[r];
      }
    }
  }
}

// out = sum_i c[i] V[i].
void combine(const std::vector<FockVector>& V, const std::vector<std::complex<double>>& c,
             FockVector& out) {
  const std::size_t n = out.size();
  double* op = reinterpret_cast<double*>(out.data());
  std::fill(op, op + 2 * n, 0.0);
  for (std::size_t lo = 0; lo < n; lo += kBlock) {
    const std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double* vp = reinterpret_cast<const double*>(V[i].data());
      const double cr = c[i].real(), ci = c[i].imag();
      for (std::size_t r = 2 * lo; r < 2 * hi; r += 2) {
        op[r] += cr * vp[r] - ci * vp[r + 1];
        op[r + 1] += cr * vp[r + 1] + ci * vp[r];
      }
    }
  }
}

// Coupled modes of the lattice: those with V(k) != 0.
struct ModeTable {
  std::vector<int> lattice_index;
  std::vector<double> coupling;  // mu^{1/2} V(k) w^{1/2}
  std::vector<double> diag;      // mu omega(k)
  std::vector<Vec3> k;
};

ModeTable coupled_modes(const MomentumLattice& lattice, const ModelParams& params) {
  ModeTable t;
  const double root_w = std::sqrt(lattice.weight);
  for (std::size_t j = 0; j < lattice.modes.size(); ++j) {
    const double rho = norm3(lattice.modes[j]);
    const double v = params.form_factor.value(rho, params.mass());
    if (!std::isfinite(v)) {
      fail(ErrorKind::Domain, kModule, "form factor is not finite at lattice mode |k| = " + fmt(rho));
    }
    if (v == 0.0) continue;
    t.lattice_index.push_back(static_cast<int>(j));
    t.coupling.push_back(std::sqrt(params.mu) * v * root_w);
    t.diag.push_back(params.mu * params.omega(rho));
    t.k.push_back(lattice.modes[j]);
  }
  return t;
}

}  // namespace

MomentumLattice MomentumLattice::cubic(double spacing, double k_max, bool keep_origin) {
  if (!(spacing > 0.0) || !(k_max >= spacing)) {
    fail(ErrorKind::Domain, kModule, "lattice needs spacing > 0 and k_max >= spacing");
  }
  MomentumLattice lat;
  lat.spacing = spacing;
  lat.k_max = k_max;
  lat.weight = spacing * spacing * spacing;
  const int n = static_cast<int>(std::floor(k_max / spacing + 1e-9));
  const double r2 = (k_max / spacing) * (k_max / spacing) * (1.0 + 1e-12);
  for (int a = -n; a <= n; ++a) {
    for (int b = -n; b <= n; ++b) {
      for (int c = -n; c <= n; ++c) {
        const double q = double(a) * a + double(b) * b + double(c) * c;
        if (q > r2) continue;
        if (q == 0.0 && !keep_origin) continue;
        lat.modes.push_back({a * spacing, b * spacing, c * spacing});
      }
    }
  }
  return lat;
}

MomentumLattice MomentumLattice::from_modes(std::vector<Vec3> modes, double weight) {
  if (!(weight > 0.0)) fail(ErrorKind::Domain, kModule, "lattice weight must be > 0");
  MomentumLattice lat;
  lat.weight = weight;
  lat.spacing = std::cbrt(weight);
  for (const auto& k : modes) lat.k_max = std::max(lat.k_max, norm3(k));
  lat.modes = std::move(modes);
  return lat;
}

std::uint64_t FockBasis::multiset_count(std::size_t modes, int n) {
  if (n == 0) return 1;
  if (modes == 0) return 0;
  // C(modes + n - 1, n)
  std::uint64_t c = 1;
  for (int i = 1; i <= n; ++i) c = c * (modes + static_cast<std::uint64_t>(i) - 1) / i;
  return c;
}

FockBasis::FockBasis(std::size_t modes, int n_max) : modes_(modes), n_max_(n_max) {
  if (n_max < 0 || n_max > kMaxBosons) {
    fail(ErrorKind::Domain, kModule, "boson cutoff n_max must be in 0..3");
  }
  offsets_.push_back(0);
  for (int n = 0; n <= n_max; ++n) offsets_.push_back(offsets_.back() + multiset_count(modes, n));
  binom_.assign(kMaxBosons + 1, std::vector<std::uint64_t>(modes + kMaxBosons + 1, 0));
  for (std::size_t c = 0; c < binom_[0].size(); ++c) {
    binom_[0][c] = 1;
    binom_[1][c] = c;
    binom_[2][c] = c < 2 ? 0 : c * (c - 1) / 2;
    binom_[3][c] = c < 3 ? 0 : c * (c - 1) * (c - 2) / 6;
  }
  states_.assign(dimension(), {-1, -1, -1});
  const int m = static_cast<int>(modes);
  std::vector<int> s;
  for (int n = 0; n <= n_max; ++n) {
    // Enumerate non-decreasing n-tuples.
    std::function<void(int)> rec = [&](int start) {
      if (static_cast<int>(s.size()) == n) {
        auto& slot = states_[index(s)];
        for (int i = 0; i < n; ++i) slot[i] = s[i];
        return;
      }
      for (int j = start; j < m; ++j) {
        s.push_back(j);
        rec(j);
        s.pop_back();
      }
    };
    rec(0);
  }
}

std::size_t FockBasis::index(const std::vector<int>& sorted_modes) const {
  const int n = static_cast<int>(sorted_modes.size());
  if (n > n_max_) fail(ErrorKind::Domain, kModule, "state exceeds the boson cutoff");
  std::size_t r = 0;
  for (int k = 0; k < n; ++k) r += binom_[k + 1][sorted_modes[k] + k];
  return offsets_[n] + r;
}

int FockBasis::sector_of(std::size_t idx) const {
  for (int n = 0; n <= n_max_; ++n) {
    if (idx < offsets_[n + 1]) return n;
  }
  fail(ErrorKind::Domain, kModule, "basis index out of range");
}

std::vector<int> FockBasis::state(std::size_t idx) const {
  const int n = sector_of(idx);
  return {states_[idx].begin(), states_[idx].begin() + n};
}

void CsrMatrix::multiply(const FockVector& x, FockVector& y, unsigned jobs) const {
  y.assign(rows, 0.0);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (rows + kBlock - 1) / kBlock;
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::size_t end = std::min(rows, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      std::complex<double> s = 0.0;
      for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) s += val[e] * x[col[e]];
      y[i] = s;
    }
  });
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
      const std::size_t j = col[e];
      const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[j]);
      const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[j + 1]);
      const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(i));
      const double mirror = (it != last && *it == i) ? val[static_cast<std::size_t>(it - col.begin())] : 0.0;
      worst = std::max(worst, std::abs(val[e] - mirror));
    }
  }
  return worst;
}

double CsrMatrix::gershgorin_bound() const {
  double r = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) s += std::abs(val[e]);
    r = std::max(r, s);
  }
  return r;
}

FiberHamiltonian build_fiber_hamiltonian(const FiberSpec& spec) {
  const auto& params = spec.params;
  if (spec.n_max < 0 || spec.n_max > kMaxBosons) {
    fail(ErrorKind::Domain, kModule, "boson cutoff n_max must be in 0..3");
  }
  const ModeTable modes = coupled_modes(spec.lattice, params);
  const std::size_t m = modes.coupling.size();
  std::uint64_t dim = 0;
  for (int n = 0; n <= spec.n_max; ++n) dim += FockBasis::multiset_count(m, n);
  if (dim > spec.max_dimension || dim > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::Resource, kModule,
         "fiber dimension " + std::to_string(dim) + " exceeds the budget " +
             std::to_string(spec.max_dimension) + " (" + std::to_string(m) +
             " coupled modes, n_max = " + std::to_string(spec.n_max) + ")");
  }

  FiberHamiltonian out{FockBasis(m, spec.n_max), {}, modes.lattice_index};
  const FockBasis& basis = out.basis;
  CsrMatrix& H = out.H;
  H.rows = basis.dimension();
  H.row_ptr.reserve(H.rows + 1);
  H.row_ptr.push_back(0);

  const Vec3& P = spec.p_total;
  std::vector<std::pair<std::uint32_t, double>> row;
  std::vector<int> s;
  std::vector<int> t;
  for (std::size_t i = 0; i < H.rows; ++i) {
    s = basis.state(i);
    const int n = static_cast<int>(s.size());
    row.clear();

    Vec3 pf{0.0, 0.0, 0.0};
    double field = 0.0;
    for (int j : s) {
      for (int c = 0; c < 3; ++c) pf[c] += modes.k[j][c];
      field += modes.diag[j];
    }
    double kinetic = 0.0;
    for (int c = 0; c < 3; ++c) kinetic += (P[c] - pf[c]) * (P[c] - pf[c]);
    row.emplace_back(static_cast<std::uint32_t>(i), kinetic + field);

    // a_j: remove one boson of each occupied mode; the amplitude is sqrt of
    // the occupation before removal.
    for (int q = 0; q < n; ++q) {
      if (q > 0 && s[q] == s[q - 1]) continue;
      const int j = s[q];
      const auto count = std::count(s.begin(), s.end(), j);
      t = s;
      t.erase(t.begin() + q);
      row.emplace_back(static_cast<std::uint32_t>(basis.index(t)),
                       modes.coupling[j] * std::sqrt(static_cast<double>(count)));
    }
    // a*_j: add one boson; sqrt of the occupation after adding.
    if (n < spec.n_max) {
      for (std::size_t j = 0; j < m; ++j) {
        t = s;
        t.insert(std::upper_bound(t.begin(), t.end(), static_cast<int>(j)), static_cast<int>(j));
        const auto count = std::count(t.begin(), t.end(), static_cast<int>(j));
        row.emplace_back(static_cast<std::uint32_t>(basis.index(t)),
                         modes.coupling[j] * std::sqrt(static_cast<double>(count)));
      }
    }
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      H.col.push_back(c);
      H.val.push_back(v);
    }
    H.row_ptr.push_back(H.col.size());
  }
  return out;
}

double solve_g_lattice(const Vec3& p_total, const MomentumLattice& lattice, const ModelParams& params,
                       double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::Domain, kModule, "lattice fixed point needs tol > 0");
  if (norm3(p_total) >= 0.5 * params.mu) return 0.0;
  const ModeTable modes = coupled_modes(lattice, params);
  std::vector<double> num;
  std::vector<double> den;
  for (std::size_t j = 0; j < modes.coupling.size(); ++j) {
    const Vec3& k = modes.k[j];
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const double pk = p_total[0] * k[0] + p_total[1] * k[1] + p_total[2] * k[2];
    const double d = modes.diag[j] + k2 - 2.0 * pk;
    if (!(d > 0.0)) fail(ErrorKind::Resonance, kModule, "lattice denominator vanishes at mode " + std::to_string(j));
    num.push_back(modes.coupling[j] * modes.coupling[j]);
    den.push_back(d);
  }
  // coupling^2 = mu V^2 w, so each term is w mu V^2 / (d + x).
  auto S = [&](double x) {
    double s = 0.0;
    for (std::size_t j = 0; j < num.size(); ++j) s += num[j] / (den[j] + x);
    return s;
  };
  const double s0 = S(0.0);
  if (s0 == 0.0) return 0.0;
  auto G = [&](double x) { return x - S(x); };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(G, 0.0, s0, -s0, G(s0),
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
  const double x = 0.5 * (a + b);
  if (!(std::abs(G(x)) <= tol * std::max(1.0, x))) {
    throw AccuracyError(kModule, "lattice fixed point residual " + fmt(std::abs(G(x))), x, std::abs(G(x)));
  }
  return x;
}

FockVector krylov_propagate(const CsrMatrix& H, const FockVector& psi0, double t,
                            const KrylovOptions& opts, KrylovStats* stats) {
  if (psi0.size() != H.rows) fail(ErrorKind::Domain, kModule, "state and Hamiltonian sizes differ");
  if (!(opts.tol > 0.0) || opts.subspace < 2) {
    fail(ErrorKind::Domain, kModule, "Krylov propagation needs tol > 0 and subspace >= 2");
  }
  FockVector psi = psi0;
  if (t == 0.0 || H.rows == 0) return psi;
  const double sign = t > 0.0 ? 1.0 : -1.0;
  const double total = std::abs(t);
  const double anorm = std::max(1.0, H.gershgorin_bound());
  const int m_max = static_cast<int>(std::min<std::size_t>(opts.subspace, H.rows));

  std::vector<FockVector> V(m_max + 1);
  FockVector w;
  std::vector<std::complex<double>> proj, weights;
  double done = 0.0;
  double tau_guess = std::min(total, 4.0 * m_max / anorm);
  KrylovStats local;

  while (done < total) {
    const double beta = norm(psi);
    if (beta == 0.0) break;
    V[0] = psi;
    for (auto& c : V[0]) c /= beta;
    std::vector<double> alpha;
    std::vector<double> offdiag;
    double b_last = 0.0;
    bool exact = false;
    int k = 0;
    for (int j = 0; j < m_max; ++j) {
      H.multiply(V[j], w, opts.jobs);
      ++local.matvecs;
      // Three-term recurrence, then one full reorthogonalization sweep; a
      // second sweep only when the first cancelled most of what was left.
      const double a_j = dot(V[j], w);
      axpy(-a_j, V[j], w);
      if (j > 0) axpy(-offdiag[j - 1], V[j - 1], w);
      const double before = norm(w);
      project_out(V, j + 1, w, proj);
      alpha.push_back(a_j + proj[j].real());
      k = j + 1;
      b_last = norm(w);
      if (b_last < 0.7 * before) {
        project_out(V, j + 1, w, proj);
        alpha.back() += proj[j].real();
        b_last = norm(w);
      }
      if (b_last <= 1e-14 * anorm) {
        exact = true;
        break;
      }
      if (j + 1 < m_max) {
        offdiag.push_back(b_last);
        V[j + 1] = w;
        for (auto& c : V[j + 1]) c /= b_last;
      }
    }
    if (k == static_cast<int>(H.rows)) exact = true;

    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(offdiag.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& Q = eig.eigenvectors();
    const Eigen::VectorXd& lam = eig.eigenvalues();
    auto coeffs = [&](double tau) {
      Eigen::VectorXcd c(k);
      for (int i = 0; i < k; ++i) c[i] = std::polar(1.0, -sign * tau * lam[i]) * Q(0, i);
      return Eigen::VectorXcd(Q.cast<std::complex<double>>() * c);
    };

    // Largest step whose a-posteriori error estimate meets the tolerance: the
    // estimate costs O(k^2), so it is searched by doubling and bisection.
    const auto estimate = [&](double tau) { return beta * b_last * std::abs(coeffs(tau)[k - 1]); };
    const double remaining = total - done;
    double tau = remaining;
    if (!exact) {
      double good = 0.0;
      double bad = 0.0;
      for (double trial = std::min(remaining, tau_guess);;) {
        if (estimate(trial) <= opts.tol) {
          good = trial;
          if (trial >= remaining) break;
          trial = std::min(remaining, 2.0 * trial);
        } else {
          bad = trial;
          if (good > 0.0) break;
          trial *= 0.5;
          if (trial < 1e-13 * total) {
            throw AccuracyError(kModule, "Krylov step size collapsed; raise the subspace size", done,
                                remaining);
          }
        }
      }
      for (int it = 0; it < 30 && bad > 0.0 && good < remaining && bad - good > 1e-3 * good; ++it) {
        const double mid = 0.5 * (good + bad);
        (estimate(mid) <= opts.tol ? good : bad) = mid;
      }
      tau = good;
    }
    const Eigen::VectorXcd c = coeffs(tau);
    weights.resize(k);
    for (int i = 0; i < k; ++i) weights[i] = beta * c[i];
    combine(V, weights, psi);
    done = (remaining - tau <= 1e-15 * total) ? total : done + tau;
    tau_guess = tau;
    ++local.steps;
  }
  if (stats) *stats = local;
  return psi;
}

std::vector<FiberRun> fiber_errors(const FiberSpec& spec, const std::vector<double>& t_grid,
                                   const KrylovOptions& opts, const double* force_g) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0) || (i > 0 && t_grid[i] < t_grid[i - 1])) {
      fail(ErrorKind::Domain, kModule, "time grid must be non-negative and increasing");
    }
  }
  const auto fh = build_fiber_hamiltonian(spec);
  const double g = force_g ? *force_g
                           : solve_g_lattice(spec.p_total, spec.lattice, spec.params,
                                             spec.params.tol.fixed_point);
  const Vec3& P = spec.p_total;
  const double p2 = P[0] * P[0] + P[1] * P[1] + P[2] * P[2];
  const double h = p2 - g;

  FockVector psi(fh.H.rows, 0.0);
  psi[0] = 1.0;
  FockVector w;
  fh.H.multiply(psi, w, opts.jobs);
  const double e0 = w[0].real();
  const double scale = std::max({std::abs(e0), norm(w), 1e-300});

  std::vector<FiberRun> out;
  double t_prev = 0.0;
  for (double t : t_grid) {
    psi = krylov_propagate(fh.H, psi, t - t_prev, opts);
    t_prev = t;
    FiberRun run;
    run.t = t;
    run.g_lat = g;
    run.dimension = fh.H.rows;
    double excited = 0.0;
    for (std::size_t i = 1; i < psi.size(); ++i) excited += std::norm(psi[i]);
    const std::complex<double> free = std::polar(1.0, -t * h);
    run.error = std::min(2.0, std::sqrt(std::norm(psi[0] - free) + excited));
    run.vacuum_pop = std::norm(psi[0]);
    run.norm_error = std::abs(std::sqrt(run.vacuum_pop + excited) - 1.0);
    fh.H.multiply(psi, w, opts.jobs);
    run.energy_drift = std::abs(dot(psi, w) - e0) / scale;
    out.push_back(run);
  }
  return out;
}

FiberRun fiber_error(const FiberSpec& spec, double t, const KrylovOptions& opts) {
  return fiber_errors(spec, {t}, opts).front();
}

double combine_fibers(const std::vector<double>& weights, const std::vector<double>& errors) {
  if (weights.size() != errors.size()) fail(ErrorKind::Domain, kModule, "weights and errors differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * errors[i] * errors[i];
  return std::sqrt(s);
}

ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorKind::Domain, kModule, "fit needs matching x and y");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] < 1e-12 || !(x[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 3) {
    fail(ErrorKind::Domain, kModule,
         "insufficient data: " + std::to_string(lx.size()) + " points above the 1e-12 noise floor");
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double r = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - fit.intercept - fit.exponent * lx[i];
    r += e * e;
  }
  fit.residual = std::sqrt(r / n);
  fit.points = lx.size();
  return fit;
}

SweepResult sweep_mu(const FiberSpec& base, const std::vector<double>& mu_list,
                     const std::function<double(double)>& t_rule, const KrylovOptions& opts) {
  if (mu_list.size() < 4) fail(ErrorKind::Domain, kModule, "sweep needs at least 4 mu values");
  const auto [lo, hi] = std::minmax_element(mu_list.begin(), mu_list.end());
  if (!(*lo > 0.0) || *hi < 10.0 * *lo) fail(ErrorKind::Domain, kModule, "sweep mu values must span a decade");
  SweepResult out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double mu : mu_list) {
    FiberSpec spec = base;
    spec.params.mu = mu;
    SweepRow row{mu, fiber_error(spec, t_rule(mu), opts)};
    xs.push_back(mu);
    ys.push_back(row.run.error);
    out.rows.push_back(row);
  }
  out.fit = fit_loglog(xs, ys);
  return out;
}

}  // namespace radcorr
