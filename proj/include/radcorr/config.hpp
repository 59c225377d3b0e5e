#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "radcorr/model.hpp"

namespace radcorr {

/// Everything a CLI run needs. Each field has a default; the INI layout is
///
///   mu, mass, epsilon, seed, jobs, out            (top level)
///   [form_factor]  kind, lambda, a, table
///   [tolerances]   quad_rel, fixed_point, lemma_slack, krylov
///   [grid]         nodes, p_max
///   [mc]           samples, stratify, seeds
///   [dynamics]     N, a, tau, b, mu_list, p_lo, p_hi, t_grid, C
///   [oracle]       h, kmax, nmax, ptotal, t_grid, subspace, max_dimension
///   [sweep]        mu_list, t
///
/// Lists are comma separated. A tabulated form factor is read from the CSV
/// file `form_factor.table` with header `rho,V`.
struct RunConfig {
  double mu = 100.0;
  double mass = 0.0;
  double epsilon = 0.25;
  Tolerances tol{};
  std::string ff_kind = "nelson";
  double ff_lambda = 1.0;
  double ff_a = 0.25;
  std::string ff_table;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out = "-";

  std::size_t nodes = 64;
  double p_max = 0.0;  // 0 means epsilon * mu

  std::size_t mc_samples = 200000;
  bool mc_stratify = true;
  int mc_seeds = 3;

  int order = 2;
  double a = 23.0 / 24.0;
  double tau = 0.0;
  double b = -1.0;
  std::vector<double> probe_mu{1e3, 1e4, 1e5};
  double p_lo = 1.0;
  double p_hi = 10.0;
  std::vector<double> t_grid{0.5, 1.0, 2.0};
  double bound_c = 1.0;

  double h = 0.25;
  double kmax = 1.25;
  int nmax = 2;
  double ptotal = 0.0;
  std::vector<double> oracle_t{1.0};
  int subspace = 32;
  std::size_t max_dimension = 4'000'000;

  std::vector<double> sweep_mu{4, 8, 16, 32, 64};
  double sweep_t = 1.0;

  /// Model parameters; reads the table file for a tabulated form factor.
  ModelParams params() const;
};

/// Parses an INI stream. Unknown keys and malformed values are usage errors.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Writes every field, so parse_config(save_config(c)) reproduces c.
void save_config(std::ostream& os, const RunConfig& cfg);

/// Builds the form factor named by `kind` ("nelson", "powerlaw", "tabulated").
FormFactor make_form_factor(const std::string& kind, double lambda, double a,
                            const std::string& table_path);

}  // namespace radcorr
