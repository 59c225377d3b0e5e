#include "radcorr/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <new>
#include <numbers>
#include <sstream>

#include "radcorr/config.hpp"
#include "radcorr/csv.hpp"
#include "radcorr/dynamics.hpp"
#include "radcorr/errors.hpp"
#include "radcorr/fock.hpp"
#include "radcorr/generator.hpp"
#include "radcorr/higher_order.hpp"
#include "radcorr/parallel.hpp"

namespace radcorr {

namespace {
constexpr const char* kModule = "cli";

struct Context {
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
};

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Resource, kModule, "cannot open " + path + " for writing");
  f << text;
  if (!f) fail(ErrorKind::Resource, kModule, "write to " + path + " failed");
}

void emit(const Table& table, Context& ctx) {
  std::ostringstream buffer;
  write_csv(buffer, table);
  write_text(buffer.str(), ctx.cfg.out, ctx.out);
}

double table_range(const RunConfig& c) { return c.p_max > 0.0 ? c.p_max : c.epsilon * c.mu; }

FiberSpec fiber_spec(const RunConfig& c) {
  FiberSpec s;
  s.p_total = {0.0, 0.0, c.ptotal};
  s.lattice = MomentumLattice::cubic(c.h, c.kmax, c.mass > 0.0);
  s.n_max = c.nmax;
  s.params = c.params();
  s.max_dimension = c.max_dimension;
  return s;
}

KrylovOptions krylov_options(const RunConfig& c) {
  KrylovOptions o;
  o.tol = c.tol.krylov;
  o.subspace = c.subspace;
  o.jobs = resolve_jobs(c.jobs);
  return o;
}

void cmd_norms(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelParams p = c.params();
  require_valid(p);
  Table t{{"mu", "norm0", "norm_half", "norm1", "inverse_k_sq"}, {}};
  t.rows.push_back({p.mu, mu_norm(p.form_factor, 0.0, p.mu, p.mass(), c.tol.quad_rel),
                    mu_norm(p.form_factor, 0.5, p.mu, p.mass(), c.tol.quad_rel),
                    mu_norm(p.form_factor, 1.0, p.mu, p.mass(), c.tol.quad_rel),
                    inverse_k_norm_sq(p.form_factor, p.mass(), c.tol.quad_rel)});
  emit(t, ctx);
}

void cmd_solve_g(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelParams p = c.params();
  require_valid(p);
  const auto table = GeneratorTable::build(p, c.nodes, table_range(c), c.tol.fixed_point, c.jobs);
  Table t{{"p", "g"}, {}};
  for (std::size_t i = 0; i < table.p_samples().size(); ++i) {
    t.rows.push_back({table.p_samples()[i], table.g_values()[i]});
  }
  emit(t, ctx);
}

void cmd_gn(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelParams p = c.params();
  require_valid(p);
  const auto table = GeneratorTable::build(p, c.nodes, table_range(c), c.tol.fixed_point, c.jobs);
  const auto& nodes = table.p_samples();
  std::vector<GnResult> g3(nodes.size());
  quad::McConfig mc;
  mc.samples = c.mc_samples;
  mc.seed = c.seed;
  mc.stratify = c.mc_stratify;
  parallel_for(nodes.size(), c.jobs, [&](std::size_t i) {
    g3[i] = solve_gn(3, nodes[i], p, c.tol.fixed_point, mc, c.mc_seeds);
  });
  Table t{{"p", "g1", "g3", "mc_err"}, {}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    t.rows.push_back({nodes[i], table.g_values()[i], g3[i].g, g3[i].mc_error});
  }
  emit(t, ctx);
}

void cmd_coeffs(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelParams p = c.params();
  require_valid(p);
  if (c.order < 0 || c.order % 2 != 0) fail(ErrorKind::Usage, kModule, "--N must be even and >= 0");
  const double g0 = solve_g(0.0, p, c.tol.fixed_point);
  Table t{{"j", "alpha", "mu_pow_j_alpha"}, {}};
  for (int j = 0; j <= c.order; j += 2) {
    const double alpha = alpha_coeff(j, g0, p);
    t.rows.push_back({static_cast<double>(j), alpha, std::pow(p.mu, j) * alpha});
  }
  emit(t, ctx);
}

void cmd_region(Context& ctx, bool polyline) {
  const auto& c = ctx.cfg;
  if (polyline) {
    Table t{{"a", "b"}, {}};
    for (const auto& [a, b] : region_polyline(c.order)) t.rows.push_back({a, b});
    emit(t, ctx);
    return;
  }
  const RegionVerdict v = region_verdict(c.a, c.b, c.order);
  write_text(std::string(v.inside ? "inside" : "outside") + " binding=\"" + v.binding +
                 "\" limit=" + format_double(v.limit) + "\n",
             c.out, ctx.out);
}

void cmd_propagate(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelParams p = c.params();
  require_valid(p);
  const WavePacket phi = WavePacket::bump(c.p_lo, c.p_hi, c.nodes);
  require_effective_window(phi, p);
  const auto table = GeneratorTable::build(p, c.nodes, c.p_hi, c.tol.fixed_point, c.jobs);
  const PolyGenerator poly(c.order, table(0.0), p);
  const GeneratorFn exact = as_generator(table);
  const GeneratorFn approx = as_generator(poly);
  Table t{{"t", "distance", "bound"}, {}};
  for (double time : c.t_grid) {
    t.rows.push_back({time, generator_distance(phi, time, exact, approx),
                      bound_rhs(Bound::Polynomial, time, c.order, c.bound_c, p, c.p_hi)});
  }
  emit(t, ctx);
}

void cmd_probe(Context& ctx) {
  const auto& c = ctx.cfg;
  ProbeOptions o;
  o.tau = c.tau;
  o.time_exponent = c.b;
  o.nodes = c.nodes;
  o.tol = c.tol.fixed_point;
  o.jobs = c.jobs;
  const ProbeResult r = nonconvergence_probe(c.order, c.a, c.probe_mu, c.params(), o);
  Table t{{"mu", "t", "distance", "lower_proxy"}, {}};
  for (const auto& row : r.rows) t.rows.push_back({row.mu, row.t, row.distance, row.lower_proxy});
  emit(t, ctx);
  ctx.err << "probe: tau=" << format_double(r.tau) << " b=" << format_double(r.b) << '\n';
}

Table fiber_table() { return Table{{"mu", "t", "error", "vacuum_pop", "energy_drift"}, {}}; }

void cmd_oracle(Context& ctx) {
  const auto& c = ctx.cfg;
  const FiberSpec spec = fiber_spec(c);
  Table t = fiber_table();
  for (const auto& run : fiber_errors(spec, c.oracle_t, krylov_options(c))) {
    t.rows.push_back({c.mu, run.t, run.error, run.vacuum_pop, run.energy_drift});
  }
  emit(t, ctx);
}

void cmd_sweep(Context& ctx) {
  const auto& c = ctx.cfg;
  const double t_fixed = c.sweep_t;
  const SweepResult r =
      sweep_mu(fiber_spec(c), c.sweep_mu, [t_fixed](double) { return t_fixed; }, krylov_options(c));
  Table t = fiber_table();
  for (const auto& row : r.rows) {
    t.rows.push_back({row.mu, row.run.t, row.run.error, row.run.vacuum_pop, row.run.energy_drift});
  }
  emit(t, ctx);
  ctx.err << "sweep: exponent=" << format_double(r.fit.exponent)
          << " rms_log_residual=" << format_double(r.fit.residual) << '\n';
}

// Quick invariant suite on the configured model; each check is independent.
int cmd_selfcheck(Context& ctx) {
  const auto& c = ctx.cfg;
  std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"nelson_mu_norm_closed_form",
       [] {
         const double mu = 100.0;
         const double n = mu_norm(FormFactor::nelson(1.0), 1.0, mu, 0.0);
         const double exact = 4.0 * std::numbers::pi * (std::log(mu + 1.0) - mu / (mu + 1.0));
         return std::abs(n * n / exact - 1.0) < 1e-6;
       }},
      {"fixed_point_residual_and_bracket",
       [&] {
         ModelParams p = c.params();
         if (!p.massless()) return true;
         const FixedPoint fp = solve_g_detailed(0.0, p, c.tol.fixed_point);
         return fp.residual <= 1e-9 && g_bounds(p).contains(fp.g);
       }},
      {"catalan_counts",
       [] {
         const std::size_t catalan[] = {1, 1, 2, 5, 14};
         for (int m = 1; m <= 5; ++m) {
           if (enumerate_sigma0(2 * m).size() != catalan[m - 1]) return false;
         }
         return true;
       }},
      {"wick_pairings_nonempty",
       [] {
         for (const auto& s : enumerate_sigma0(6)) {
           if (wick_pairings(s).empty()) return false;
         }
         return true;
       }},
      {"propagate_unitary",
       [&] {
         const double hi = 0.5 * c.epsilon * c.mu;
         const WavePacket phi = WavePacket::bump(0.25 * hi, hi, 32);
         const WavePacket psi = propagate(phi, 3.0, [](double q) { return 0.1 * q; });
         return std::abs(psi.norm() - 1.0) < 1e-14;
       }},
      {"region_example", [] { return !region_member(0.95, 0.3, 2); }},
      {"fiber_hamiltonian_symmetric_and_unitary",
       [] {
         FiberSpec s;
         s.lattice = MomentumLattice::cubic(0.5, 1.0, false);
         s.n_max = 2;
         s.params.mu = 16.0;
         const FiberHamiltonian fh = build_fiber_hamiltonian(s);
         if (fh.H.asymmetry() != 0.0) return false;
         const FiberRun r = fiber_error(s, 0.5);
         return r.norm_error <= 1e-10 && r.energy_drift <= 1e-8;
       }},
      {"csv_round_trip",
       [] {
         const Table t{{"x"}, {{0.1}, {1.0 / 3.0}, {6.02214076e23}}};
         std::ostringstream os;
         write_csv(os, t);
         std::istringstream is(os.str());
         return parse_csv(is).rows == t.rows;
       }},
  };
  std::size_t passed = 0;
  std::ostringstream report;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const Error& e) {
      report << "# " << name << ": " << e.line() << '\n';
    }
    passed += ok;
    report << (ok ? "PASS " : "FAIL ") << name << '\n';
  }
  report << "selfcheck: " << passed << "/" << checks.size() << " passed\n";
  write_text(report.str(), c.out, ctx.out);
  return passed == checks.size() ? 0 : exit_code(ErrorKind::Accuracy);
}

// Value of --config, if present, so that flags parsed afterwards override it.
std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::string config_path = find_config(args);
  Context ctx{config_path.empty() ? RunConfig{} : load_config(config_path), out, err};
  RunConfig& c = ctx.cfg;

  CLI::App app{"Effective dispersion generators of a tracer coupled to a Bose field, and a "
               "truncated-Fock-space check of the effective dynamics.",
               "radcorr"};
  app.set_help_flag("--help", "print this help and exit");
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_unused, save_path;
  app.add_option("--config", config_unused, "INI file; flags given on the command line take precedence");
  app.add_option("--save-config", save_path, "write the effective configuration to this file");
  app.add_option("--seed", c.seed, "seed for every random stream")->capture_default_str();
  app.add_option("--jobs", c.jobs, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out", c.out, "output path, '-' for stdout")->capture_default_str();
  app.add_option("--mu", c.mu, "coupling scale mu")->capture_default_str();
  app.add_option("--mass", c.mass, "boson mass m")->capture_default_str();
  app.add_option("--epsilon", c.epsilon, "momentum window |p| <= epsilon mu, epsilon < 1/2")
      ->capture_default_str();
  app.add_option("--form-factor", c.ff_kind, "nelson | powerlaw | tabulated")->capture_default_str();
  app.add_option("--lambda", c.ff_lambda, "ultraviolet cutoff of the form factor")->capture_default_str();
  app.add_option("--ff-a", c.ff_a, "exponent of the power-law form factor")->capture_default_str();
  app.add_option("--table", c.ff_table, "CSV file rho,V for the tabulated form factor");

  auto* norms = app.add_subcommand("norms", "mu-norms ||(omega + 1/mu)^-s V|| for s = 0, 1/2, 1 and ||V/|k|^(1/2)||^2");

  auto* solve = app.add_subcommand("solve-g", "self-consistent g(p) on Chebyshev-Lobatto nodes; CSV p,g");
  solve->add_option("--grid", c.nodes, "number of radial nodes")->capture_default_str();
  solve->add_option("--p-max", c.p_max, "table range (0 = epsilon mu)")->capture_default_str();

  auto* gn = app.add_subcommand("gn", "third-order generator by Monte Carlo; CSV p,g1,g3,mc_err");
  gn->add_option("--grid", c.nodes, "number of radial nodes")->capture_default_str();
  gn->add_option("--p-max", c.p_max, "table range (0 = epsilon mu)")->capture_default_str();
  gn->add_option("--samples", c.mc_samples, "samples per estimate")->capture_default_str();
  gn->add_option("--mc-seeds", c.mc_seeds, "independent streams averaged per estimate")->capture_default_str();

  auto* coeffs = app.add_subcommand("coeffs", "Taylor coefficients alpha_j, j = 0, 2, ..., N; CSV j,alpha,mu_pow_j_alpha");
  coeffs->add_option("--N", c.order, "even truncation order")->capture_default_str();

  bool polyline = false;
  auto* region = app.add_subcommand("region", "membership of (a, b) in the validity region I_N");
  region->add_option("--N", c.order, "polynomial order")->capture_default_str();
  region->add_option("--a", c.a, "momentum exponent")->capture_default_str();
  region->add_option("--b", c.b, "time exponent")->capture_default_str();
  region->add_flag("--polyline", polyline, "emit the boundary of I_N as CSV a,b");

  auto* prop = app.add_subcommand("propagate", "distance between exact and degree-N evolutions of a bump packet; CSV t,distance,bound");
  prop->add_option("--N", c.order, "polynomial order (-1 = untruncated)")->capture_default_str();
  prop->add_option("--p-lo", c.p_lo, "packet support lower edge")->capture_default_str();
  prop->add_option("--p-hi", c.p_hi, "packet support upper edge and momentum cut")->capture_default_str();
  prop->add_option("--t-grid", c.t_grid, "times")->delimiter(',');
  prop->add_option("--grid", c.nodes, "radial nodes")->capture_default_str();
  prop->add_option("--C", c.bound_c, "constant of the printed bound")->capture_default_str();

  auto* probe = app.add_subcommand("probe", "nonconvergence probe outside I_N; CSV mu,t,distance,lower_proxy");
  probe->add_option("--N", c.order, "polynomial order")->capture_default_str();
  probe->add_option("--a", c.a, "momentum exponent")->capture_default_str();
  probe->add_option("--tau", c.tau, "time prefactor (0 = fitted)")->capture_default_str();
  probe->add_option("--b", c.b, "time exponent (negative = (N+2)(1-a))")->capture_default_str();
  probe->add_option("--mu-list", c.probe_mu, "values of mu")->delimiter(',');
  probe->add_option("--grid", c.nodes, "radial nodes")->capture_default_str();

  const auto oracle_flags = [&](CLI::App* sub) {
    sub->add_option("--h", c.h, "lattice spacing")->capture_default_str();
    sub->add_option("--kmax", c.kmax, "momentum cutoff of the lattice")->capture_default_str();
    sub->add_option("--nmax", c.nmax, "maximal boson number")->capture_default_str();
    sub->add_option("--ptotal", c.ptotal, "total momentum along z")->capture_default_str();
    sub->add_option("--subspace", c.subspace, "Lanczos dimension")->capture_default_str();
    sub->add_option("--max-dimension", c.max_dimension, "refuse larger Fock bases")->capture_default_str();
  };
  auto* oracle = app.add_subcommand("oracle", "truncated-Fock fiber error against the effective phase; CSV mu,t,error,vacuum_pop,energy_drift");
  oracle_flags(oracle);
  oracle->add_option("--t-grid", c.oracle_t, "increasing times")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "fiber error over a mu list at fixed t, with a log-log fit on stderr");
  oracle_flags(sweep);
  sweep->add_option("--mu-list", c.sweep_mu, "values of mu")->delimiter(',');
  sweep->add_option("--t", c.sweep_t, "time")->capture_default_str();

  auto* selfcheck = app.add_subcommand("selfcheck", "fast invariant suite; exit 0 when every check passes");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // Subcommand help lands here with a zero exit code.
      std::ostringstream help_err;
      return app.exit(e, out, help_err);
    }
    std::string msg = e.what();
    for (char& ch : msg) if (ch == '\n') ch = ' ';
    fail(ErrorKind::Usage, kModule, msg);
  }

  if (!save_path.empty()) {
    std::ofstream f(save_path);
    if (!f) fail(ErrorKind::Resource, kModule, "cannot open " + save_path + " for writing");
    save_config(f, c);
  }

  if (*norms) cmd_norms(ctx);
  else if (*solve) cmd_solve_g(ctx);
  else if (*gn) cmd_gn(ctx);
  else if (*coeffs) cmd_coeffs(ctx);
  else if (*region) cmd_region(ctx, polyline);
  else if (*prop) cmd_propagate(ctx);
  else if (*probe) cmd_probe(ctx);
  else if (*oracle) cmd_oracle(ctx);
  else if (*sweep) cmd_sweep(ctx);
  else if (*selfcheck) return cmd_selfcheck(ctx);
  return 0;
}
}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const Error& e) {
    err << e.line() << '\n';
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    err << kModule << ": resource: out of memory\n";
    return exit_code(ErrorKind::Resource);
  } catch (const std::exception& e) {
    err << kModule << ": internal: " << e.what() << '\n';
    return exit_code(ErrorKind::Internal);
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace radcorr
