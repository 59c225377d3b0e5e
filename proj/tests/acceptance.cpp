// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "radcorr/cli.hpp"
#include "radcorr/dynamics.hpp"
#include "radcorr/errors.hpp"
#include "radcorr/fock.hpp"
#include "radcorr/generator.hpp"
#include "radcorr/higher_order.hpp"
#include "radcorr/model.hpp"

using namespace radcorr;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Outcome {
  Verdict verdict;
  double seconds = 0.0;
  double limit = 0.0;  // 0: no runtime limit
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_loglog(x, y).exponent;
}

ModelParams nelson(double mu, double lambda = 1.0, double mass = 0.0) {
  ModelParams p;
  p.mu = mu;
  p.form_factor = FormFactor::nelson(lambda);
  p.dispersion.mass = mass;
  return p;
}

// Every Krylov run made by the suite, for the conservation criterion.
std::vector<FiberRun> g_fiber_runs;

FiberSpec oracle_spec(double mu, int n_max, double mass) {
  FiberSpec s;
  s.params = nelson(mu, 1.0, mass);
  s.lattice = MomentumLattice::cubic(0.25, 1.25, mass > 0.0);
  s.n_max = n_max;
  return s;
}

Verdict criterion1() {
  double worst = 0.0;
  for (double mu : {1.0, 10.0, 1e3, 1e6}) {
    const double v = mu_norm(FormFactor::nelson(1.0), 1.0, mu, 0.0);
    const double exact = 4.0 * std::numbers::pi * (std::log(mu + 1.0) - mu / (mu + 1.0));
    worst = std::max(worst, std::abs(v * v / exact - 1.0));
  }
  return {worst <= 1e-6, "max relative error " + fmt(worst) + " (tol 1e-6)"};
}

Verdict criterion2() {
  double worst_residual = 0.0;
  std::size_t outside = 0;
  for (double mu : {1e2, 1e4}) {
    const ModelParams p = nelson(mu);
    const auto table = GeneratorTable::build(p, 64, p.epsilon * mu, 1e-11);
    const Bracket br = g_bounds(p);
    for (std::size_t i = 0; i < table.p_samples().size(); ++i) {
      const double g = table.g_values()[i];
      worst_residual = std::max(worst_residual, std::abs(g - eval_F(table.p_samples()[i], g, p)));
      outside += !br.contains(g);
    }
  }
  return {worst_residual <= 1e-9 && outside == 0,
          "max residual " + fmt(worst_residual) + " (tol 1e-9), nodes outside bracket " +
              std::to_string(outside)};
}

// sup over 64 nodes of |g - g_eff|.
double sup_gap(const ModelParams& p) {
  const auto table = GeneratorTable::build(p, 64, p.epsilon * p.mu, 1e-12);
  const double g0 = table.g_values().front();
  double sup = 0.0;
  for (std::size_t i = 0; i < table.p_samples().size(); ++i) {
    sup = std::max(sup, std::abs(table.g_values()[i] - eval_g_eff(table.p_samples()[i], g0, p)));
  }
  return sup;
}

Verdict criterion3() {
  const std::vector<double> mus{1e2, 1e3, 1e4};
  std::vector<double> ratio, gaps;
  for (double mu : mus) {
    const ModelParams p = nelson(mu);
    const double n = mu_norm(p.form_factor, 1.0, mu, 0.0);
    ratio.push_back(sup_gap(p) * mu / (n * n));
    ModelParams q = p;
    q.form_factor = FormFactor::power_law(0.25, 1.0);
    gaps.push_back(sup_gap(q));
  }
  const double spread = *std::max_element(ratio.begin(), ratio.end()) /
                        *std::min_element(ratio.begin(), ratio.end());
  const double s = slope(mus, gaps);
  return {spread < 3.0 && s >= -1.2 && s <= -0.8,
          "Nelson ratio " + list(ratio) + " spread " + fmt(spread) + " (< 3); power-law slope " +
              fmt(s) + " (in [-1.2, -0.8])"};
}

Verdict criterion4() {
  const ModelParams p = nelson(1e5);
  const double g0 = solve_g(0.0, p, 1e-12);
  double worst = 0.0;
  std::vector<double> dev;
  for (int j : {0, 2, 4, 6}) {
    const double limit = std::pow(2.0, j) / (j + 1) * 4.0 * std::numbers::pi;
    const double d = std::abs(std::pow(p.mu, j) * alpha_coeff(j, g0, p) / limit - 1.0);
    dev.push_back(d);
    worst = std::max(worst, d);
  }
  return {worst < 0.05, "deviations " + list(dev) + " (tol 0.05)"};
}

// Wick pairings of a sign sequence by commuting each annihilator through the
// creators already applied to the vacuum.
std::set<std::vector<std::pair<int, int>>> brute_force_pairings(const std::vector<int>& signs) {
  struct Term {
    std::vector<int> open;
    std::vector<std::pair<int, int>> pairs;
  };
  std::vector<Term> terms{{}};
  for (std::size_t pos = 0; pos < signs.size(); ++pos) {
    const int label = static_cast<int>(pos) + 1;
    std::vector<Term> next;
    for (const auto& t : terms) {
      if (signs[pos] > 0) {
        Term u = t;
        u.open.push_back(label);
        next.push_back(u);
        continue;
      }
      for (std::size_t q = 0; q < t.open.size(); ++q) {
        Term u = t;
        u.pairs.emplace_back(t.open[q], label);
        u.open.erase(u.open.begin() + static_cast<std::ptrdiff_t>(q));
        next.push_back(u);
      }
    }
    terms = std::move(next);
  }
  std::set<std::vector<std::pair<int, int>>> out;
  for (auto& t : terms) {
    if (!t.open.empty()) continue;
    std::sort(t.pairs.begin(), t.pairs.end());
    out.insert(t.pairs);
  }
  return out;
}

Verdict criterion5() {
  const std::size_t catalan[] = {1, 1, 2, 5, 14, 42};
  std::vector<double> counts;
  bool ok = true;
  for (int m = 1; m <= 6; ++m) {
    // Independent count: all 2^(2m) sequences filtered by the prefix rule.
    std::size_t brute = 0;
    for (unsigned mask = 0; mask < (1u << (2 * m)); ++mask) {
      int sum = 0;
      bool good = true;
      for (int k = 0; k < 2 * m && good; ++k) {
        sum += (mask >> k & 1u) ? 1 : -1;
        if (k + 1 < 2 * m && sum < 1) good = false;
      }
      brute += good && sum == 0;
    }
    const std::size_t enumerated = enumerate_sigma0(2 * m).size();
    counts.push_back(static_cast<double>(enumerated));
    ok = ok && enumerated == catalan[m - 1] && brute == enumerated;
  }
  std::size_t checked = 0;
  for (int j = 2; j <= 6; j += 2) {
    for (const auto& s : enumerate_sigma0(j)) {
      std::set<std::vector<std::pair<int, int>>> got;
      for (auto w : wick_pairings(s)) {
        std::sort(w.pairs.begin(), w.pairs.end());
        got.insert(w.pairs);
      }
      ok = ok && got == brute_force_pairings(s.entries);
      ++checked;
    }
  }
  return {ok, "|Sigma_0(2m)| = " + list(counts) + ", pairings match normal ordering on " +
                  std::to_string(checked) + " sequences"};
}

Verdict criterion6() {
  const ModelParams p = nelson(100.0);
  const std::vector<double> mus{1e3, 1e4, 1e5};
  ProbeOptions o;
  o.time_exponent = 1.0 / 6.0;
  const ProbeResult r2 = nonconvergence_probe(2, 23.0 / 24.0, mus, p, o);
  ProbeOptions o4 = o;
  o4.tau = r2.tau;
  const ProbeResult r4 = nonconvergence_probe(4, 23.0 / 24.0, mus, p, o4);
  std::vector<double> d2, d4;
  for (const auto& row : r2.rows) d2.push_back(row.distance);
  for (const auto& row : r4.rows) d4.push_back(row.distance);
  const bool lower = *std::min_element(d2.begin(), d2.end()) >= 0.1;
  const bool decreasing = strictly_decreasing(d4);
  return {lower && decreasing, "tau " + fmt(r2.tau) + "; N=2 distances " + list(d2) +
                                   " (>= 0.1: " + (lower ? "yes" : "no") + "); N=4 distances " +
                                   list(d4) + " (decreasing: " + (decreasing ? "yes" : "no") + ")"};
}

Verdict criterion8() {
  const std::vector<double> mus{4, 8, 16, 32, 64};
  const auto one = [](double) { return 1.0; };
  const SweepResult s2 = sweep_mu(oracle_spec(4, 2, 0.0), mus, one);
  std::vector<double> e2;
  for (const auto& row : s2.rows) {
    e2.push_back(row.run.error);
    g_fiber_runs.push_back(row.run);
  }
  const SweepResult s3 = sweep_mu(oracle_spec(4, 3, 0.0), mus, one);
  std::vector<double> e3;
  for (const auto& row : s3.rows) {
    e3.push_back(row.run.error);
    g_fiber_runs.push_back(row.run);
  }
  const bool decreasing = strictly_decreasing(e2);
  const double shift = std::abs(s3.fit.exponent - s2.fit.exponent);
  return {decreasing && s2.fit.exponent <= -0.3 && shift < 0.1,
          "n_max=2 errors " + list(e2) + " exponent " + fmt(s2.fit.exponent) +
              " (<= -0.3, decreasing: " + (decreasing ? "yes" : "no") + "); n_max=3 errors " +
              list(e3) + " exponent " + fmt(s3.fit.exponent) + ", shift " + fmt(shift) +
              " (< 0.1)"};
}

Verdict criterion9() {
  std::vector<double> errors;
  for (double m : {0.0, 0.5, 1.0, 2.0}) {
    const FiberRun run = fiber_error(oracle_spec(32, 2, m), 1.0);
    g_fiber_runs.push_back(run);
    errors.push_back(run.error);
  }
  std::vector<double> gap, se;
  quad::McConfig mc;
  mc.samples = 200000;
  mc.seed = 2024;
  for (const auto& [mu, m] : std::vector<std::pair<double, double>>{{50, 1}, {100, 1}, {100, 2}}) {
    const ModelParams p = nelson(mu, 1.0, m);
    const GnResult g3 = solve_gn(3, 0.0, p, 1e-11, mc, 3);
    gap.push_back(std::abs(g3.g - solve_g(0.0, p, 1e-12)));
    se.push_back(g3.mc_error);
  }
  const bool a = strictly_decreasing(errors);
  const bool b = strictly_decreasing(gap);
  return {a && b, "fiber errors over m " + list(errors) + " (decreasing: " + (a ? "yes" : "no") +
                      "); |g3 - g1|(0) " + list(gap) + " with MC error " + list(se) +
                      " (decreasing: " + (b ? "yes" : "no") + ")"};
}

Verdict criterion7() {
  double worst_norm = 0.0, worst_drift = 0.0;
  for (const auto& r : g_fiber_runs) {
    worst_norm = std::max(worst_norm, r.norm_error);
    worst_drift = std::max(worst_drift, r.energy_drift);
  }
  return {!g_fiber_runs.empty() && worst_norm <= 1e-10 && worst_drift <= 1e-8,
          std::to_string(g_fiber_runs.size()) + " runs, max norm error " + fmt(worst_norm) +
              " (tol 1e-10), max energy drift " + fmt(worst_drift) + " (tol 1e-8)"};
}

Verdict criterion10() {
  const std::vector<std::string> args{"sweep", "--seed", "12345", "--jobs", "0"};
  std::ostringstream a, b, err;
  const int ca = run(args, a, err);
  const int cb = run(args, b, err);
  const bool same = ca == 0 && cb == 0 && !a.str().empty() && a.str() == b.str();
  return {same, "exit codes " + std::to_string(ca) + "/" + std::to_string(cb) + ", " +
                    std::to_string(a.str().size()) + " bytes, identical: " + (same ? "yes" : "no")};
}

Outcome timed(const std::function<Verdict()>& fn, double limit) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o.verdict = fn();
  } catch (const Error& e) {
    o.verdict = {false, "error: " + e.line()};
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.limit = limit;
  if (limit > 0.0 && o.seconds > limit) o.verdict.pass = false;
  return o;
}

}  // namespace

int main() {
  const std::map<int, std::string> names = {
      {1, "mu-norm closed form"},          {2, "fixed point residual and bracket"},
      {3, "g - g_eff envelope"},           {4, "coefficient limits"},
      {5, "combinatorics"},                {6, "nonconvergence probe"},
      {7, "oracle unitarity/conservation"}, {8, "oracle mu-scaling"},
      {9, "massive improvement"},          {10, "determinism"},
  };
  // Criterion 7 audits the Krylov runs of 8 and 9, so it is evaluated after them.
  const std::vector<std::pair<int, std::pair<std::function<Verdict()>, double>>> plan = {
      {1, {criterion1, 1.0}},   {2, {criterion2, 30.0}},  {3, {criterion3, 120.0}},
      {4, {criterion4, 10.0}},  {5, {criterion5, 5.0}},   {6, {criterion6, 120.0}},
      {8, {criterion8, 900.0}}, {9, {criterion9, 900.0}}, {7, {criterion7, 0.0}},
      {10, {criterion10, 0.0}},
  };
  std::map<int, Outcome> outcomes;
  for (const auto& [id, job] : plan) {
    std::fprintf(stderr, "# running criterion %d\n", id);
    outcomes[id] = timed(job.first, job.second);
  }
  int failed = 0;
  for (const auto& [id, o] : outcomes) {
    failed += !o.verdict.pass;
    std::string time = fmt(o.seconds) + " s";
    if (o.limit > 0.0) time += " (limit " + fmt(o.limit) + " s)";
    std::printf("%s %d %s: %s; %s\n", o.verdict.pass ? "PASS" : "FAIL", id, names.at(id).c_str(),
                o.verdict.detail.c_str(), time.c_str());
  }
  std::printf("acceptance: %d/%zu criteria pass\n", static_cast<int>(outcomes.size()) - failed,
              outcomes.size());
  return failed == 0 ? 0 : 1;
}
