#include "radcorr/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "radcorr/csv.hpp"
#include "radcorr/errors.hpp"

namespace radcorr {

namespace {
constexpr const char* kModule = "config";
namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
    fail(ErrorKind::Usage, kModule, "bad value '" + raw + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(ErrorKind::Usage, kModule, "bad boolean '" + raw + "' for " + key);
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::istringstream is(raw);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(parse_number<double>(key, cell));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

// One setter per recognised key, addressed as "section.key" ("key" at top level).
using Setter = void (*)(RunConfig&, const std::string&, const std::string&);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mu", [](RunConfig& c, const std::string& k, const std::string& v) { c.mu = parse_number<double>(k, v); }},
      {"mass", [](RunConfig& c, const std::string& k, const std::string& v) { c.mass = parse_number<double>(k, v); }},
      {"epsilon", [](RunConfig& c, const std::string& k, const std::string& v) { c.epsilon = parse_number<double>(k, v); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"jobs", [](RunConfig& c, const std::string& k, const std::string& v) { c.jobs = parse_number<unsigned>(k, v); }},
      {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = trim(v); }},
      {"form_factor.kind", [](RunConfig& c, const std::string&, const std::string& v) { c.ff_kind = trim(v); }},
      {"form_factor.lambda", [](RunConfig& c, const std::string& k, const std::string& v) { c.ff_lambda = parse_number<double>(k, v); }},
      {"form_factor.a", [](RunConfig& c, const std::string& k, const std::string& v) { c.ff_a = parse_number<double>(k, v); }},
      {"form_factor.table", [](RunConfig& c, const std::string&, const std::string& v) { c.ff_table = trim(v); }},
      {"tolerances.quad_rel", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.quad_rel = parse_number<double>(k, v); }},
      {"tolerances.fixed_point", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.fixed_point = parse_number<double>(k, v); }},
      {"tolerances.lemma_slack", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.lemma_slack = parse_number<double>(k, v); }},
      {"tolerances.krylov", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.krylov = parse_number<double>(k, v); }},
      {"grid.nodes", [](RunConfig& c, const std::string& k, const std::string& v) { c.nodes = parse_number<std::size_t>(k, v); }},
      {"grid.p_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.p_max = parse_number<double>(k, v); }},
      {"mc.samples", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc_samples = parse_number<std::size_t>(k, v); }},
      {"mc.stratify", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc_stratify = parse_bool(k, v); }},
      {"mc.seeds", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc_seeds = parse_number<int>(k, v); }},
      {"dynamics.N", [](RunConfig& c, const std::string& k, const std::string& v) { c.order = parse_number<int>(k, v); }},
      {"dynamics.a", [](RunConfig& c, const std::string& k, const std::string& v) { c.a = parse_number<double>(k, v); }},
      {"dynamics.tau", [](RunConfig& c, const std::string& k, const std::string& v) { c.tau = parse_number<double>(k, v); }},
      {"dynamics.b", [](RunConfig& c, const std::string& k, const std::string& v) { c.b = parse_number<double>(k, v); }},
      {"dynamics.mu_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.probe_mu = parse_list(k, v); }},
      {"dynamics.p_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.p_lo = parse_number<double>(k, v); }},
      {"dynamics.p_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.p_hi = parse_number<double>(k, v); }},
      {"dynamics.t_grid", [](RunConfig& c, const std::string& k, const std::string& v) { c.t_grid = parse_list(k, v); }},
      {"dynamics.C", [](RunConfig& c, const std::string& k, const std::string& v) { c.bound_c = parse_number<double>(k, v); }},
      {"oracle.h", [](RunConfig& c, const std::string& k, const std::string& v) { c.h = parse_number<double>(k, v); }},
      {"oracle.kmax", [](RunConfig& c, const std::string& k, const std::string& v) { c.kmax = parse_number<double>(k, v); }},
      {"oracle.nmax", [](RunConfig& c, const std::string& k, const std::string& v) { c.nmax = parse_number<int>(k, v); }},
      {"oracle.ptotal", [](RunConfig& c, const std::string& k, const std::string& v) { c.ptotal = parse_number<double>(k, v); }},
      {"oracle.t_grid", [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_t = parse_list(k, v); }},
      {"oracle.subspace", [](RunConfig& c, const std::string& k, const std::string& v) { c.subspace = parse_number<int>(k, v); }},
      {"oracle.max_dimension", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_dimension = parse_number<std::size_t>(k, v); }},
      {"sweep.mu_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_mu = parse_list(k, v); }},
      {"sweep.t", [](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_t = parse_number<double>(k, v); }},
  };
  return table;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) fail(ErrorKind::Usage, kModule, "unknown key '" + key + "'");
  it->second(cfg, key, value);
}
}  // namespace

ModelParams RunConfig::params() const {
  ModelParams p;
  p.mu = mu;
  p.dispersion.mass = mass;
  p.epsilon = epsilon;
  p.tol = tol;
  p.form_factor = make_form_factor(ff_kind, ff_lambda, ff_a, ff_table);
  return p;
}

FormFactor make_form_factor(const std::string& kind, double lambda, double a,
                            const std::string& table_path) {
  if (kind == "nelson") return FormFactor::nelson(lambda);
  if (kind == "powerlaw") return FormFactor::power_law(a, lambda);
  if (kind == "tabulated") {
    if (table_path.empty()) fail(ErrorKind::Usage, kModule, "tabulated form factor needs form_factor.table");
    const Table t = read_csv(table_path);
    if (t.header != std::vector<std::string>{"rho", "V"}) {
      fail(ErrorKind::Usage, kModule, "form factor table must have header rho,V");
    }
    std::vector<double> rho, v;
    for (const auto& row : t.rows) {
      rho.push_back(row[0]);
      v.push_back(row[1]);
    }
    return FormFactor::tabulated(std::move(rho), std::move(v));
  }
  fail(ErrorKind::Usage, kModule, "unknown form factor kind '" + kind + "'");
}

RunConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Usage, kModule, std::string("malformed INI: ") + e.message() + " at line " +
                                        std::to_string(e.line()));
  }
  RunConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply(cfg, name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) apply(cfg, name + "." + key, leaf.data());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Resource, kModule, "cannot open config file " + path);
  return parse_config(in);
}

void save_config(std::ostream& os, const RunConfig& c) {
  const auto d = [](double v) { return format_double(v); };
  os << "mu = " << d(c.mu) << '\n'
     << "mass = " << d(c.mass) << '\n'
     << "epsilon = " << d(c.epsilon) << '\n'
     << "seed = " << c.seed << '\n'
     << "jobs = " << c.jobs << '\n'
     << "out = " << c.out << '\n';
  os << "\n[form_factor]\n"
     << "kind = " << c.ff_kind << '\n'
     << "lambda = " << d(c.ff_lambda) << '\n'
     << "a = " << d(c.ff_a) << '\n'
     << "table =" << (c.ff_table.empty() ? "" : " " + c.ff_table) << '\n';
  os << "\n[tolerances]\n"
     << "quad_rel = " << d(c.tol.quad_rel) << '\n'
     << "fixed_point = " << d(c.tol.fixed_point) << '\n'
     << "lemma_slack = " << d(c.tol.lemma_slack) << '\n'
     << "krylov = " << d(c.tol.krylov) << '\n';
  os << "\n[grid]\n"
     << "nodes = " << c.nodes << '\n'
     << "p_max = " << d(c.p_max) << '\n';
  os << "\n[mc]\n"
     << "samples = " << c.mc_samples << '\n'
     << "stratify = " << (c.mc_stratify ? "true" : "false") << '\n'
     << "seeds = " << c.mc_seeds << '\n';
  os << "\n[dynamics]\n"
     << "N = " << c.order << '\n'
     << "a = " << d(c.a) << '\n'
     << "tau = " << d(c.tau) << '\n'
     << "b = " << d(c.b) << '\n'
     << "mu_list = " << join(c.probe_mu) << '\n'
     << "p_lo = " << d(c.p_lo) << '\n'
     << "p_hi = " << d(c.p_hi) << '\n'
     << "t_grid = " << join(c.t_grid) << '\n'
     << "C = " << d(c.bound_c) << '\n';
  os << "\n[oracle]\n"
     << "h = " << d(c.h) << '\n'
     << "kmax = " << d(c.kmax) << '\n'
     << "nmax = " << c.nmax << '\n'
     << "ptotal = " << d(c.ptotal) << '\n'
     << "t_grid = " << join(c.oracle_t) << '\n'
     << "subspace = " << c.subspace << '\n'
     << "max_dimension = " << c.max_dimension << '\n';
  os << "\n[sweep]\n"
     << "mu_list = " << join(c.sweep_mu) << '\n'
     << "t = " << d(c.sweep_t) << '\n';
}

}  // namespace radcorr
