#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "npi/registry.hpp"
#include "npi/serialize.hpp"

namespace npi {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "report_v1";

struct RunOptions {
  std::optional<int> grid, trials;
  uint64_t seed = 7;
  bool refine = false;
  Params overrides;
};

struct RunOutcome {
  Json report;
  int exit_code = 0;
  std::string csv;  // table form of the main result
};

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Violation: return 2;
    case ErrorKind::Gate: return 3;
    case ErrorKind::Resolution: return 4;
    default: return 1;
  }
}

inline const char* inequality_name(Inequality f) {
  switch (f) {
    case Inequality::GradientI: return "gradient";
    case Inequality::FormII: return "form";
    default: return "none";
  }
}

inline Json config_json(const ExampleConfig& c) {
  Json j;
  j["name"] = c.name;
  j["description"] = c.description;
  j["n"] = c.n;
  j["p"] = c.p;
  j["domain"] = to_json(c.domain);
  if (c.kernel) j["kernel"] = to_json(*c.kernel);
  j["inequality"] = inequality_name(c.form);
  if (c.form == Inequality::GradientI) {
    j["rhs_weight"] = to_json(c.rhs_weight, c.n);
    j["rhs_scale"] = c.rhs_scale;
  }
  j["tolerance"] = c.tol;
  if (c.jensen_weight) j["jensen_weight"] = to_json(*c.jensen_weight, c.n);
  if (c.corr) j["correspondence"] = to_json(*c.corr, c.n);
  if (c.flow) j["flow"] = to_json(*c.flow, c.n);
  Json params = Json::object();
  for (const auto& [k, v] : c.params.values()) params[k] = v;
  j["params"] = params;
  return j;
}

inline Json report_header(const std::string& command, const std::string& example, const RunOptions& o) {
  Json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["command"] = command;
  j["example"] = example;
  j["seed"] = o.seed;
  return j;
}

inline ExampleConfig resolve(const std::string& name, const RunOptions& o) {
  ExampleConfig c = load_example(name, o.overrides);
  c.tf.p = c.p;
  return c;
}

// Operators for the configured inequality, built once per grid.
struct Discretization {
  Grid grid;
  CellSets cells;
  std::optional<OperatorMatrix> G;
  std::optional<FormEvaluator> F;

  double functional(const std::vector<double>& u) const { return G ? G->functional(u) : (*F)(u); }
  SharpResult sharp() const { return G ? sharp_constant_p2(*G) : sharp_constant_p2(*F); }
};

inline Discretization discretize(const ExampleConfig& c, int N) {
  require(c.kernel.has_value() && c.form != Inequality::None, c.name + " has no inequality to discretize",
          ErrorKind::Config);
  Discretization d;
  d.grid = config_grid(c, N);
  if (c.form == Inequality::GradientI) {
    d.G = assemble_gradient(d.grid, *c.kernel, c.rhs_weight, c.p, c.domain, c.subsample, c.rhs_scale);
    d.cells = d.G->S.cells;
  } else {
    d.F = assemble_form(d.grid, *c.kernel, c.p, c.domain, c.subsample);
    d.cells = d.F->S.cells;
  }
  return d;
}

inline RunOutcome run_verify(const std::string& name, const RunOptions& o) {
  ExampleConfig c = resolve(name, o);
  int N = o.grid.value_or(c.grid), T = o.trials.value_or(c.trials);
  Discretization d = discretize(c, N);
  auto us = test_functions(d.grid, c.domain, d.cells, T, o.seed, c.tf);
  std::optional<double> bound;
  if (c.bound) bound = c.bound->value;
  auto sum = verify_inequality(
      us, d.cells, c.p, [&](const std::vector<double>& u) { return d.functional(u); }, bound, c.tol);

  RunOutcome out;
  out.report = report_header("verify", name, o);
  out.report["grid"] = N;
  out.report["h"] = d.grid.h;
  out.report["trials"] = T;
  out.report["family"] = family_name(c.tf.family);
  out.report["config"] = config_json(c);
  if (c.bound) out.report["bound"] = to_json(*c.bound);
  Json per = Json::array();
  std::ostringstream csv;
  csv << "trial,lhs,rhs,ratio,pass";
  if (d.F) csv << ",bc_integral";
  csv << "\n";
  csv.precision(17);
  double bc_max = 0.0;
  for (size_t t = 0; t < sum.results.size(); ++t) {
    const auto& r = sum.results[t];
    Json e = {{"trial", t}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}, {"pass", r.pass}};
    csv << t << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << ',' << (r.pass ? 1 : 0);
    if (d.F) {
      double bc = d.F->average_integral(us[t].values);
      bc_max = std::max(bc_max, bc);
      e["bc_integral"] = bc;
      csv << ',' << bc;
    }
    csv << "\n";
    per.push_back(e);
  }
  Json res;
  res["unknowns"] = d.cells.rows.size();
  res["violations"] = sum.violations;
  res["max_ratio"] = sum.max_ratio;
  if (c.bound) res["max_ratio_over_bound"] = sum.max_ratio / c.bound->value;
  if (d.F) res["max_bc_integral"] = bc_max;
  res["pass"] = sum.violations == 0;
  res["per_trial"] = per;
  out.report["result"] = res;
  out.csv = csv.str();
  out.exit_code = sum.violations == 0 ? 0 : 2;
  return out;
}

inline RunOutcome run_sharp(const std::string& name, const RunOptions& o) {
  ExampleConfig c = resolve(name, o);
  require(c.p == 2.0, "sharp constants are computed for p = 2 only", ErrorKind::Config);
  int N = o.grid.value_or(c.grid);
  Discretization d = discretize(c, N);
  SharpResult s = d.sharp();
  RunOutcome out;
  out.report = report_header("sharp", name, o);
  out.report["grid"] = N;
  out.report["h"] = d.grid.h;
  out.report["config"] = config_json(c);
  Json res = {{"unknowns", d.cells.rows.size()},
              {"c_sharp", s.c_sharp},
              {"lambda_min", s.lambda_min},
              {"residual", s.residual}};
  bool ok = true;
  if (c.bound) {
    out.report["bound"] = to_json(*c.bound);
    res["ratio"] = s.c_sharp / c.bound->value;
    ok = s.c_sharp <= c.bound->value;
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "grid,c_sharp\n" << N << ',' << s.c_sharp << "\n";
  if (o.refine) {
    Discretization d2 = discretize(c, 2 * N);
    SharpResult s2 = d2.sharp();
    res["refined"] = {{"grid", 2 * N}, {"c_sharp", s2.c_sharp}, {"relative_change", std::abs(s2.c_sharp - s.c_sharp) / s.c_sharp}};
    csv << 2 * N << ',' << s2.c_sharp << "\n";
    if (c.bound) ok = ok && s2.c_sharp <= c.bound->value;
  }
  res["pass"] = ok;
  out.report["result"] = res;
  out.csv = csv.str();
  out.exit_code = ok ? 0 : 2;
  return out;
}

// Cell centres of a grid of `per_axis` cells per axis over bbox(r) that lie in r.
inline std::pair<std::vector<Vec>, double> region_samples(const Region& r, int n, int per_axis) {
  Box b = bbox(r, n);
  require(b.finite(), "region needs a finite bounding box");
  double ext = 0.0;
  for (int i = 0; i < n; ++i) ext = std::max(ext, b.hi[i] - b.lo[i]);
  Grid g = make_grid(b, ext / per_axis);
  std::vector<Vec> pts;
  for (size_t i = 0; i < g.size(); ++i)
    if (contains(r, g.center(i))) pts.push_back(g.center(i));
  return {pts, g.cell_volume()};
}

inline RunOutcome run_absorption(const std::string& name, const RunOptions& o) {
  ExampleConfig c = resolve(name, o);
  require(c.flow.has_value(), name + " has no flow", ErrorKind::Config);
  int N = o.grid.value_or(c.grid);
  Grid g = config_grid(c, N);
  std::vector<Vec> xs;
  for (size_t i = 0; i < g.size(); ++i)
    if (contains(*c.omega_prime, g.center(i))) xs.push_back(g.center(i));
  auto [phi, vol] = region_samples(*c.phi, c.n, c.phi_grid);
  AbsorptionReport rep = absorption_partition(*c.flow, xs, phi, vol, *c.absorbing, c.domain);
  RunOutcome out;
  out.report = report_header("absorption", name, o);
  out.report["grid"] = N;
  out.report["phi_grid"] = c.phi_grid;
  out.report["config"] = config_json(c);
  out.report["phi"] = to_json(*c.phi, c.n);
  out.report["absorbing"] = to_json(*c.absorbing, c.n);
  out.report["omega_prime"] = to_json(*c.omega_prime, c.n);
  Json res = to_json(rep, c.n);
  res["start_points"] = xs.size();
  res["phi_samples"] = phi.size();
  res["pass"] = rep.not_absorbed == 0;
  out.report["result"] = res;
  std::ostringstream csv;
  csv.precision(17);
  csv << "alpha,measure,count\n";
  for (const auto& b : rep.bins) csv << b.alpha << ',' << b.measure << ',' << b.count << "\n";
  out.csv = csv.str();
  out.exit_code = rep.not_absorbed == 0 ? 0 : 4;
  return out;
}

inline JensenReport jensen_for(const ExampleConfig& c) {
  require(c.jensen_weight && c.corr && c.R_field, c.name + " has no weight correspondence", ErrorKind::Config);
  JensenOptions opt;
  opt.y_samples = c.jensen_samples;
  opt.resolution = c.jensen_resolution;
  opt.nu_declared = c.jensen_nu;
  opt.ladder_scale = c.ladder_scale;
  return reverse_jensen_check(*c.jensen_weight, *c.corr, c.R_field, c.domain, opt);
}

inline RunOutcome run_jensen(const std::string& name, const RunOptions& o) {
  ExampleConfig c = resolve(name, o);
  JensenReport rep = jensen_for(c);
  RunOutcome out;
  out.report = report_header("jensen", name, o);
  out.report["config"] = config_json(c);
  out.report["result"] = to_json(rep, c.n);
  std::ostringstream csv;
  csv.precision(17);
  csv << "y0,y1,ratio\n";
  for (const auto& s : rep.per_sample) csv << s.y[0] << ',' << s.y[1] << ',' << s.ratio << "\n";
  out.csv = csv.str();
  out.exit_code = rep.pass ? 0 : 2;
  return out;
}

// Named constant calculators for the `constants` subcommand.
inline Bound named_constant(const std::string& name, const Params& P) {
  auto n = [&] { return static_cast<int>(P.get("n", 1)); };
  if (name == "control") {
    double v = control_constant(P.at("nu"), P.at("p"));
    return {v, {{"nu", P.at("nu")}, {"p", P.at("p")}}};
  }
  if (name == "eta") return {eta(n()), {{"n", n()}}};
  if (name == "r-zero") return {r_zero(n(), P.at("p"), P.at("alpha")), {{"q", conjugate_exponent(P.at("p"))}}};
  if (name == "basic-ex1") return basic_ex1_bound(n(), P.at("diam"));
  if (name == "basic-ex2") return basic_ex2_bound(P.at("diam"), P.get("p", 2));
  if (name == "basic-ex1-ext")
    return basic_ex1_ext_bound(n(), P.get("p", 2), P.at("delta"), P.at("diam"), P.at("tau"));
  if (name == "sign-change1")
    return sign_change1_bound(n(), P.get("p", 2), P.at("alpha"), P.get("tau", 1), P.at("delta"), P.at("diam"));
  if (name == "sign-change2")
    return sign_change2_bound(n(), P.get("p", 2), P.at("alpha"), P.get("tau", 1), P.at("delta"), P.at("omega"));
  if (name == "gflow") return gflow_bound(P.get("p", 2), P.at("S"), P.at("theta"), P.at("tau"), P.get("C", 1));
  if (name == "discontinuous")
    return discontinuous_bound(P.get("p", 2), P.at("delta1"), P.at("delta2"), P.at("theta"), P.get("C", 1));
  if (name == "cor1") return cor1_bound(P.at("M0"), P.at("theta"), P.at("lambda"));
  if (name == "cor2") return cor2_bound(P.at("alpha0"), P.get("p", 2), P.at("M0"), P.at("N0"), P.at("Theta0"));
  if (name == "third-strategy") return third_strategy_bound(n(), P.at("delta"), P.at("diam"));
  if (name == "third-strategy-tb") return third_strategy_tb_bound(n(), P.at("tau"), P.at("beta"), P.at("diam"));
  if (name == "k4") {
    int m = static_cast<int>(P.get("m", 0));
    double th = P.at("theta");
    double cm = P.has("c") ? P.at("c") : cone_measure_analytic(m, n(), th);
    require(cm > 0.0, "no closed-form cone measure; pass --c", ErrorKind::Config);
    return {lowdim_K4(m, n(), th, cm), {{"cone_measure", cm}}};
  }
  if (name == "dist-class")
    return {dist_class_bound(n(), P.at("a"), P.at("b"), P.at("alpha1"), P.at("alpha2"), P.at("beta"), P.at("K1"),
                             P.get("K2", 1), P.get("K3", 1)),
            {}};
  throw Error(ErrorKind::Config, "unknown constant '" + name + "'");
}

inline const std::vector<std::string>& constant_names() {
  static const std::vector<std::string> v = {"control",       "eta",          "r-zero",        "basic-ex1",
                                             "basic-ex2",     "basic-ex1-ext", "sign-change1", "sign-change2",
                                             "gflow",         "discontinuous", "cor1",         "cor2",
                                             "third-strategy", "third-strategy-tb", "k4",       "dist-class"};
  return v;
}

inline RunOutcome run_constants(const std::string& name, const RunOptions& o) {
  Bound b = named_constant(name, o.overrides);
  RunOutcome out;
  out.report = report_header("constants", name, o);
  out.report.erase("seed");
  Json in = Json::object();
  for (const auto& [k, v] : o.overrides.values()) in[k] = v;
  out.report["inputs"] = in;
  out.report["result"] = to_json(b);
  std::ostringstream csv;
  csv.precision(17);
  csv << "name,value\nvalue," << b.value << "\n";
  for (const auto& [k, v] : b.factors) csv << k << ',' << v << "\n";
  out.csv = csv.str();
  return out;
}

// One verify run per value of `key`; the report holds the ratio summary per value.
inline RunOutcome run_sweep(const std::string& name, const std::string& key, const std::vector<double>& values,
                            const RunOptions& o) {
  require(!values.empty(), "sweep needs at least one value", ErrorKind::Config);
  RunOutcome out;
  out.report = report_header("sweep", name, o);
  out.report["key"] = key;
  Json rows = Json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << key << ",bound,max_ratio,max_ratio_over_bound,violations\n";
  size_t violations = 0;
  for (double v : values) {
    RunOptions oi = o;
    oi.overrides.set(key, v);
    RunOutcome r = run_verify(name, oi);
    const Json& res = r.report["result"];
    double bound = r.report.contains("bound") ? r.report["bound"]["value"].get<double>() : kInf;
    double over = res.contains("max_ratio_over_bound") ? res["max_ratio_over_bound"].get<double>() : 0.0;
    size_t viol = res["violations"].get<size_t>();
    violations += viol;
    rows.push_back({{key, v},
                    {"bound", r.report.contains("bound") ? Json(bound) : Json(nullptr)},
                    {"max_ratio", res["max_ratio"]},
                    {"max_ratio_over_bound", over},
                    {"violations", viol}});
    csv << v << ',' << bound << ',' << res["max_ratio"].get<double>() << ',' << over << ',' << viol << "\n";
  }
  out.report["result"] = {{"rows", rows}, {"violations", violations}, {"pass", violations == 0}};
  out.csv = csv.str();
  out.exit_code = violations == 0 ? 0 : 2;
  return out;
}

inline Json error_report(const std::string& command, const std::string& example, const Error& e) {
  Json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["command"] = command;
  j["example"] = example;
  j["error"] = {{"kind", kind_name(e.kind())}, {"message", e.what()}};
  return j;
}

inline std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Writes a field as CSV rows: index, centre coordinates, value.
inline void write_field_csv(std::ostream& os, const ScalarField& u) {
  const Grid& g = u.grid;
  os.precision(17);
  os << "index";
  for (int i = 0; i < g.n; ++i) os << ",x" << i;
  os << ",value\n";
  for (size_t i = 0; i < g.size(); ++i) {
    Vec c = g.center(i);
    os << i;
    for (int a = 0; a < g.n; ++a) os << ',' << c[a];
    os << ',' << u.values[i] << "\n";
  }
}

// Coordinate triplets "row col value" of a dense matrix, zeros skipped.
inline void write_triplets(std::ostream& os, const Eigen::MatrixXd& A) {
  os.precision(17);
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c)
      if (A(r, c) != 0.0) os << r << ' ' << c << ' ' << A(r, c) << "\n";
}

}  // namespace npi
