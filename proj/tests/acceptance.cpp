// Acceptance criteria 1-10. `acceptance i` runs one criterion, no argument runs all.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "npi/harness.hpp"

using namespace npi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream log;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      log << "  FAILED: " << what << "\n";
    }
  }
  template <class T>
  void note(const std::string& k, const T& v) {
    log << "  " << k << " = " << v << "\n";
  }
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Dense scan of the control objective with repeated zooming.
double scan_control(double nu, double p) {
  double a = std::pow(nu, 1.0 / (p - 1.0)), b = 1.0;
  double best = kInf, arg = 0.0;
  for (int level = 0; level < 8; ++level) {
    const int M = 20000;
    double step = (b - a) / M;
    for (int i = 1; i < M; ++i) {
      double x = a + i * step;
      double f = control_objective(x, nu, p);
      if (f < best) {
        best = f;
        arg = x;
      }
    }
    double na = std::max(a, arg - 2 * step), nb = std::min(b, arg + 2 * step);
    a = na;
    b = nb;
  }
  return best;
}

void criterion1(Outcome& o) {
  o.expect(std::abs(control_constant(0.5, 1) - 2.0) <= 1e-12, "C(0.5,1) = 2");
  o.expect(std::abs(control_constant(0.25, 2) - 4.0) <= 1e-12, "C(0.25,2) = 4");
  double worst = 0.0;
  for (uint64_t i = 0; i < 20; ++i) {
    double nu = 0.05 + 0.85 * uniform01(2024, 2 * i), p = 1.2 + 2.8 * uniform01(2024, 2 * i + 1);
    double c = control_minimize(nu, p).value, s = scan_control(nu, p);
    worst = std::max(worst, std::abs(c - s) / s);
  }
  o.note("worst relative gap to grid scan", worst);
  o.expect(worst <= 1e-9, "golden-section minimum matches the grid scan to 1e-9");
  o.expect(std::abs(eta(1) - 0.5) <= 1e-14, "eta(1)");
  o.expect(std::abs(eta(2) - 4.0 / (3.0 * kPi)) <= 1e-14, "eta(2)");
  o.expect(std::abs(eta(3) - 0.375) <= 1e-14, "eta(3)");
  for (int n = 1; n <= 3; ++n)
    for (double p : {1.0, 1.5, 2.0, 3.0}) o.expect(r_zero(n, p, 0.0) == 1.0, "r_zero(n,p,0) = 1");
}

void criterion2(Outcome& o) {
  struct Case {
    std::string name;
    Kernel k;
  };
  std::vector<Case> cases;
  for (int n : {1, 2}) {
    std::string d = n == 1 ? " 1-D" : " 2-D";
    cases.push_back({"uniform ball" + d, uniform_ball(n, 1.0)});
    cases.push_back({"half ball" + d, half_ball_cone(n, 1.0, unit(0))});
    // alpha = 0.5 in 1-D is admissible only for p > 2; the kernel itself does not depend on p
    for (double a : {0.0, 0.5})
      cases.push_back({"sign-changing a=" + std::to_string(a) + d, sign_changing(n, 1.0, a, SigmaPattern{}, 1.0, n == 1 ? 3.0 : 2.0)});
  }
  // a mean-0.75 sign pattern needs at least two dimensions
  for (double a : {0.0, 0.5})
    cases.push_back({"sign-changing tau=0.75 a=" + std::to_string(a) + " 2-D", sign_changing(2, 1.0, a, checkerboard(8, {0}), 0.75, 2.0)});
  for (const auto& c : cases) {
    double h = 1.0 / 64;
    double e1 = std::abs(normalize_check(c.k, Vec{}, h) - 1.0), e2 = std::abs(normalize_check(c.k, Vec{}, h / 2) - 1.0);
    double factor = e2 > 0.0 ? e1 / e2 : kInf;
    o.log << "  " << c.name << ": err(h) = " << e1 << ", err(h/2) = " << e2 << ", factor = " << factor << "\n";
    o.expect(e1 <= 0.02, c.name + " normalized within 2%");
    o.expect(factor >= 1.5 && factor <= 3.0, c.name + " error factor in [1.5, 3]");
  }
}

void criterion3(Outcome& o) {
  // 1-D ceiling formula
  DomainConfig d1 = reg::domain(1, reg::interval(0, 1), reg::interval(0, 1));
  auto U1 = reg::outside_of(d1, 2.0);
  size_t mism = 0, checked = 0;
  for (uint64_t i = 0; i < 10000; ++i) {
    double x = uniform01(31, 2 * i), z = 0.01 + 0.99 * uniform01(31, 2 * i + 1);
    double q = (1.0 - x) / z;
    if (std::abs(q - std::round(q)) < 1e-9) continue;
    ++checked;
    auto a = absorption_index(TranslationFlow{}, Vec{x}, Vec{z}, *U1, d1);
    if (!a || *a != static_cast<int>(std::ceil(q))) ++mism;
  }
  o.note("1-D samples checked", checked);
  o.expect(mism == 0, "1-D indices equal ceil((1 - x)/zeta)");

  // 2-D bound
  DomainConfig d2 = reg::domain(2, reg::square(0, 1), reg::square(0, 1));
  auto U2 = reg::outside_of(d2, 2.0);
  size_t over = 0;
  for (uint64_t i = 0; i < 10000; ++i) {
    Vec x{uniform01(37, 4 * i), uniform01(37, 4 * i + 1)};
    double r = 0.05 + 0.45 * uniform01(37, 4 * i + 2), t = 2 * kPi * uniform01(37, 4 * i + 3);
    Vec z{r * std::cos(t), r * std::sin(t)};
    auto a = absorption_index(TranslationFlow{}, x, z, *U2, d2);
    if (!a || *a > static_cast<int>(std::ceil(std::sqrt(2.0) / r))) ++over;
  }
  o.expect(over == 0, "2-D indices at most ceil(diam/|zeta|)");

  // partition of Phi = (0.2, 0.4)
  std::vector<Vec> xs{Vec{1e-9}};
  for (int i = 0; i < 256; ++i) xs.push_back(Vec{(i + 0.5) / 256});
  const int M = 10000;
  std::vector<Vec> phi;
  for (int i = 0; i < M; ++i) phi.push_back(Vec{0.2 + 0.2 * (i + 0.5) / M});
  auto rep = absorption_partition(TranslationFlow{}, xs, phi, 0.2 / M, *U1, d1);
  std::vector<double> want{1.0 / 15, 1.0 / 12, 0.05};
  o.expect(rep.bins.size() == 3 && rep.not_absorbed == 0, "three bins, all absorbed");
  for (size_t b = 0; b < std::min<size_t>(3, rep.bins.size()); ++b) {
    o.log << "  bin alpha=" << rep.bins[b].alpha << " measure=" << rep.bins[b].measure << "\n";
    o.expect(close(rep.bins[b].measure, want[b], 0.2 / M), "bin measure within one Phi cell");
  }

  // laminate flow
  RunOptions ro;
  auto lam = run_absorption("discontinuous", ro);
  int amax = lam.report["result"]["max_alpha"].get<int>();
  double d2s = load_example("discontinuous").params.at("delta2");
  int cap = static_cast<int>(std::ceil(2.0 / d2s)) + 1;
  o.note("laminate max index", amax);
  o.expect(lam.exit_code == 0, "laminate flow absorbs every sample");
  o.expect(amax <= cap, "laminate index <= ceil(2/delta2) + 1");

  // radial contraction
  const double eps = 0.1;
  FlowSpec f = radial_contraction(eps);
  DomainConfig dr = reg::domain(2, reg::square(-1, 1), reg::square(-1, 1));
  size_t bad_inj = 0, bad_det = 0;
  for (uint64_t i = 0; i < 1000; ++i) {
    auto draw = [&](uint64_t k) { return 2 * uniform01(41, 8 * i + k) - 1; };
    Vec x1{draw(0), draw(1)}, x2{draw(2), draw(3)};
    double r = eps * std::sqrt(uniform01(41, 8 * i + 4)), t = 2 * kPi * uniform01(41, 8 * i + 5);
    Vec z{r * std::cos(t), r * std::sin(t)};
    if (flow_active(f, x1, dr) && flow_active(f, x2, dr) && norm(x1 - x2) > 1e-12 &&
        norm(step(f, x1, z, dr) - step(f, x2, z, dr)) == 0.0)
      ++bad_inj;
    if (flow_active(f, x1, dr) && !(jacobian_det(f, x1, z, 2) > 1.0 / 9.0)) ++bad_det;
  }
  o.expect(bad_inj == 0, "radial contraction injective");
  o.expect(bad_det == 0, "det > 3^-n");
}

void verify_example(Outcome& o, const std::string& name, std::optional<int> grid) {
  RunOptions ro;
  ro.grid = grid;
  ro.trials = 100;
  auto t0 = std::chrono::steady_clock::now();
  auto r = run_verify(name, ro);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& res = r.report["result"];
  o.log << "  " << name << ": grid " << r.report["grid"] << ", violations " << res["violations"] << ", max ratio/bound "
        << res.value("max_ratio_over_bound", 0.0) << ", " << secs << " s\n";
  o.expect(res["violations"].get<size_t>() == 0, name + " has no violations");
  o.expect(secs < 60.0, name + " runs in under 60 s");
}

void criterion4(Outcome& o) {
  verify_example(o, "basic-ex2-1d", 256);
  verify_example(o, "basic-ex2-2d", 64);
  for (const char* n : {"basic-ex2-1d", "basic-ex2-2d"}) o.expect(load_example(n).tol == 1e-10, "tolerance 1e-10");
}

void criterion5(Outcome& o) {
  for (const char* n : {"basic-ex1-1d", "basic-ex1-2d", "sign-change1-1d", "sign-change1-2d", "sign-change2-1d",
                        "sign-change2-2d", "discontinuous", "gflow-1d", "gflow-2d"})
    verify_example(o, n, std::nullopt);
}

void criterion6(Outcome& o) {
  for (const char* n : {"basic-ex1-1d", "basic-ex2-1d", "sign-change2-1d", "sign-change2-2d"}) {
    RunOptions ro;
    ro.refine = true;
    auto r = run_sharp(n, ro);
    const auto& res = r.report["result"];
    double c = res["c_sharp"].get<double>(), b = r.report["bound"]["value"].get<double>();
    double ch = res["refined"]["relative_change"].get<double>();
    o.log << "  " << n << ": c_sharp " << c << ", bound " << b << ", change under 2N " << ch << "\n";
    o.expect(c <= b && res["refined"]["c_sharp"].get<double>() <= b, std::string(n) + " below its bound");
    o.expect(ch <= 0.10, std::string(n) + " stable within 10%");
  }
}

void criterion7(Outcome& o) {
  auto j1 = jensen_for(load_example("basic-ex1-1d"));
  o.note("affine half-ball nu_emp", j1.nu_emp);
  o.expect(std::abs(j1.nu_emp - 0.875) <= 0.02 * 0.875, "affine half-ball 0.875 within 2%");

  auto c = load_example("sign-change1-2d");
  auto j2 = jensen_for(c);
  o.log << "  quadratic cap nu_emp = " << j2.nu_emp << " (declared " << c.jensen_nu << ")\n";
  o.expect(j2.nu_emp <= c.jensen_nu * 1.02, "quadratic cap within its declared nu");

  auto j3 = jensen_for(load_example("cone-tube"));
  o.note("cone tube nu_emp", j3.nu_emp);
  o.expect(j3.nu_emp <= 2.0 * 1.02, "cone tube at most 2(1 + 2%)");

  std::vector<double> nus;
  for (double b : {0.125, 0.25, 0.5}) {
    nus.push_back(jensen_for(load_example("ball-cap", {{"b", b}})).nu_emp);
    o.log << "  ball cap b=" << b << " nu_emp = " << nus.back() << "\n";
  }
  o.expect(nus[0] < nus[1] && nus[1] < nus[2], "ball cap monotone in b");
}

void criterion8(Outcome& o) {
  for (const char* name : {"lowdim-point", "lowdim-circle"}) {
    std::vector<double> ratios;
    for (int N : {32, 64, 128}) {
      RunOptions ro;
      ro.grid = N;
      ro.trials = 10;
      auto r = run_verify(name, ro);
      bool finite = true;
      for (const auto& t : r.report["result"]["per_trial"]) {
        double rhs = t["rhs"].get<double>();
        finite = finite && std::isfinite(rhs) && rhs > 0.0;
      }
      double m = r.report["result"]["max_ratio"].get<double>();
      ratios.push_back(m);
      o.log << "  " << name << " N=" << N << ": max ratio " << m << "\n";
      o.expect(finite, std::string(name) + " functional finite and positive");
    }
    double lo = *std::min_element(ratios.begin(), ratios.end()), hi = *std::max_element(ratios.begin(), ratios.end());
    o.expect(std::isfinite(hi) && (hi - lo) / lo < 0.5, std::string(name) + " ratio varies less than 50%");
  }
}

void criterion9(Outcome& o) {
  size_t fails = 0;
  for (uint64_t c = 0; c < 200; ++c) {
    auto u01 = [&](uint64_t k) { return uniform01(900 + c, k); };
    int n = u01(0) < 0.5 ? 1 : 2;
    int cells = n == 1 ? 8 + static_cast<int>(32 * u01(1)) : 6 + static_cast<int>(10 * u01(1));
    Grid g = make_grid(n == 1 ? reg::interval(0, 1) : reg::square(0, 1), 1.0 / cells);
    std::vector<char> in(g.size(), 0);
    double lo = 0.3 * u01(2), hi = 0.6 + 0.4 * u01(3);
    for (size_t i = 0; i < g.size(); ++i) {
      Vec x = g.center(i);
      bool ok = true;
      for (int k = 0; k < n; ++k) ok = ok && x[k] > lo && x[k] < hi;
      in[i] = ok;
    }
    ScalarField u(g);
    int kind = static_cast<int>(c % 4);
    size_t first = 0;
    while (first < g.size() && !in[first]) ++first;
    for (size_t i = 0; i < g.size(); ++i) {
      if (!in[i]) continue;
      if (kind == 0) u.values[i] = i == first ? 1.0 : 0.0;  // indicator
      else if (kind == 1) u.values[i] = 1.0;                // constant
      else u.values[i] = 4 * u01(10 + i) - 2;
    }
    Vec zeta{};
    for (uint64_t tries = 0; norm(zeta) == 0.0; ++tries)
      for (int k = 0; k < n; ++k) zeta[k] = (static_cast<int>(7 * u01(1000 + 2 * tries + k)) - 3) * g.h;
    double p = 1.0 + 2.0 * u01(8);
    if (!orbit_inequality_check(u, in, zeta, p).pass) ++fails;
  }
  o.note("failing instances", fails);
  o.expect(fails == 0, "orbit inequality on 200 instances");
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void criterion10(Outcome& o) {
  const std::string cli = NPI_CLI_PATH;
  const std::string a = "acceptance_det_a.json", b = "acceptance_det_b.json";
  std::string base = "\"" + cli + "\" verify basic-ex1-1d --grid 64 --trials 20 --no-timestamp --out ";
  int r1 = std::system((base + a + " --seed 12345").c_str());
  Json first = Json::parse(slurp(a));
  uint64_t seed = first["seed"].get<uint64_t>();
  int r2 = std::system((base + b + " --seed " + std::to_string(seed)).c_str());
  std::string x = slurp(a), y = slurp(b);
  o.note("report bytes", x.size());
  o.expect(r1 == 0 && r2 == 0, "both runs exit 0");
  o.expect(!x.empty() && x == y, "reports are byte-identical");
  std::remove(a.c_str());
  std::remove(b.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  using Fn = void (*)(Outcome&);
  const std::vector<std::pair<const char*, Fn>> criteria = {
      {"constants", criterion1},     {"kernel normalization", criterion2}, {"absorption", criterion3},
      {"exact-regime verification", criterion4}, {"quadrature-regime verification", criterion5},
      {"sharp constants", criterion6}, {"reverse Jensen", criterion7},       {"lower-dimensional constraint", criterion8},
      {"orbit inequality", criterion9}, {"determinism", criterion10}};
  std::vector<int> which;
  if (argc > 1)
    which.push_back(std::atoi(argv[1]));
  else
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  bool all = true;
  for (int i : which) {
    if (i < 1 || i > 10) {
      std::cerr << "criterion must be 1..10\n";
      return 1;
    }
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i - 1].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.log << "  error: " << e.what() << "\n";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i << ": " << criteria[i - 1].first << " (" << secs
              << " s)\n"
              << o.log.str() << std::flush;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
