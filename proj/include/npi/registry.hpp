#pragma once

#include <functional>

#include "npi/discrete.hpp"
#include "npi/dynamics.hpp"

namespace npi {

enum class Inequality { GradientI, FormII, None };

struct ExampleConfig {
  std::string name, description;
  int n = 1;
  double p = 2.0;
  DomainConfig domain;
  std::optional<Kernel> kernel;
  Inequality form = Inequality::None;
  WeightSpec rhs_weight = ConstantOne{};
  double rhs_scale = 1.0;
  std::optional<Bound> bound;
  std::string bound_name;
  double tol = 0.05;
  int grid = 64;  // cells across the widest side of Omega
  int subsample = 4;
  TestFunctionOptions tf;
  int trials = 100;

  std::optional<WeightSpec> jensen_weight;
  std::optional<CorrSpec> corr;
  std::function<double(const Vec&)> R_field;
  double jensen_nu = kInf;
  double ladder_scale = 0.0;
  int jensen_samples = 256;
  double jensen_resolution = 1.0 / 64;

  std::optional<FlowSpec> flow;
  RegionPtr phi, absorbing, omega_prime;
  int phi_grid = 200;

  Params params;
};

// Grid with spacing (widest side of Omega)/N, aligned to Omega's lower corner
// and covering the domain bounds.
inline Grid config_grid(const ExampleConfig& c, int N) {
  require(N >= 2, "grid resolution must be at least 2");
  const int n = c.n;
  Box ob = bbox(*c.domain.omega, n);
  require(ob.finite(), "Omega needs a finite bounding box");
  double ext = 0.0;
  for (int i = 0; i < n; ++i) ext = std::max(ext, ob.hi[i] - ob.lo[i]);
  double h = ext / N;
  Grid g;
  g.n = n;
  g.h = h;
  for (int i = 0; i < n; ++i) {
    int below = static_cast<int>(std::ceil((ob.lo[i] - c.domain.bounds.lo[i]) / h - 1e-9));
    g.origin[i] = ob.lo[i] - below * h;
    g.dims[i] = std::max(1, static_cast<int>(std::ceil((c.domain.bounds.hi[i] - g.origin[i]) / h - 1e-9)));
  }
  return g;
}

inline double diameter_of_box(const Box& b) {
  double s = 0.0;
  for (int i = 0; i < b.dim; ++i) s += (b.hi[i] - b.lo[i]) * (b.hi[i] - b.lo[i]);
  return std::sqrt(s);
}

namespace reg {

inline Box interval(double a, double b) { return make_box({a}, {b}); }
inline Box square(double a, double b) { return make_box({a, a}, {b, b}); }

inline DomainConfig domain(int n, const Box& omega, const Box& bounds) {
  DomainConfig d;
  d.n = n;
  d.omega = box_region(omega);
  d.bounds = bounds;
  return d;
}

// Gamma = bounds minus Omega.
inline DomainConfig collar_domain(int n, const Box& omega, const Box& bounds) {
  DomainConfig d = domain(n, omega, bounds);
  d.gamma = complement(d.omega, bounds);
  return d;
}

inline RegionPtr outside_of(const DomainConfig& d, double margin) {
  return complement(d.omega, expand_box(d.bounds, margin));
}

inline Params with_defaults(Params defaults, const Params& overrides) {
  defaults.merge(overrides);
  return defaults;
}

inline ExampleConfig basic_ex1(int n, const Params& over) {
  Params P = with_defaults({{"delta", n == 1 ? 0.5 : 0.25}, {"p", 2}, {"grid", n == 1 ? 128 : 32}}, over);
  ExampleConfig c;
  c.name = n == 1 ? "basic-ex1-1d" : "basic-ex1-2d";
  c.description = "forward half-ball averages, affine weight, gradient form";
  c.n = n;
  c.p = P.at("p");
  double delta = P.at("delta");
  Box om = n == 1 ? interval(0, 1) : square(0, 1);
  Box bounds = n == 1 ? interval(0, 1 + delta) : make_box({0, -delta}, {1 + delta, 1 + delta});
  c.domain = collar_domain(n, om, bounds);
  c.kernel = half_ball_cone(n, delta, unit(0));
  c.form = Inequality::GradientI;
  c.rhs_scale = 1.0 / delta;
  double diam = diameter_of_box(om);
  c.bound = basic_ex1_bound(n, diam);
  c.bound_name = "basic-ex1";
  c.grid = static_cast<int>(P.at("grid"));
  c.jensen_weight = AffineDrift{unit(0), 1.0};
  c.corr = ForwardHalfBall{delta, unit(0)};
  Kernel k = *c.kernel;
  double p = c.p;
  c.R_field = [k, p](const Vec& x) { return holder_norm_R(k, x, p); };
  c.jensen_nu = 1.0 - eta(n) * delta / (1.0 + diam);
  c.params = P;
  return c;
}

inline ExampleConfig basic_ex1_ext(const Params& over) {
  Params P = with_defaults({{"delta", 0.5}, {"shrink", 0.1}, {"p", 2}, {"grid", 128}}, over);
  ExampleConfig c;
  c.name = "basic-ex1-ext-1d";
  c.description = "half-ball averages with varying radius, unscaled gradient form";
  c.n = 1;
  c.p = P.at("p");
  double delta = P.at("delta"), shrink = P.at("shrink");
  c.domain = collar_domain(1, interval(0, 1), interval(0, 1 + delta));
  c.kernel = half_ball_cone(1, delta, unit(0), shrink);
  c.form = Inequality::GradientI;
  double tau = 1.0 - shrink;
  c.bound = basic_ex1_ext_bound(1, c.p, delta, 1.0, tau);
  c.bound_name = "basic-ex1-ext";
  c.grid = static_cast<int>(P.at("grid"));
  c.params = P;
  return c;
}

inline ExampleConfig basic_ex2(int n, const Params& over) {
  Params P = n == 1 ? with_defaults({{"eps", 0.25}, {"delta", 0.5}, {"p", 2}, {"grid", 256}}, over)
                    : with_defaults({{"eps", 0.125}, {"delta", 0.25}, {"p", 2}, {"grid", 64}}, over);
  ExampleConfig c;
  c.name = n == 1 ? "basic-ex2-1d" : "basic-ex2-2d";
  c.description = "inverse-power kernel on a fixed annulus, translation flow";
  c.n = n;
  c.p = P.at("p");
  double eps = P.at("eps"), delta = P.at("delta");
  Box om = n == 1 ? interval(0, 1) : square(0, 1);
  c.domain = domain(n, om, om);
  bool half = n == 1;
  c.kernel = inverse_power(n, eps, delta, c.p, half);
  c.form = Inequality::FormII;
  c.bound = basic_ex2_bound(diameter_of_box(om), c.p);
  c.bound_name = "basic-ex2";
  c.tol = 1e-10;
  c.grid = static_cast<int>(P.at("grid"));
  c.flow = TranslationFlow{};
  c.phi = half ? box_region(interval(eps, delta)) : annulus_region(PointTarget{}, eps, delta);
  c.absorbing = outside_of(c.domain, 2.0);
  c.omega_prime = c.domain.omega;
  c.phi_grid = n == 1 ? 1000 : 40;
  c.params = P;
  return c;
}

inline ExampleConfig sign_change1(int n, const Params& over) {
  Params P = n == 1 ? with_defaults({{"delta", 0.6}, {"alpha", 0.1}, {"p", 2}, {"L", 1.2}, {"grid", 96}}, over)
                    : with_defaults({{"delta", 0.5}, {"alpha", 0.1}, {"p", 2}, {"L", 1.0}, {"grid", 24}}, over);
  ExampleConfig c;
  c.name = n == 1 ? "sign-change1-1d" : "sign-change1-2d";
  c.description = "singular ball kernel, quadratic-cap weight";
  c.n = n;
  c.p = P.at("p");
  double delta = P.at("delta"), alpha = P.at("alpha"), L = P.at("L");
  Box om = n == 1 ? interval(0, L) : square(0, L);
  c.domain = collar_domain(n, om, expand_box(om, delta));
  c.kernel = sign_changing(n, delta, alpha, SigmaPattern{}, 1.0, c.p);
  c.form = Inequality::GradientI;
  double diam = diameter_of_box(om);
  c.bound = sign_change1_bound(n, c.p, alpha, 1.0, delta, diam);
  c.bound_name = "sign-change1";
  c.grid = static_cast<int>(P.at("grid"));
  c.jensen_weight = QuadraticCap{om.center(), diam};
  c.corr = BallCorr{delta};
  Kernel k = *c.kernel;
  double p = c.p;
  c.R_field = [k, p](const Vec& x) { return holder_norm_R(k, x, p); };
  c.jensen_nu = sign_change1_nu(n, c.p, alpha, 1.0, delta, diam);
  c.jensen_samples = n == 1 ? 256 : 400;
  c.params = P;
  return c;
}

inline ExampleConfig sign_change2(int n, const Params& over) {
  Params P = n == 1
                 ? with_defaults({{"delta", 1.0}, {"alpha", 0.25}, {"p", 2}, {"sectors", 1}, {"flipped", 0}, {"grid", 64}}, over)
                 : with_defaults({{"delta", 1.0}, {"alpha", 0.0}, {"p", 2}, {"sectors", 8}, {"flipped", 1}, {"grid", 16}}, over);
  ExampleConfig c;
  c.name = n == 1 ? "sign-change2-1d" : "sign-change2-2d";
  c.description = "sign-changing ball kernel, constant weight";
  c.n = n;
  c.p = P.at("p");
  double delta = P.at("delta"), alpha = P.at("alpha");
  int sectors = static_cast<int>(P.at("sectors")), nflip = static_cast<int>(P.at("flipped"));
  std::vector<int> flipped;
  for (int i = 0; i < nflip; ++i) flipped.push_back(i);
  SigmaPattern sig = nflip > 0 ? checkerboard(sectors, flipped) : SigmaPattern{};
  double tau = sig.mean(n);
  Box om = n == 1 ? interval(0, 1) : square(0, 1);
  c.domain = collar_domain(n, om, expand_box(om, delta));
  c.kernel = sign_changing(n, delta, alpha, sig, tau, c.p);
  c.form = Inequality::GradientI;
  c.bound = sign_change2_bound(n, c.p, alpha, tau, delta, om.volume());
  c.bound_name = "sign-change2";
  c.grid = static_cast<int>(P.at("grid"));
  c.jensen_weight = ConstantOne{};
  c.corr = BallCorr{delta};
  Kernel k = *c.kernel;
  double p = c.p;
  c.R_field = [k, p](const Vec& x) { return holder_norm_R(k, x, p); };
  c.jensen_nu = c.bound->factor("nu_delta");
  c.params = P;
  return c;
}

inline ExampleConfig gflow(int n, const Params& over) {
  Params P = n == 1 ? with_defaults({{"eps", 0.25}, {"delta", 0.5}, {"c1", 0.5}, {"p", 2}, {"grid", 128}}, over)
                    : with_defaults({{"eps", 0.125}, {"delta", 0.25}, {"c1", 0.5}, {"p", 2}, {"grid", 48}}, over);
  ExampleConfig c;
  c.name = n == 1 ? "gflow-1d" : "gflow-2d";
  c.description = "matrix-field flow kernel c(x) Phi";
  c.n = n;
  c.p = P.at("p");
  double eps = P.at("eps"), delta = P.at("delta"), c1 = P.at("c1");
  Box om = n == 1 ? interval(0, 1) : square(0, 1);
  c.domain = domain(n, om, om);
  ScaleField sf{1.0, c1, unit(0), 1.0, 1.0 + std::abs(c1)};
  double lambda0 = 1.0 / std::pow(sf.lo, n);
  bool half = n == 1;
  c.kernel = flow_inverse_power(n, eps, delta, c.p, half, sf, lambda0);
  c.form = Inequality::FormII;
  double K = sf.lipschitz(), R = delta, diam = diameter_of_box(om);
  gate(K * R <= 1.0, "KR <= 1");
  gate(n * K * R < 1.0, "nKR < 1");
  double S = diam / sf.lo + R;
  c.bound = gflow_bound(c.p, S, 1.0, n * K, 1.0);
  c.bound->factors.push_back({"S", S});
  c.bound->factors.push_back({"Lambda0", lambda0});
  c.bound_name = "gflow";
  c.grid = static_cast<int>(P.at("grid"));
  c.flow = MatrixFieldFlow{sf};
  c.phi = half ? box_region(interval(eps, delta)) : annulus_region(PointTarget{}, eps, delta);
  c.absorbing = outside_of(c.domain, 2.0);
  c.omega_prime = c.domain.omega;
  c.phi_grid = n == 1 ? 1000 : 40;
  c.params = P;
  return c;
}

inline ExampleConfig discontinuous(const Params& over) {
  Params P = with_defaults({{"delta1", 0.5}, {"delta2", 0.1}, {"theta", kPi / 4}, {"p", 2}, {"grid", 32}}, over);
  ExampleConfig c;
  c.name = "discontinuous";
  c.description = "laminate kernel with an interface strip";
  c.n = 2;
  c.p = P.at("p");
  double d1 = P.at("delta1"), d2 = P.at("delta2"), th = P.at("theta");
  Box om = square(0, 2);
  c.domain = domain(2, om, make_box({0, -1}, {2, 3}));
  RegionPtr strips = unite({box_region(make_box({1 - d1, -1}, {1 + d1, 0})), box_region(make_box({1 - d1, 2}, {1 + d1, 3}))});
  c.domain.gamma = strips;
  c.kernel = laminate(d1, d2, th, c.p, 1.0);
  c.form = Inequality::FormII;
  c.bound = discontinuous_bound(c.p, d1, d2, th, 1.0);
  c.bound_name = "discontinuous";
  c.grid = static_cast<int>(P.at("grid"));
  c.flow = LaminateFlow{d1, d2, th, 1.0};
  const auto& lk = std::get<LaminateKernel>(c.kernel->spec);
  c.phi = intersect({laminate_cell(lk, false), half_space_region(d2 * unit(1), unit(1)),
                     box_region(make_box({0, d2}, {d1, d1 * std::tan(th)}))});
  c.absorbing = strips;
  c.omega_prime = box_region(square(0, 1));
  c.phi_grid = 64;
  c.params = P;
  return c;
}

inline ExampleConfig lowdim(bool circle, const Params& over) {
  Params P = circle ? with_defaults({{"beta", 1.5}, {"delta0", 0.25}, {"radius", 0.5}, {"p", 2}, {"s", 0.5}, {"grid", 64}}, over)
                    : with_defaults({{"beta", 2.5}, {"delta0", 0.25}, {"p", 2}, {"s", 0.5}, {"eps", 0.1}, {"grid", 64}}, over);
  ExampleConfig c;
  c.name = circle ? "lowdim-circle" : "lowdim-point";
  c.description = "distance-scaled averages with a zero condition on a lower-dimensional set";
  c.n = 2;
  c.p = P.at("p");
  Box om = square(-1, 1);
  c.domain = domain(2, om, om);
  int m = circle ? 1 : 0;
  DistanceTarget t = circle ? make_circle(Vec{}, P.at("radius")) : DistanceTarget{PointTarget{}};
  c.domain.gamma = t;
  double beta = P.at("beta");
  c.kernel = distance_scaled(2, t, m, beta, P.at("delta0"), c.p);
  c.form = Inequality::FormII;
  c.grid = static_cast<int>(P.at("grid"));
  c.tf.family = TestFamily::DistanceModulated;
  c.tf.s = P.at("s");
  c.tf.beta = beta;
  c.tf.m = m;
  c.tf.p = c.p;
  if (!circle) {
    double eps = P.at("eps");
    c.flow = radial_contraction(eps);
    c.phi = ball_region(Vec{}, eps);
    c.absorbing = ball_region(Vec{}, 2 * eps);
    c.omega_prime = c.domain.omega;
    c.phi_grid = 16;
  }
  c.params = P;
  return c;
}

// Jensen-only configurations around a point constraint.
inline ExampleConfig point_weights(bool cap, const Params& over) {
  Params P = with_defaults({{"beta", 3}, {"b", 0.5}, {"theta", kPi / 4}, {"scale", 2}}, over);
  ExampleConfig c;
  c.name = cap ? "ball-cap" : "cone-tube";
  c.description = "distance-power weight with shrinking correspondences around a point";
  c.n = 2;
  Box om = square(-1, 1);
  c.domain = domain(2, om, om);
  DistanceTarget t = PointTarget{};
  c.domain.gamma = t;
  double beta = P.at("beta"), b = P.at("b");
  c.jensen_weight = DistancePower{t, beta, P.at("scale")};
  c.corr = cap ? ball_cap(b, t, 0) : cone_tube(b, P.at("theta"), t, 0, 2);
  CorrSpec corr = *c.corr;
  c.R_field = [corr](const Vec& x) { return 1.0 / psi_measure(corr, x, 2); };
  if (!cap) {
    double K4 = lowdim_K4(0, 2, P.at("theta"), cone_measure_analytic(0, 2, P.at("theta")));
    c.jensen_nu = dist_class_bound(2, 0.5 * b, b, 2, 2, beta, K4, 1.0, 1.0);
  }
  c.ladder_scale = 1.0;
  c.jensen_samples = 400;
  c.jensen_resolution = 1.0 / 32;
  c.params = P;
  return c;
}

}  // namespace reg

using Builder = std::function<ExampleConfig(const Params&)>;

inline const std::vector<std::pair<std::string, Builder>>& registry() {
  static const std::vector<std::pair<std::string, Builder>> r = {
      {"basic-ex1-1d", [](const Params& p) { return reg::basic_ex1(1, p); }},
      {"basic-ex1-2d", [](const Params& p) { return reg::basic_ex1(2, p); }},
      {"basic-ex1-ext-1d", [](const Params& p) { return reg::basic_ex1_ext(p); }},
      {"basic-ex2-1d", [](const Params& p) { return reg::basic_ex2(1, p); }},
      {"basic-ex2-2d", [](const Params& p) { return reg::basic_ex2(2, p); }},
      {"sign-change1-1d", [](const Params& p) { return reg::sign_change1(1, p); }},
      {"sign-change1-2d", [](const Params& p) { return reg::sign_change1(2, p); }},
      {"sign-change2-1d", [](const Params& p) { return reg::sign_change2(1, p); }},
      {"sign-change2-2d", [](const Params& p) { return reg::sign_change2(2, p); }},
      {"gflow-1d", [](const Params& p) { return reg::gflow(1, p); }},
      {"gflow-2d", [](const Params& p) { return reg::gflow(2, p); }},
      {"discontinuous", [](const Params& p) { return reg::discontinuous(p); }},
      {"lowdim-point", [](const Params& p) { return reg::lowdim(false, p); }},
      {"lowdim-circle", [](const Params& p) { return reg::lowdim(true, p); }},
      {"cone-tube", [](const Params& p) { return reg::point_weights(false, p); }},
      {"ball-cap", [](const Params& p) { return reg::point_weights(true, p); }},
  };
  return r;
}

inline ExampleConfig load_example(const std::string& name, const Params& overrides = {}) {
  for (const auto& [k, b] : registry())
    if (k == name) return b(overrides);
  throw Error(ErrorKind::Config, "unknown example '" + name + "'");
}

}  // namespace npi
