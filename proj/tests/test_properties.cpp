#include "catch_amalgamated.hpp"
#include "npi/discrete.hpp"
#include "npi/dynamics.hpp"

using namespace npi;
using Catch::Approx;

namespace {

// Counter-based draws, reproducible per (seed, case).
struct Gen {
  uint64_t seed, i = 0;
  explicit Gen(uint64_t s) : seed(s) {}
  double unit() { return uniform01(seed, i++); }
  double range(double a, double b) { return a + (b - a) * unit(); }
  int integer(int a, int b) { return a + static_cast<int>(unit() * (b - a + 1)) % (b - a + 1); }
  Vec point(int n, double a, double b) {
    Vec v{};
    for (int k = 0; k < n; ++k) v[k] = range(a, b);
    return v;
  }
};

DistanceTarget random_target(Gen& g) {
  switch (g.integer(0, 3)) {
    case 0: return PointTarget{g.point(2, -1, 1)};
    case 1: return SegmentTarget{g.point(2, -1, 1), g.point(2, -1, 1)};
    case 2: return make_circle(g.point(2, -0.5, 0.5), g.range(0.2, 1.0));
    default: return make_hyperplane(1, {g.integer(0, 1)});
  }
}

RegionPtr random_region(Gen& g) {
  switch (g.integer(0, 4)) {
    case 0: return ball_region(g.point(2, -0.5, 0.5), g.range(0.1, 1.0));
    case 1: {
      double a = g.range(0.0, 0.5);
      return annulus_region(PointTarget{g.point(2, -0.5, 0.5)}, a, a + g.range(0.1, 0.6));
    }
    case 2: {
      double t = g.range(0, 2 * kPi);
      return cone_region(g.point(2, -0.5, 0.5), Vec{std::cos(t), std::sin(t)}, g.range(0.1, 1.4));
    }
    case 3: {
      double t = g.range(0, 2 * kPi);
      return half_space_region(g.point(2, -0.5, 0.5), Vec{std::cos(t), std::sin(t)});
    }
    default: {
      Vec a = g.point(2, -1, 0);
      return box_region(make_box({a[0], a[1]}, {a[0] + g.range(0.1, 1), a[1] + g.range(0.1, 1)}));
    }
  }
}

}  // namespace

TEST_CASE("orbit inequality holds on random lattice instances") {
  for (uint64_t c = 0; c < 60; ++c) {
    Gen g(100 + c);
    int n = g.integer(1, 2);
    int cells = n == 1 ? g.integer(8, 40) : g.integer(6, 14);
    Grid grid = make_grid(n == 1 ? make_box({0}, {1}) : make_box({0, 0}, {1, 1}), 1.0 / cells);
    std::vector<char> in(grid.size(), 0);
    double lo = g.range(0.0, 0.3), hi = g.range(0.6, 1.0);
    for (size_t i = 0; i < grid.size(); ++i) {
      Vec x = grid.center(i);
      bool ok = true;
      for (int k = 0; k < n; ++k) ok = ok && x[k] > lo && x[k] < hi;
      in[i] = ok;
    }
    ScalarField u(grid);
    for (size_t i = 0; i < grid.size(); ++i)
      if (in[i] && g.unit() < 0.5) u.values[i] = g.range(-2, 2);
    Vec zeta{};
    do {
      for (int k = 0; k < n; ++k) zeta[k] = g.integer(-3, 3) * grid.h;
    } while (norm(zeta) == 0.0);
    double p = g.range(1.0, 3.0);
    auto r = orbit_inequality_check(u, in, zeta, p);
    INFO("case " << c);
    CHECK(r.pass);
    CHECK(r.lhs <= r.rhs * (1 + 1e-12));
  }
}

TEST_CASE("distance is 1-Lipschitz and projections are idempotent") {
  Gen g(7);
  for (int c = 0; c < 400; ++c) {
    DistanceTarget t = random_target(g);
    Vec x = g.point(2, -2, 2), y = g.point(2, -2, 2);
    CHECK(std::abs(distance(t, x) - distance(t, y)) <= norm(x - y) + 1e-12);
    Vec px = projection(t, x);
    CHECK(distance(t, px) == Approx(0.0).margin(1e-12));
    CHECK(norm(projection(t, px) - px) <= 1e-12);
    CHECK(norm(x - px) == Approx(distance(t, x)).margin(1e-12));
  }
}

TEST_CASE("cell classification agrees with pointwise membership") {
  Gen g(11);
  for (int c = 0; c < 300; ++c) {
    RegionPtr r = random_region(g);
    Vec lo = g.point(2, -1.2, 1.0);
    double w = g.range(0.01, 0.3);
    Box cell = make_box({lo[0], lo[1]}, {lo[0] + w, lo[1] + w});
    Overlap o = classify(*r, cell);
    if (o == Overlap::Partial) continue;
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; b <= 6; ++b) {
        Vec x{lo[0] + w * (0.01 + 0.98 * a / 6), lo[1] + w * (0.01 + 0.98 * b / 6)};
        CHECK(contains(*r, x) == (o == Overlap::Inside));
      }
  }
}

TEST_CASE("control constant increases with nu") {
  Gen g(13);
  for (int c = 0; c < 40; ++c) {
    double p = g.range(1.1, 4.0), a = g.range(0.02, 0.9), b = g.range(0.02, 0.9);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) continue;
    CHECK(control_constant(a, p) < control_constant(b, p));
  }
}

TEST_CASE("form is nonnegative for any p") {
  DomainConfig dom;
  dom.n = 1;
  dom.omega = box_region(make_box({0}, {1}));
  dom.bounds = make_box({0}, {1});
  Grid grid = make_grid(dom.bounds, 1.0 / 64);
  Gen g(17);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    auto F = assemble_form(grid, inverse_power(1, 0.1, 0.3, p), p, dom, 4);
    for (int c = 0; c < 10; ++c) {
      std::vector<double> u(grid.size());
      for (double& v : u) v = g.range(-1, 1);
      CHECK(F(u) >= 0.0);
    }
  }
}

TEST_CASE("points outside the active set are fixed by every flow") {
  DomainConfig dom;
  dom.n = 2;
  dom.omega = box_region(make_box({0, 0}, {1, 1}));
  dom.bounds = make_box({0, 0}, {1, 1});
  std::vector<FlowSpec> flows{TranslationFlow{}, MatrixFieldFlow{ScaleField{1.0, 0.2, unit(0), 0.8, 1.2}},
                              LaminateFlow{0.5, 0.1, kPi / 4, 0.5}, radial_contraction(0.1, Vec{0.5, 0.5})};
  Gen g(19);
  for (int c = 0; c < 200; ++c) {
    Vec x = g.point(2, -1, 2), z = g.point(2, -0.1, 0.1);
    for (const auto& f : flows) {
      if (flow_active(f, x, dom)) continue;
      Vec y = step(f, x, z, dom);
      CHECK(y == x);
    }
  }
  // centre ball of the radial flow is frozen
  Vec c{0.55, 0.5};
  CHECK(step(flows[3], c, Vec{0.05, 0.0}, dom) == c);
}

TEST_CASE("absorption index is monotone in the absorbing set") {
  DomainConfig dom;
  dom.n = 2;
  dom.omega = box_region(make_box({0, 0}, {1, 1}));
  dom.bounds = make_box({0, 0}, {1, 1});
  auto U1 = complement(dom.omega, make_box({-5, -5}, {5, 5}));
  Gen g(23);
  for (int c = 0; c < 200; ++c) {
    auto U2 = unite({U1, ball_region(g.point(2, 0, 1), g.range(0.05, 0.5))});
    Vec x = g.point(2, 0, 1), z = g.point(2, -0.2, 0.2);
    if (norm(z) < 0.01) continue;
    auto a1 = absorption_index(TranslationFlow{}, x, z, *U1, dom);
    auto a2 = absorption_index(TranslationFlow{}, x, z, *U2, dom);
    REQUIRE(a1.has_value());
    REQUIRE(a2.has_value());
    CHECK(*a2 <= *a1);
  }
}

TEST_CASE("1-D translation absorbs at the ceiling formula") {
  DomainConfig dom;
  dom.n = 1;
  dom.omega = box_region(make_box({0}, {1}));
  dom.bounds = make_box({0}, {1});
  auto U = complement(dom.omega, make_box({-5}, {5}));
  Gen g(29);
  for (int c = 0; c < 500; ++c) {
    double x = g.range(0, 1), z = g.range(0.01, 0.5);
    auto a = absorption_index(TranslationFlow{}, Vec{x}, Vec{z}, *U, dom);
    REQUIRE(a.has_value());
    double q = (1.0 - x) / z;
    if (std::abs(q - std::round(q)) < 1e-9) continue;
    CHECK(*a == static_cast<int>(std::ceil(q)));
    CHECK(*a <= static_cast<int>(std::ceil(1.0 / z)));
  }
}

TEST_CASE("radial contraction is injective and moves points inward") {
  DomainConfig dom;
  dom.n = 2;
  dom.omega = box_region(make_box({-1, -1}, {1, 1}));
  dom.bounds = make_box({-1, -1}, {1, 1});
  const double eps = 0.1;
  FlowSpec f = radial_contraction(eps);
  Gen g(31);
  for (int c = 0; c < 300; ++c) {
    double r = eps * std::sqrt(g.unit()), t = g.range(0, 2 * kPi);
    Vec z{r * std::cos(t), r * std::sin(t)};
    Vec x1 = g.point(2, -1, 1), x2 = g.point(2, -1, 1);
    if (!flow_active(f, x1, dom) || !flow_active(f, x2, dom)) continue;
    Vec y1 = step(f, x1, z, dom), y2 = step(f, x2, z, dom);
    CHECK(norm(y1) < norm(x1));
    if (norm(x1 - x2) > 1e-9) CHECK(norm(y1 - y2) > 0.0);
    CHECK(jacobian_det(f, x1, z, 2) > 1.0 / 9.0);
  }
}

TEST_CASE("kernel values vanish exactly off the support") {
  std::vector<Kernel> ks{uniform_ball(2, 0.5), uniform_annulus(2, 0.1, 0.5), half_ball_cone(2, 0.5, unit(0)),
                         half_ball_cone(2, 0.5, unit(1), 0.3), sign_changing(2, 0.5, 0.3, checkerboard(4, {0}), 0.5, 2.0),
                         inverse_power(2, 0.1, 0.4, 2.0)};
  Gen g(37);
  for (const auto& k : ks)
    for (int c = 0; c < 300; ++c) {
      Vec x = g.point(2, 0, 1), z = g.point(2, -0.6, 0.6);
      if (norm(z) < 1e-6) continue;
      double v = eval(k, x, z);
      bool in = contains(*support(k, x), z);
      CHECK((v != 0.0) == in);
    }
}

TEST_CASE("sign-changing kernels follow the sector pattern") {
  SigmaPattern pat = checkerboard(8, {0, 3});
  Kernel k = sign_changing(2, 1.0, 0.2, pat, pat.mean(2), 2.0);
  Gen g(41);
  for (int c = 0; c < 300; ++c) {
    Vec z = g.point(2, -0.7, 0.7);
    if (norm(z) >= 1.0 || norm(z) < 1e-6) continue;
    double v = eval(k, Vec{}, z);
    CHECK(v * pat.sigma(z) > 0.0);
  }
}

TEST_CASE("holder R grows with the singularity exponent") {
  double prev = 0.0;
  for (double a : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    double r = holder_norm_R(sign_changing(2, 1.0, a, SigmaPattern{}, 1.0, 2.0), Vec{}, 2.0);
    CHECK(r > prev);
    prev = r;
  }
}
