#include "catch_amalgamated.hpp"
#include "npi/kernels.hpp"

using namespace npi;
using Catch::Approx;

TEST_CASE("kernel values") {
  CHECK(eval(uniform_ball(2, 1.0), Vec{}, Vec{0.5, 0}) == Approx(1.0 / kPi).epsilon(1e-14));
  CHECK(eval(sign_changing(2, 1.0, 0.0, SigmaPattern{}, 1.0, 2.0), Vec{}, Vec{0.5, 0}) ==
        Approx(1.0 / kPi).epsilon(1e-14));
  CHECK(eval(uniform_ball(2, 1.0), Vec{}, Vec{1.5, 0}) == 0.0);
  CHECK(eval(half_ball_cone(1, 0.5, unit(0)), Vec{0.3}, Vec{0.25}) == Approx(2.0));
  CHECK(eval(half_ball_cone(1, 0.5, unit(0)), Vec{0.3}, Vec{-0.25}) == 0.0);
  // shrinking half-ball: radius delta(1 - shrink sin^2(pi x1))
  CHECK(eval(half_ball_cone(1, 0.5, unit(0), 0.1), Vec{0.5}, Vec{0.44}) == Approx(1.0 / 0.45));
  CHECK(eval(half_ball_cone(1, 0.5, unit(0), 0.1), Vec{0.5}, Vec{0.46}) == 0.0);
  CHECK(eval(half_ball_cone(1, 0.5, unit(0), 0.1), Vec{1.0}, Vec{0.46}) == Approx(2.0));
  // alpha = 0.5, n = 1, delta = 1: rho = (n - alpha)/(n |B|) |z|^-alpha
  CHECK(eval(sign_changing(1, 1.0, 0.5, SigmaPattern{}, 1.0, 3.0), Vec{}, Vec{0.25}) == Approx(0.5));
  CHECK_THROWS_AS(eval(sign_changing(1, 1.0, 0.5, SigmaPattern{}, 1.0, 3.0), Vec{}, Vec{}), Error);
}

TEST_CASE("kernel constructors check their parameters") {
  CHECK_THROWS_AS(uniform_ball(2, 0.0), Error);
  CHECK_THROWS_AS(uniform_annulus(2, 0.5, 0.25), Error);
  CHECK_THROWS_AS(sign_changing(2, 1.0, 1.5, SigmaPattern{}, 1.0, 2.0), Error);
  // pattern mean must equal tau
  CHECK_THROWS_AS(sign_changing(2, 1.0, 0.0, checkerboard(8, {0}), 1.0, 2.0), Error);
  CHECK_NOTHROW(sign_changing(2, 1.0, 0.0, checkerboard(8, {0}), 0.75, 2.0));
  CHECK_THROWS_AS(laminate(0.5, 0.6, kPi / 4, 2.0), Error);
}

TEST_CASE("sign patterns") {
  SigmaPattern p = checkerboard(8, {0});
  CHECK(p.mean(2) == Approx(0.75));
  CHECK(p.sigma(Vec{1, 0.1}) == -1.0);
  CHECK(p.sigma(Vec{1, -0.1}) == 1.0);
  CHECK(p.sigma(Vec{-1, 0.1}) == 1.0);
  CHECK(checkerboard(4, {0, 1}).mean(2) == Approx(0.0));
  CHECK(SigmaPattern{}.mean(1) == 1.0);
}

TEST_CASE("supports") {
  auto s = support(half_ball_cone(2, 0.5, unit(0)), Vec{0.5, 0.5});
  CHECK(contains(s, Vec{0.2, 0.1}));
  CHECK_FALSE(contains(s, Vec{-0.2, 0.1}));
  CHECK_FALSE(contains(s, Vec{0.45, 0.3}));

  DomainConfig dom;
  dom.n = 2;
  dom.omega = box_region(make_box({-1, -1}, {1, 1}));
  dom.bounds = make_box({-1, -1}, {1, 1});
  dom.gamma = DistanceTarget{PointTarget{}};
  Kernel ds = distance_scaled(2, PointTarget{}, 0, 2.5, 1.0, 2.0);
  auto sd = support(ds, Vec{0.5, 0}, &dom);
  CHECK(contains(sd, Vec{-0.4, 0}));
  CHECK_FALSE(contains(sd, Vec{-0.6, 0}));
  auto far = support(ds, Vec{0.9, 0}, &dom);
  CHECK_FALSE(contains(far, Vec{0.2, 0}));  // leaves Omega

  Kernel lam = laminate(0.5, 0.1, kPi / 4, 2.0);
  DomainConfig ld;
  ld.n = 2;
  ld.omega = box_region(make_box({0, 0}, {2, 2}));
  ld.bounds = make_box({0, -1}, {2, 3});
  auto z1 = support(lam, Vec{0.5, 1.0}, &ld);
  auto z2 = support(lam, Vec{1.5, 1.0}, &ld);
  Vec z{0.3, 0.2};
  CHECK(contains(z1, z));
  CHECK_FALSE(contains(z2, z));
  CHECK(contains(z2, -1.0 * z));
  CHECK_FALSE(contains(z1, Vec{0.3, 0.05}));
}

TEST_CASE("normalization") {
  CHECK(normalize_check(uniform_ball(2, 1.0), Vec{}, 1.0 / 32) == Approx(1.0).epsilon(0.01));
  CHECK(normalize_check(uniform_ball(1, 0.5), Vec{}, 0.5 / 64) == Approx(1.0).epsilon(0.02));
  CHECK(normalize_check(sign_changing(2, 1.0, 0.5, SigmaPattern{}, 1.0, 2.0), Vec{}, 1.0 / 64) ==
        Approx(1.0).epsilon(0.02));
  CHECK(normalize_check(sign_changing(2, 1.0, 0.0, checkerboard(8, {0}), 0.75, 2.0), Vec{}, 1.0 / 64) ==
        Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(normalize_check(inverse_power(1, 0.25, 0.5, 2.0), Vec{}, 0.01), Error);
}

TEST_CASE("holder norm R") {
  CHECK(holder_norm_R(uniform_ball(2, 0.5), Vec{}, 2.0) == Approx(1.0 / (kPi * 0.25)));
  CHECK(holder_norm_R(sign_changing(2, 1.0, 0.0, SigmaPattern{}, 1.0, 2.0), Vec{}, 2.0) == Approx(1.0 / kPi));
  // high-precision radial integral of rho^2 over the unit disk
  CHECK(holder_norm_R(sign_changing(2, 1.0, 0.5, SigmaPattern{}, 1.0, 2.0), Vec{}, 2.0) ==
        Approx(0.35809862195676451).epsilon(1e-14));
  CHECK(holder_norm_R_numeric(sign_changing(2, 1.0, 0.5, SigmaPattern{}, 1.0, 2.0), Vec{}, 2.0, 1.0 / 64) ==
        Approx(0.35809862195676451).epsilon(0.02));
  CHECK(holder_norm_R_numeric(half_ball_cone(1, 0.5, unit(0)), Vec{}, 2.0, 0.5 / 128) == Approx(2.0).epsilon(0.02));
  CHECK(holder_norm_R(half_ball_cone(1, 0.5, unit(0)), Vec{}, 3.0) == Approx(2.0));
  CHECK_THROWS_AS(holder_norm_R_numeric(sign_changing(1, 1.0, 0.6, SigmaPattern{}, 1.0, 1.5), Vec{}, 3.0, 0.01),
                  Error);
}

TEST_CASE("origin cell integral") {
  // 1-D: int_{-h/2}^{h/2} |r|^-g dr
  double h = 0.1, g = 0.5;
  CHECK(origin_cell_integral(1, h, g, [](const Vec&) { return 1.0; }) ==
        Approx(2.0 * std::pow(h / 2, 1 - g) / (1 - g)));
  // 2-D with gamma = 0 is the cell area
  CHECK(origin_cell_integral(2, h, 0.0, [](const Vec&) { return 1.0; }) == Approx(h * h).epsilon(1e-6));
}
