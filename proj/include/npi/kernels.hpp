#pragma once

#include <functional>

#include "npi/constants.hpp"
#include "npi/geometry.hpp"

namespace npi {

// c(x) = clamp(c0 + c1 (x . dir), lo, hi); Lipschitz constant |c1|.
struct ScaleField {
  double c0 = 1.0, c1 = 0.0;
  Vec dir{1, 0, 0};
  double lo = 0.0, hi = kInf;

  double operator()(const Vec& x) const { return std::clamp(c0 + c1 * dot(x, dir), lo, hi); }
  double lipschitz() const { return std::abs(c1); }
};

// Piecewise-constant sign pattern on the unit sphere: k equal azimuthal sectors,
// half-open [2 pi j/k, 2 pi (j+1)/k), with the listed sectors set to -1.
struct SigmaPattern {
  int sectors = 1;
  std::vector<int> flipped;

  double sigma(const Vec& z) const {
    if (flipped.empty()) return 1.0;
    double phi = std::atan2(z[1], z[0]);
    if (phi < 0.0) phi += 2.0 * kPi;
    int s = std::min(sectors - 1, static_cast<int>(std::floor(phi / (2.0 * kPi / sectors))));
    return std::find(flipped.begin(), flipped.end(), s) != flipped.end() ? -1.0 : 1.0;
  }

  // Mean of sigma over the unit sphere in R^n.
  double mean(int n) const {
    if (n == 1) return 0.5 * (sigma(Vec{1, 0, 0}) + sigma(Vec{-1, 0, 0}));
    return static_cast<double>(sectors - 2 * static_cast<int>(flipped.size())) / sectors;
  }
};

inline SigmaPattern checkerboard(int sectors, std::vector<int> flipped) {
  require(sectors >= 1, "sector count must be positive");
  std::sort(flipped.begin(), flipped.end());
  flipped.erase(std::unique(flipped.begin(), flipped.end()), flipped.end());
  for (int s : flipped) require(s >= 0 && s < sectors, "flipped sector out of range");
  return {sectors, flipped};
}

struct UniformBallKernel {
  double delta;
};
struct UniformAnnulusKernel {
  double eps, delta;
};
// Half ball in direction `axis`; radius delta (1 - shrink sin^2(pi x.axis)).
struct HalfBallConeKernel {
  double delta;
  Vec axis{1, 0, 0};
  double shrink = 0.0;
};
struct SignChangingKernel {
  double delta, alpha;
  SigmaPattern pattern;
  double tau;
};
struct DistanceScaledKernel {
  DistanceTarget target;
  double beta, delta0, p;
  int m;
};
struct InversePowerKernel {
  double eps, delta, p;
  bool half = false;
};
struct LaminateKernel {
  double delta1, delta2, theta, p;
  double interface = 1.0;
};
// ||z||^{-p} Lambda0/|Phi| on c(x) Phi with Phi an annulus (or its e1 half).
struct FlowInversePowerKernel {
  double eps, delta, p;
  bool half = false;
  ScaleField scale;
  double lambda0 = 1.0;
};

using KernelSpec = std::variant<UniformBallKernel, UniformAnnulusKernel, HalfBallConeKernel, SignChangingKernel,
                                DistanceScaledKernel, InversePowerKernel, LaminateKernel, FlowInversePowerKernel>;

struct Kernel {
  KernelSpec spec;
  int n = 1;
};

inline Kernel uniform_ball(int n, double delta) {
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(delta > 0.0, "delta must be positive");
  return {UniformBallKernel{delta}, n};
}

inline Kernel uniform_annulus(int n, double eps, double delta) {
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(eps >= 0.0 && eps < delta, "need 0 <= eps < delta");
  return {UniformAnnulusKernel{eps, delta}, n};
}

inline Kernel half_ball_cone(int n, double delta, const Vec& axis, double shrink = 0.0) {
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(delta > 0.0, "delta must be positive");
  require(std::abs(norm(axis) - 1.0) <= 1e-12, "axis must be a unit vector");
  require(shrink >= 0.0 && shrink < 1.0, "shrink must lie in [0,1)");
  return {HalfBallConeKernel{delta, axis, shrink}, n};
}

inline Kernel sign_changing(int n, double delta, double alpha, const SigmaPattern& pattern, double tau, double p) {
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(delta > 0.0, "delta must be positive");
  require(tau > 0.0 && tau <= 1.0, "tau must lie in (0,1]");
  require(std::abs(pattern.mean(n) - tau) <= 1e-12, "sigma pattern mean does not equal tau");
  require(alpha >= 0.0, "alpha must be nonnegative");
  double q = conjugate_exponent(p);
  require(p == 1.0 ? alpha == 0.0 : alpha < n / q, "sign-changing kernel needs alpha < n/q");
  return {SignChangingKernel{delta, alpha, pattern, tau}, n};
}

inline Kernel distance_scaled(int n, const DistanceTarget& target, int m, double beta, double delta0, double p) {
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(m >= 0 && m < n, "target dimension must lie in [0, n)");
  require(delta0 > 0.0 && p >= 1.0, "need delta0 > 0 and p >= 1");
  require(beta > n - m, "distance-scaled kernel needs beta > n - m");
  return {DistanceScaledKernel{target, beta, delta0, p, m}, n};
}

inline Kernel inverse_power(int n, double eps, double delta, double p, bool half = false) {
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(eps > 0.0 && eps < delta, "inverse-power kernel needs 0 < eps < delta");
  require(p >= 1.0, "p must be >= 1");
  return {InversePowerKernel{eps, delta, p, half}, n};
}

inline Kernel laminate(double delta1, double delta2, double theta, double p, double interface = 1.0) {
  require(theta > 0.0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
  require(delta1 > 0.0 && delta2 > 0.0 && delta2 < delta1 * std::tan(theta), "need 0 < delta2 < delta1 tan(theta)");
  require(p >= 1.0, "p must be >= 1");
  return {LaminateKernel{delta1, delta2, theta, p, interface}, 2};
}

inline Kernel flow_inverse_power(int n, double eps, double delta, double p, bool half, const ScaleField& c, double lambda0) {
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(eps > 0.0 && eps < delta, "need 0 < eps < delta");
  require(c.lo > 0.0, "scale field must be bounded below by a positive constant");
  require(lambda0 > 0.0 && p >= 1.0, "need lambda0 > 0 and p >= 1");
  return {FlowInversePowerKernel{eps, delta, p, half, c, lambda0}, n};
}

inline const char* kernel_name(const Kernel& k) {
  static const char* names[] = {"uniform_ball", "uniform_annulus", "half_ball_cone", "sign_changing",
                                "distance_scaled", "inverse_power", "laminate", "flow_inverse_power"};
  return names[k.spec.index()];
}

inline bool is_rho(const Kernel& k) { return k.spec.index() <= 3; }

inline bool is_singular(const Kernel& k) {
  auto* s = std::get_if<SignChangingKernel>(&k.spec);
  return s && s->alpha > 0.0;
}

// Kernels whose value is divided by the measure of the discrete support.
inline bool row_normalized(const Kernel& k) { return std::holds_alternative<DistanceScaledKernel>(k.spec); }

inline double ball_measure(int n, double r) { return unit_ball_volume(n) * std::pow(r, n); }

inline double half_ball_radius(const HalfBallConeKernel& h, const Vec& x) {
  double s = std::sin(kPi * dot(x, h.axis));
  return h.delta * (1.0 - h.shrink * s * s);
}

inline double distance_scaled_radius(const DistanceScaledKernel& d, const Vec& x) {
  return std::min(d.delta0, distance(d.target, x));
}

inline double laminate_measure(const LaminateKernel& l) { return laminate_support_area(l.delta1, l.delta2, l.theta); }

inline double annulus_measure(int n, double eps, double delta, bool half) {
  return (half ? 0.5 : 1.0) * unit_ball_volume(n) * (std::pow(delta, n) - std::pow(eps, n));
}

inline bool laminate_side_two(const LaminateKernel& l, const Vec& x) { return x[0] >= l.interface; }

inline RegionPtr laminate_cell(const LaminateKernel& l, bool side_two) {
  double s = side_two ? -1.0 : 1.0;
  Vec e1 = s * unit(0);
  return intersect({cone_region(Vec{}, e1, l.theta), half_space_region(l.delta1 * e1, -e1),
                    unite({half_space_region(l.delta2 * unit(1), unit(1)), half_space_region(-l.delta2 * unit(1), -unit(1))})});
}

// Support Z(x) in offset coordinates.
inline RegionPtr support(const Kernel& k, const Vec& x, const DomainConfig* dom = nullptr) {
  const int n = k.n;
  auto shifted_domain = [&](bool with_gamma) {
    require(dom != nullptr && dom->omega != nullptr, std::string(kernel_name(k)) + " support needs a domain");
    RegionPtr base = dom->omega;
    if (with_gamma && dom->gamma_region()) base = unite({dom->omega, dom->gamma_region()});
    return translate(base, -x);
  };
  return std::visit(
      overloaded{
          [&](const UniformBallKernel& b) { return ball_region(Vec{}, b.delta); },
          [&](const UniformAnnulusKernel& a) { return annulus_region(PointTarget{}, a.eps, a.delta); },
          [&](const HalfBallConeKernel& h) {
            return intersect({ball_region(Vec{}, half_ball_radius(h, x)), half_space_region(Vec{}, h.axis)});
          },
          [&](const SignChangingKernel& s) { return ball_region(Vec{}, s.delta); },
          [&](const DistanceScaledKernel& d) {
            double r = distance_scaled_radius(d, x);
            require(r > 0.0, "distance-scaled kernel evaluated on the constraint set");
            return intersect({ball_region(Vec{}, r), shifted_domain(false)});
          },
          [&](const InversePowerKernel& ip) {
            RegionPtr a = annulus_region(PointTarget{}, ip.eps, ip.delta);
            return ip.half ? intersect({a, half_space_region(Vec{}, unit(0))}) : a;
          },
          [&](const LaminateKernel& l) {
            return intersect({laminate_cell(l, laminate_side_two(l, x)), shifted_domain(true)});
          },
          [&](const FlowInversePowerKernel& f) {
            double c = f.scale(x);
            RegionPtr a = annulus_region(PointTarget{}, c * f.eps, c * f.delta);
            return f.half ? intersect({a, half_space_region(Vec{}, unit(0))}) : a;
          },
      },
      k.spec);
  (void)n;
}

// Kernel formula at (x, z) without the support indicator. For row-normalized
// families the normalizing measure is left out.
inline double density(const Kernel& k, const Vec& x, const Vec& z) {
  const int n = k.n;
  return std::visit(
      overloaded{
          [&](const UniformBallKernel& b) { return 1.0 / ball_measure(n, b.delta); },
          [&](const UniformAnnulusKernel& a) { return 1.0 / annulus_measure(n, a.eps, a.delta, false); },
          [&](const HalfBallConeKernel& h) { return 2.0 / ball_measure(n, half_ball_radius(h, x)); },
          [&](const SignChangingKernel& s) {
            double r = norm(z);
            double c = std::pow(s.delta, s.alpha) / (s.tau * ball_measure(n, s.delta)) * (n - s.alpha) / n;
            return c * std::pow(r, -s.alpha) * s.pattern.sigma(z);
          },
          [&](const DistanceScaledKernel& d) { return std::pow(distance_scaled_radius(d, x), -d.beta); },
          [&](const InversePowerKernel& ip) {
            return std::pow(norm(z), -ip.p) / annulus_measure(n, ip.eps, ip.delta, ip.half);
          },
          [&](const LaminateKernel& l) { return std::pow(std::abs(z[1]), -(l.p + 1.0)) / laminate_measure(l); },
          [&](const FlowInversePowerKernel& f) {
            return std::pow(norm(z), -f.p) * f.lambda0 / annulus_measure(n, f.eps, f.delta, f.half);
          },
      },
      k.spec);
}

// Measure of a region intersected with a box, by cell fractions on a
// res^n grid with 2^n stratified points per partial cell.
inline double region_measure_quadrature(const Region& r, const Box& box, int res) {
  Grid g = make_grid(box, (box.hi[0] - box.lo[0]) / res);
  double total = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    Box c = g.cell_box(i);
    total += cell_fraction(r, c, 2) * c.volume();
  }
  return total;
}

inline double eval(const Kernel& k, const Vec& x, const Vec& z, const DomainConfig* dom = nullptr) {
  if (is_singular(k)) require(norm(z) > 0.0, "singular kernel evaluated at z = 0");
  RegionPtr s = support(k, x, dom);
  if (!contains(*s, z)) return 0.0;
  double v = density(k, x, z);
  if (row_normalized(k)) {
    const auto& d = std::get<DistanceScaledKernel>(k.spec);
    double r = distance_scaled_radius(d, x);
    Box b;
    b.dim = k.n;
    for (int i = 0; i < k.n; ++i) {
      b.lo[i] = -r;
      b.hi[i] = r;
    }
    v /= region_measure_quadrature(*s, b, 64);
  }
  return v;
}

// Integral of r^{-gamma} s(phi) over the cell [-h/2, h/2]^n around the origin.
inline double origin_cell_integral(int n, double h, double gamma, const std::function<double(const Vec&)>& s) {
  require(gamma < n, "origin integral diverges");
  if (n == 1) return std::pow(h / 2.0, 1.0 - gamma) / (1.0 - gamma) * (s(Vec{1, 0, 0}) + s(Vec{-1, 0, 0}));
  require(n == 2, "exact origin-cell integral is implemented for n = 1, 2");
  const int M = 20000;
  double total = 0.0;
  for (int j = 0; j < M; ++j) {
    double phi = (j + 0.5) / M * 2.0 * kPi;
    double c = std::cos(phi), sn = std::sin(phi);
    double rmax = (h / 2.0) / std::max(std::abs(c), std::abs(sn));
    total += s(Vec{c, sn, 0}) * std::pow(rmax, 2.0 - gamma) / (2.0 - gamma);
  }
  return total * 2.0 * kPi / M;
}

template <class F>
inline void for_each_offset(int n, double h, double reach, F&& f) {
  int K = static_cast<int>(std::ceil(reach / h)) + 1;
  std::array<int, 3> j{0, 0, 0};
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    lo[i] = -K;
    hi[i] = K;
  }
  for (j[2] = lo[2]; j[2] <= hi[2]; ++j[2])
    for (j[1] = lo[1]; j[1] <= hi[1]; ++j[1])
      for (j[0] = lo[0]; j[0] <= hi[0]; ++j[0]) f(Vec{j[0] * h, j[1] * h, j[2] * h}, j);
}

inline double support_reach(const Kernel& k, const Vec& x) {
  return std::visit(overloaded{
                        [&](const UniformBallKernel& b) { return b.delta; },
                        [&](const UniformAnnulusKernel& a) { return a.delta; },
                        [&](const HalfBallConeKernel& h) { return half_ball_radius(h, x); },
                        [&](const SignChangingKernel& s) { return s.delta; },
                        [&](const DistanceScaledKernel& d) { return distance_scaled_radius(d, x); },
                        [&](const InversePowerKernel& ip) { return ip.delta; },
                        [&](const LaminateKernel& l) { return l.delta1 / std::cos(l.theta); },
                        [&](const FlowInversePowerKernel& f) { return f.scale(x) * f.delta; },
                    },
                    k.spec);
}

// Integral of rho(x, .) by cell-centre collocation on the lattice hZ^n; the
// origin cell of a sign-changing kernel is integrated exactly in the radius.
inline double normalize_check(const Kernel& k, const Vec& x, double h) {
  require(is_rho(k), "normalize_check applies to averaging (rho) kernels only");
  require(h > 0.0, "resolution must be positive");
  RegionPtr s = support(k, x);
  const double cell = std::pow(h, k.n);
  const auto* sc = std::get_if<SignChangingKernel>(&k.spec);
  double total = 0.0;
  for_each_offset(k.n, h, support_reach(k, x), [&](const Vec& z, const std::array<int, 3>& j) {
    bool origin = j[0] == 0 && j[1] == 0 && j[2] == 0;
    if (origin && sc) return;
    if (contains(*s, z)) total += density(k, x, z) * cell;
  });
  if (sc) {
    require(h / 2.0 * std::sqrt(static_cast<double>(k.n)) < sc->delta, "resolution too coarse for the horizon",
            ErrorKind::Resolution);
    double c = std::pow(sc->delta, sc->alpha) / (sc->tau * ball_measure(k.n, sc->delta)) * (k.n - sc->alpha) / k.n;
    total += c * origin_cell_integral(k.n, h, sc->alpha, [&](const Vec& d) { return sc->pattern.sigma(d); });
  }
  return total;
}

// R(x) = (int |rho|^q)^{p-1}, or ess sup |rho| when p = 1.
inline double holder_norm_R(const Kernel& k, const Vec& x, double p) {
  require(p >= 1.0, "p must be >= 1");
  require(is_rho(k), "holder_norm_R applies to averaging (rho) kernels only");
  const int n = k.n;
  return std::visit(overloaded{
                        [&](const UniformBallKernel& b) { return 1.0 / ball_measure(n, b.delta); },
                        [&](const UniformAnnulusKernel& a) { return 1.0 / annulus_measure(n, a.eps, a.delta, false); },
                        [&](const HalfBallConeKernel& h) { return 2.0 / ball_measure(n, half_ball_radius(h, x)); },
                        [&](const SignChangingKernel& s) {
                          double R0 = r_zero(n, p, s.alpha);
                          return R0 / (std::pow(s.tau, p) * ball_measure(n, s.delta));
                        },
                        [&](const auto&) -> double { throw Error(ErrorKind::Precondition, "not a rho kernel"); },
                    },
                    k.spec);
}

// Same quantity by lattice collocation; the sign-changing origin cell is exact.
inline double holder_norm_R_numeric(const Kernel& k, const Vec& x, double p, double h) {
  require(p > 1.0, "numeric R needs p > 1");
  require(is_rho(k), "holder_norm_R applies to averaging (rho) kernels only");
  double q = conjugate_exponent(p);
  RegionPtr s = support(k, x);
  const double cell = std::pow(h, k.n);
  const auto* sc = std::get_if<SignChangingKernel>(&k.spec);
  if (sc) require(sc->alpha * q < k.n, "integral of |rho|^q diverges (alpha >= n/q)");
  double total = 0.0;
  for_each_offset(k.n, h, support_reach(k, x), [&](const Vec& z, const std::array<int, 3>& j) {
    bool origin = j[0] == 0 && j[1] == 0 && j[2] == 0;
    if (origin && sc) return;
    if (contains(*s, z)) total += std::pow(std::abs(density(k, x, z)), q) * cell;
  });
  if (sc) {
    double c = std::pow(sc->delta, sc->alpha) / (sc->tau * ball_measure(k.n, sc->delta)) * (k.n - sc->alpha) / k.n;
    total += std::pow(c, q) * origin_cell_integral(k.n, h, q * sc->alpha, [](const Vec&) { return 1.0; });
  }
  return std::pow(total, p - 1.0);
}

}  // namespace npi
