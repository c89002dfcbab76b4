#pragma once

#include <functional>

#include "npi/kernels.hpp"
#include "npi/parallel.hpp"

namespace npi {

struct AffineDrift {
  Vec dir{1, 0, 0};
  double offset = 1.0;
};
struct QuadraticCap {
  Vec x0{};
  double D = 1.0;
};
struct ConstantOne {};
struct DistancePower {
  DistanceTarget target;
  double beta = 1.0, scale = 1.0;
};

using WeightSpec = std::variant<ConstantOne, AffineDrift, QuadraticCap, DistancePower>;

inline double eval_weight(const WeightSpec& w, const Vec& x) {
  return std::visit(overloaded{
                        [&](const ConstantOne&) { return 1.0; },
                        [&](const AffineDrift& a) { return a.offset + dot(x, a.dir); },
                        [&](const QuadraticCap& q) {
                          Vec d = x - q.x0;
                          return q.D * q.D - dot(d, d);
                        },
                        [&](const DistancePower& p) {
                          double d = distance(p.target, x);
                          require(d > 0.0, "distance weight evaluated on the constraint set");
                          return std::pow(p.scale / d, p.beta);
                        },
                    },
                    w);
}

// ---------------------------------------------------------------------------
// Correspondences x -> Psi(x)

struct ForwardHalfBall {
  double delta;
  Vec axis{1, 0, 0};
};
struct BallCorr {
  double delta;
};
struct ConeTube {
  double b, theta;
  DistanceTarget target;
  int m = 0;
};
struct BallCap {
  double b;
  DistanceTarget target;
  int m = 0;
};

using CorrSpec = std::variant<ForwardHalfBall, BallCorr, ConeTube, BallCap>;

inline CorrSpec cone_tube(double b, double theta, const DistanceTarget& t, int m, int n) {
  require(b > 0.0 && b < 1.0, "cone tube needs 0 < b < 1");
  require(n - m > 0, "target dimension must be below the ambient dimension");
  require(b < 1.0 / std::sqrt(static_cast<double>(n - m)), "cone tube needs b < 1/sqrt(n-m)");
  require(theta > 0.0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
  return ConeTube{b, theta, t, m};
}

inline CorrSpec ball_cap(double b, const DistanceTarget& t, int m) {
  require(b > 0.0 && b < 1.0, "ball cap needs 0 < b < 1");
  return BallCap{b, t, m};
}

// y in Psi(x), ignoring the restriction to the domain.
inline bool in_psi(const CorrSpec& c, const Vec& x, const Vec& y) {
  return std::visit(overloaded{
                        [&](const ForwardHalfBall& f) {
                          Vec d = y - x;
                          return dot(d, f.axis) > 0.0 && norm(d) < f.delta;
                        },
                        [&](const BallCorr& b) { return norm(y - x) < b.delta; },
                        [&](const ConeTube& t) {
                          double dx = distance(t.target, x);
                          if (!(dx > 0.0) || !(distance(t.target, y) < t.b * dx)) return false;
                          Vec P = projection(t.target, x);
                          Vec v = y - P;
                          return dot(v, (1.0 / dx) * (x - P)) > std::cos(t.theta) * norm(v);
                        },
                        [&](const BallCap& b) {
                          double dx = distance(b.target, x);
                          return norm(y - x) < dx && distance(b.target, y) < b.b * dx;
                        },
                    },
                    c);
}

// Area (n = 2) or volume (n = 3) of the lens between unit and radius-b balls at unit distance.
inline double unit_lens_measure(int n, double b) {
  const double d = 1.0, r1 = 1.0, r2 = b;
  if (n == 2) {
    double a1 = std::acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1));
    double a2 = std::acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2));
    double k = std::sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2));
    return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k;
  }
  if (n == 3) {
    double s = r1 + r2 - d;
    return kPi * s * s * (d * d + 2 * d * r2 - 3 * r2 * r2 + 2 * d * r1 + 6 * r1 * r2 - 3 * r1 * r1) / (12 * d);
  }
  if (n == 1) return std::min(r2, 1.0);
  throw Error(ErrorKind::Precondition, "lens measure needs n <= 3");
}

// |Psi(x)| from the closed forms; the cone measure must be supplied when no closed form exists.
inline double psi_measure(const CorrSpec& c, const Vec& x, int n, double cone_c = -1.0) {
  return std::visit(overloaded{
                        [&](const ForwardHalfBall& f) { return 0.5 * ball_measure(n, f.delta); },
                        [&](const BallCorr& b) { return ball_measure(n, b.delta); },
                        [&](const ConeTube& t) {
                          double c0 = cone_c > 0.0 ? cone_c : cone_measure_analytic(t.m, n, t.theta);
                          require(c0 > 0.0, "no closed-form cone measure; pass an estimate");
                          return c0 * std::pow(t.b * distance(t.target, x), n);
                        },
                        [&](const BallCap& b) {
                          require(std::holds_alternative<PointTarget>(b.target), "ball-cap measure needs a point target");
                          return std::pow(distance(b.target, x), n) * unit_lens_measure(n, b.b);
                        },
                    },
                    c);
}

// True when no point of `cell` can have y in Psi(x).
inline bool prune_cell(const CorrSpec& c, const Box& cell, const Vec& y) {
  Vec ctr = cell.center();
  double hd = 0.0;
  for (int i = 0; i < cell.dim; ++i) hd += 0.25 * (cell.hi[i] - cell.lo[i]) * (cell.hi[i] - cell.lo[i]);
  hd = std::sqrt(hd);
  return std::visit(overloaded{
                        [&](const ForwardHalfBall& f) { return norm(ctr - y) - hd >= f.delta; },
                        [&](const BallCorr& b) { return norm(ctr - y) - hd >= b.delta; },
                        [&](const ConeTube& t) { return distance(t.target, ctr) + hd <= distance(t.target, y) / t.b; },
                        [&](const BallCap& b) { return distance(b.target, ctr) + hd <= distance(b.target, y) / b.b; },
                    },
                    c);
}

struct JensenOptions {
  int y_samples = 256;
  double resolution = 1.0 / 64;
  int extra_depth = -1;  // adaptive levels below the base resolution; -1 picks by dimension
  double nu_declared = 1.0;
  double tol = 0.02;
  double ladder_scale = 0.0;  // > 0 adds points at distance 2^-k * scale from the target
  std::optional<Vec> ladder_dir;
};

struct JensenSample {
  Vec y{};
  double ratio = 0.0;
};

struct JensenReport {
  double nu_emp = 0.0;
  Vec worst_y{};
  size_t samples = 0;
  double resolution = 0.0;
  double nu_declared = 0.0;
  bool pass = false;
  std::vector<JensenSample> per_sample;
};

inline bool admissible_point(const DomainConfig& dom, const Vec& x) {
  if (!contains(*dom.omega, x) || dom.in_gamma(x)) return false;
  if (auto* t = dom.gamma_target()) return distance(*t, x) > 0.0;
  return true;
}

inline std::vector<Vec> jensen_sample_points(const DomainConfig& dom, const JensenOptions& opt) {
  const int n = dom.n;
  std::vector<Vec> ys;
  Box b = bbox(*dom.omega, n);
  require(b.finite(), "domain needs a finite bounding box");
  int per_axis = std::max(1, static_cast<int>(std::ceil(std::pow(opt.y_samples, 1.0 / n) - 1e-9)));
  Grid g;
  g.n = n;
  g.origin = b.lo;
  double ext = 0.0;
  for (int i = 0; i < n; ++i) ext = std::max(ext, b.hi[i] - b.lo[i]);
  g.h = ext / per_axis;
  for (int i = 0; i < n; ++i) g.dims[i] = std::max(1, static_cast<int>(std::round((b.hi[i] - b.lo[i]) / g.h)));
  for (size_t i = 0; i < g.size(); ++i)
    if (admissible_point(dom, g.center(i))) ys.push_back(g.center(i));
  if (opt.ladder_scale > 0.0 && dom.gamma_target()) {
    const auto& t = *dom.gamma_target();
    Vec ctr = b.center();
    Vec P = projection(t, ctr);
    Vec dir = opt.ladder_dir ? *opt.ladder_dir : ctr - P;
    if (norm(dir) < 1e-12) dir = unit(0);
    dir = (1.0 / norm(dir)) * dir;
    for (int k = 1; k <= 6; ++k) {
      Vec y = P + std::ldexp(opt.ladder_scale, -k) * dir;
      if (admissible_point(dom, y)) ys.push_back(y);
    }
  }
  return ys;
}

namespace detail {

struct JensenIntegrator {
  const CorrSpec& corr;
  const WeightSpec& w;
  const std::function<double(const Vec&)>& R;
  const DomainConfig& dom;
  Vec y;
  int min_depth, max_depth;

  bool indicator(const Vec& x) const { return admissible_point(dom, x) && in_psi(corr, x, y); }

  double integrand(const Vec& x) const { return indicator(x) ? R(x) * eval_weight(w, x) : 0.0; }

  double run(const Box& cell, int depth) const {
    if (prune_cell(corr, cell, y)) return 0.0;
    if (classify(*dom.omega, cell) == Overlap::Outside) return 0.0;
    const int n = cell.dim;
    Vec ctr = cell.center();
    bool any = indicator(ctr), all = any;
    for (int c = 0; c < (1 << n); ++c) {
      Vec x{};
      for (int i = 0; i < n; ++i) x[i] = (c >> i & 1) ? cell.hi[i] : cell.lo[i];
      bool v = indicator(x);
      any = any || v;
      all = all && v;
    }
    double size = cell.hi[0] - cell.lo[0];
    bool refine = depth < min_depth;
    if (!refine && depth < max_depth) {
      if (any != all) refine = true;
      if (any && dom.gamma_target() && size > distance(*dom.gamma_target(), ctr) / 4.0) refine = true;
    }
    if (refine) {
      double total = 0.0;
      for (int c = 0; c < (1 << n); ++c) {
        Box child = cell;
        for (int i = 0; i < n; ++i) {
          double mid = 0.5 * (cell.lo[i] + cell.hi[i]);
          if (c >> i & 1)
            child.lo[i] = mid;
          else
            child.hi[i] = mid;
        }
        total += run(child, depth + 1);
      }
      return total;
    }
    if (!any) return 0.0;
    // Two-point Gauss rule per axis.
    const double g = 0.5 / std::sqrt(3.0);
    double total = 0.0;
    for (int c = 0; c < (1 << n); ++c) {
      Vec x{};
      for (int i = 0; i < n; ++i) x[i] = ctr[i] + ((c >> i & 1) ? g : -g) * (cell.hi[i] - cell.lo[i]);
      total += integrand(x);
    }
    return total * cell.volume() / (1 << n);
  }
};

}  // namespace detail

// Integral of R(x) gamma(x) over Psi^{-1}(y) by adaptive subdivision.
inline double inverse_integral(const WeightSpec& w, const CorrSpec& corr, const std::function<double(const Vec&)>& R,
                               const DomainConfig& dom, const Vec& y, const JensenOptions& opt) {
  const int n = dom.n;
  Box b = bbox(*dom.omega, n);
  require(b.finite(), "inverse image cannot be bounded (domain has no finite bounding box)");
  double ext = 0.0;
  for (int i = 0; i < n; ++i) ext = std::max(ext, b.hi[i] - b.lo[i]);
  for (int i = 0; i < n; ++i) b.hi[i] = b.lo[i] + ext;
  int min_depth = std::max(0, static_cast<int>(std::ceil(std::log2(ext / opt.resolution) - 1e-9)));
  int extra = opt.extra_depth >= 0 ? opt.extra_depth : (n == 1 ? 12 : (n == 2 ? 5 : 3));
  detail::JensenIntegrator J{corr, w, R, dom, y, min_depth, min_depth + extra};
  return J.run(b, 0);
}

inline JensenReport reverse_jensen_check(const WeightSpec& w, const CorrSpec& corr,
                                         const std::function<double(const Vec&)>& R, const DomainConfig& dom,
                                         const JensenOptions& opt) {
  require(opt.resolution > 0.0 && opt.y_samples >= 1, "invalid Jensen options");
  auto ys = jensen_sample_points(dom, opt);
  require(!ys.empty(), "no admissible sample points in the domain");
  std::vector<JensenSample> out(ys.size());
  parallel_for(ys.size(), [&](size_t i) {
    double num = inverse_integral(w, corr, R, dom, ys[i], opt);
    out[i] = {ys[i], num / eval_weight(w, ys[i])};
  });
  JensenReport rep;
  rep.samples = out.size();
  rep.resolution = opt.resolution;
  rep.nu_declared = opt.nu_declared;
  rep.nu_emp = -kInf;
  for (const auto& s : out)
    if (s.ratio > rep.nu_emp) {
      rep.nu_emp = s.ratio;
      rep.worst_y = s.y;
    }
  rep.pass = rep.nu_emp <= opt.nu_declared * (1.0 + opt.tol);
  rep.per_sample = std::move(out);
  return rep;
}

}  // namespace npi
