#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "npi/core.hpp"

namespace npi {

// Axis-aligned box in the first `dim` coordinates; may have infinite sides.
struct Box {
  Vec lo{};
  Vec hi{};
  int dim = 1;

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= std::max(0.0, hi[i] - lo[i]);
    return v;
  }
  bool finite() const {
    for (int i = 0; i < dim; ++i)
      if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) return false;
    return true;
  }
  Vec center() const { return 0.5 * (lo + hi); }
};

inline Box make_box(const std::vector<double>& lo, const std::vector<double>& hi) {
  require(lo.size() == hi.size() && !lo.empty() && lo.size() <= 3, "box corners must share a dimension in 1..3");
  Box b{make_vec(lo), make_vec(hi), static_cast<int>(lo.size())};
  for (int i = 0; i < b.dim; ++i) require(b.lo[i] <= b.hi[i], "box has lo > hi");
  return b;
}

inline Box unbounded_box(int n) {
  Box b;
  b.dim = n;
  for (int i = 0; i < n; ++i) {
    b.lo[i] = -kInf;
    b.hi[i] = kInf;
  }
  return b;
}

inline Box intersect_boxes(const Box& a, const Box& b) {
  Box r = a;
  for (int i = 0; i < a.dim; ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (r.hi[i] < r.lo[i]) r.hi[i] = r.lo[i];
  }
  return r;
}

inline Box hull_boxes(const Box& a, const Box& b) {
  Box r = a;
  for (int i = 0; i < a.dim; ++i) {
    r.lo[i] = std::min(a.lo[i], b.lo[i]);
    r.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  return r;
}

inline Box expand_box(const Box& a, double r) {
  Box out = a;
  for (int i = 0; i < a.dim; ++i) {
    out.lo[i] -= r;
    out.hi[i] += r;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distance targets

struct PointTarget {
  Vec p{};
};
struct SegmentTarget {
  Vec a{}, b{};
};
// Circle in the x1-x2 plane through `center`.
struct CircleTarget {
  Vec center{};
  double radius = 1.0;
};
// Coordinate plane {x : x_i = 0 for i in zeroed}; m is its dimension.
struct HyperplaneTarget {
  int m = 0;
  std::vector<int> zeroed;
};
// One face of a box; face = 2*axis + (0 for the low side, 1 for the high side).
struct FaceTarget {
  Box box;
  int face = 0;
};

using DistanceTarget = std::variant<PointTarget, SegmentTarget, CircleTarget, HyperplaneTarget, FaceTarget>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline DistanceTarget make_circle(const Vec& c, double r) {
  require(r > 0.0, "circle radius must be positive");
  return CircleTarget{c, r};
}

inline DistanceTarget make_hyperplane(int m, std::vector<int> zeroed) {
  require(m >= 0, "hyperplane dimension must be nonnegative");
  for (int i : zeroed) require(i >= 0 && i < 3, "hyperplane axis out of range");
  std::sort(zeroed.begin(), zeroed.end());
  return HyperplaneTarget{m, std::move(zeroed)};
}

inline Vec projection(const DistanceTarget& t, const Vec& x) {
  return std::visit(
      overloaded{
          [&](const PointTarget& p) { return p.p; },
          [&](const SegmentTarget& s) {
            Vec d = s.b - s.a;
            double L2 = dot(d, d);
            if (L2 == 0.0) return s.a;
            double t0 = std::clamp(dot(x - s.a, d) / L2, 0.0, 1.0);
            return s.a + t0 * d;
          },
          [&](const CircleTarget& c) {
            double dx = x[0] - c.center[0], dy = x[1] - c.center[1];
            double r = std::hypot(dx, dy);
            if (r == 0.0) return Vec{c.center[0] - c.radius, c.center[1], c.center[2]};
            return Vec{c.center[0] + c.radius * dx / r, c.center[1] + c.radius * dy / r, c.center[2]};
          },
          [&](const HyperplaneTarget& h) {
            Vec p = x;
            for (int i : h.zeroed) p[i] = 0.0;
            return p;
          },
          [&](const FaceTarget& f) {
            Vec p = x;
            for (int i = 0; i < f.box.dim; ++i) p[i] = std::clamp(x[i], f.box.lo[i], f.box.hi[i]);
            int axis = f.face / 2;
            p[axis] = (f.face % 2 == 0) ? f.box.lo[axis] : f.box.hi[axis];
            return p;
          },
      },
      t);
}

inline double distance(const DistanceTarget& t, const Vec& x) {
  if (const auto* c = std::get_if<CircleTarget>(&t)) {
    double r = std::hypot(x[0] - c->center[0], x[1] - c->center[1]);
    return std::hypot(r - c->radius, x[2] - c->center[2]);
  }
  return norm(x - projection(t, x));
}

inline Box target_bbox(const DistanceTarget& t, int n) {
  Box b = unbounded_box(n);
  std::visit(overloaded{
                 [&](const PointTarget& p) { b.lo = b.hi = p.p; },
                 [&](const SegmentTarget& s) {
                   for (int i = 0; i < 3; ++i) {
                     b.lo[i] = std::min(s.a[i], s.b[i]);
                     b.hi[i] = std::max(s.a[i], s.b[i]);
                   }
                 },
                 [&](const CircleTarget& c) {
                   b.lo = b.hi = c.center;
                   b.lo[0] -= c.radius;
                   b.lo[1] -= c.radius;
                   b.hi[0] += c.radius;
                   b.hi[1] += c.radius;
                 },
                 [&](const HyperplaneTarget& h) {
                   for (int i : h.zeroed) b.lo[i] = b.hi[i] = 0.0;
                 },
                 [&](const FaceTarget& f) {
                   b = f.box;
                   int axis = f.face / 2;
                   b.lo[axis] = b.hi[axis] = (f.face % 2 == 0) ? f.box.lo[axis] : f.box.hi[axis];
                 },
             },
             t);
  b.dim = n;
  for (int i = n; i < 3; ++i) b.lo[i] = b.hi[i] = 0.0;
  return b;
}

// ---------------------------------------------------------------------------
// Regions

struct Region;
using RegionPtr = std::shared_ptr<const Region>;

struct BoxRegion {
  Box box;
};
struct BallRegion {
  Vec center{};
  double radius = 1.0;
};
struct AnnulusRegion {
  DistanceTarget target;
  double inner = 0.0, outer = 1.0;
};
// Open cone {y : (y - v).axis > cos(theta) |y - v|}.
struct ConeRegion {
  Vec vertex{}, axis{1, 0, 0};
  double theta = kPi / 2;
};
// Open half-space {y : (y - point).normal > 0}.
struct HalfSpaceRegion {
  Vec point{}, normal{1, 0, 0};
};
struct IntersectionRegion {
  std::vector<RegionPtr> parts;
};
struct UnionRegion {
  std::vector<RegionPtr> parts;
};
struct TranslateRegion {
  RegionPtr inner;
  Vec offset{};
};
struct ComplementRegion {
  RegionPtr inner;
  Box within;
};

struct Region {
  std::variant<BoxRegion, BallRegion, AnnulusRegion, ConeRegion, HalfSpaceRegion, IntersectionRegion, UnionRegion,
               TranslateRegion, ComplementRegion>
      shape;
};

inline RegionPtr box_region(const Box& b) { return std::make_shared<Region>(Region{BoxRegion{b}}); }

inline RegionPtr ball_region(const Vec& c, double r) {
  require(r >= 0.0, "ball radius must be nonnegative");
  return std::make_shared<Region>(Region{BallRegion{c, r}});
}

inline RegionPtr annulus_region(const DistanceTarget& t, double inner, double outer) {
  require(inner >= 0.0 && outer > 0.0 && inner < outer, "annulus needs 0 <= inner < outer");
  return std::make_shared<Region>(Region{AnnulusRegion{t, inner, outer}});
}

inline RegionPtr cone_region(const Vec& vertex, const Vec& axis, double theta) {
  require(std::abs(norm(axis) - 1.0) <= 1e-12, "cone axis must be a unit vector");
  require(theta > 0.0 && theta <= kPi, "cone half-angle must lie in (0, pi]");
  return std::make_shared<Region>(Region{ConeRegion{vertex, axis, theta}});
}

inline RegionPtr half_space_region(const Vec& point, const Vec& normal) {
  require(std::abs(norm(normal) - 1.0) <= 1e-12, "half-space normal must be a unit vector");
  return std::make_shared<Region>(Region{HalfSpaceRegion{point, normal}});
}

inline RegionPtr intersect(std::vector<RegionPtr> parts) {
  require(!parts.empty(), "empty intersection");
  return std::make_shared<Region>(Region{IntersectionRegion{std::move(parts)}});
}

inline RegionPtr unite(std::vector<RegionPtr> parts) {
  require(!parts.empty(), "empty union");
  return std::make_shared<Region>(Region{UnionRegion{std::move(parts)}});
}

inline RegionPtr translate(RegionPtr r, const Vec& off) {
  return std::make_shared<Region>(Region{TranslateRegion{std::move(r), off}});
}

inline RegionPtr complement(RegionPtr r, const Box& within) {
  require(within.finite(), "complement needs a finite bounding box");
  return std::make_shared<Region>(Region{ComplementRegion{std::move(r), within}});
}

inline bool box_contains(const Box& b, const Vec& x) {
  for (int i = 0; i < b.dim; ++i)
    if (!(x[i] > b.lo[i] && x[i] < b.hi[i])) return false;
  return true;
}

inline bool contains(const Region& r, const Vec& x) {
  return std::visit(overloaded{
                        [&](const BoxRegion& b) { return box_contains(b.box, x); },
                        [&](const BallRegion& b) { return norm(x - b.center) < b.radius; },
                        [&](const AnnulusRegion& a) {
                          double d = distance(a.target, x);
                          return d > a.inner && d < a.outer;
                        },
                        [&](const ConeRegion& c) {
                          Vec d = x - c.vertex;
                          return dot(d, c.axis) > std::cos(c.theta) * norm(d);
                        },
                        [&](const HalfSpaceRegion& h) { return dot(x - h.point, h.normal) > 0.0; },
                        [&](const IntersectionRegion& s) {
                          for (const auto& p : s.parts)
                            if (!contains(*p, x)) return false;
                          return true;
                        },
                        [&](const UnionRegion& s) {
                          for (const auto& p : s.parts)
                            if (contains(*p, x)) return true;
                          return false;
                        },
                        [&](const TranslateRegion& t) { return contains(*t.inner, x - t.offset); },
                        [&](const ComplementRegion& c) { return box_contains(c.within, x) && !contains(*c.inner, x); },
                    },
                    r.shape);
}

inline bool contains(const RegionPtr& r, const Vec& x) { return contains(*r, x); }

inline Box bbox(const Region& r, int n) {
  Box out = std::visit(overloaded{
                           [&](const BoxRegion& b) { return b.box; },
                           [&](const BallRegion& b) {
                             Box o = unbounded_box(n);
                             for (int i = 0; i < n; ++i) {
                               o.lo[i] = b.center[i] - b.radius;
                               o.hi[i] = b.center[i] + b.radius;
                             }
                             return o;
                           },
                           [&](const AnnulusRegion& a) { return expand_box(target_bbox(a.target, n), a.outer); },
                           [&](const ConeRegion&) { return unbounded_box(n); },
                           [&](const HalfSpaceRegion&) { return unbounded_box(n); },
                           [&](const IntersectionRegion& s) {
                             Box o = unbounded_box(n);
                             for (const auto& p : s.parts) o = intersect_boxes(o, bbox(*p, n));
                             return o;
                           },
                           [&](const UnionRegion& s) {
                             Box o = bbox(*s.parts.front(), n);
                             for (const auto& p : s.parts) o = hull_boxes(o, bbox(*p, n));
                             return o;
                           },
                           [&](const TranslateRegion& t) {
                             Box o = bbox(*t.inner, n);
                             for (int i = 0; i < n; ++i) {
                               o.lo[i] += t.offset[i];
                               o.hi[i] += t.offset[i];
                             }
                             return o;
                           },
                           [&](const ComplementRegion& c) { return c.within; },
                       },
                       r.shape);
  out.dim = n;
  return out;
}

inline Box bbox(const RegionPtr& r, int n) { return bbox(*r, n); }

// Conservative classification of a cell against a region.
enum class Overlap { Outside, Partial, Inside };

inline Overlap classify(const Region& r, const Box& cell) {
  const int n = cell.dim;
  Vec c = cell.center();
  double hd = 0.0;
  for (int i = 0; i < n; ++i) hd += 0.25 * (cell.hi[i] - cell.lo[i]) * (cell.hi[i] - cell.lo[i]);
  hd = std::sqrt(hd);
  return std::visit(
      overloaded{
          [&](const BoxRegion& b) {
            bool inside = true;
            for (int i = 0; i < n; ++i) {
              if (cell.hi[i] <= b.box.lo[i] || cell.lo[i] >= b.box.hi[i]) return Overlap::Outside;
              if (cell.lo[i] < b.box.lo[i] || cell.hi[i] > b.box.hi[i]) inside = false;
            }
            return inside ? Overlap::Inside : Overlap::Partial;
          },
          [&](const BallRegion& b) {
            double dmin = 0.0, dmax = 0.0;
            for (int i = 0; i < n; ++i) {
              double lo = cell.lo[i] - b.center[i], hi = cell.hi[i] - b.center[i];
              double near = (lo > 0) ? lo : (hi < 0 ? -hi : 0.0);
              double far = std::max(std::abs(lo), std::abs(hi));
              dmin += near * near;
              dmax += far * far;
            }
            double r2 = b.radius * b.radius;
            if (dmin >= r2) return Overlap::Outside;
            if (dmax < r2) return Overlap::Inside;
            return Overlap::Partial;
          },
          [&](const AnnulusRegion& a) {
            double d = distance(a.target, c);
            if (d + hd <= a.inner || d - hd >= a.outer) return Overlap::Outside;
            if (d - hd > a.inner && d + hd < a.outer) return Overlap::Inside;
            return Overlap::Partial;
          },
          [&](const ConeRegion& k) {
            Vec d = c - k.vertex;
            double rho = norm(d);
            if (rho <= hd) return Overlap::Partial;
            double phi = std::acos(std::clamp(dot(d, k.axis) / rho, -1.0, 1.0));
            double ang = std::asin(std::min(1.0, hd / rho));
            if (phi + ang < k.theta) return Overlap::Inside;
            if (k.theta < kPi && phi - ang > k.theta) return Overlap::Outside;
            return Overlap::Partial;
          },
          [&](const HalfSpaceRegion& h) {
            double s = dot(c - h.point, h.normal), spread = 0.0;
            for (int i = 0; i < n; ++i) spread += 0.5 * (cell.hi[i] - cell.lo[i]) * std::abs(h.normal[i]);
            if (s - spread > 0.0) return Overlap::Inside;
            if (s + spread <= 0.0) return Overlap::Outside;
            return Overlap::Partial;
          },
          [&](const IntersectionRegion& s) {
            bool all_in = true;
            for (const auto& p : s.parts) {
              Overlap o = classify(*p, cell);
              if (o == Overlap::Outside) return Overlap::Outside;
              if (o != Overlap::Inside) all_in = false;
            }
            return all_in ? Overlap::Inside : Overlap::Partial;
          },
          [&](const UnionRegion& s) {
            bool all_out = true;
            for (const auto& p : s.parts) {
              Overlap o = classify(*p, cell);
              if (o == Overlap::Inside) return Overlap::Inside;
              if (o != Overlap::Outside) all_out = false;
            }
            return all_out ? Overlap::Outside : Overlap::Partial;
          },
          [&](const TranslateRegion& t) {
            Box shifted = cell;
            shifted.lo = cell.lo - t.offset;
            shifted.hi = cell.hi - t.offset;
            return classify(*t.inner, shifted);
          },
          [&](const ComplementRegion& k) {
            Overlap w = classify(Region{BoxRegion{k.within}}, cell);
            if (w == Overlap::Outside) return Overlap::Outside;
            Overlap in = classify(*k.inner, cell);
            if (in == Overlap::Inside) return Overlap::Outside;
            if (in == Overlap::Outside && w == Overlap::Inside) return Overlap::Inside;
            return Overlap::Partial;
          },
      },
      r.shape);
}

// Fraction of `cell` inside `r`, from subsample^n stratified sub-cell midpoints.
inline double cell_fraction(const Region& r, const Box& cell, int subsample) {
  Overlap o = classify(r, cell);
  if (o == Overlap::Outside) return 0.0;
  if (o == Overlap::Inside) return 1.0;
  const int n = cell.dim;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= subsample;
  int hits = 0;
  for (int s = 0; s < total; ++s) {
    Vec x{};
    int rem = s;
    for (int i = 0; i < n; ++i) {
      int k = rem % subsample;
      rem /= subsample;
      x[i] = cell.lo[i] + (k + 0.5) / subsample * (cell.hi[i] - cell.lo[i]);
    }
    if (contains(r, x)) ++hits;
  }
  return static_cast<double>(hits) / total;
}

struct MeasureEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

inline MeasureEstimate measure_mc(const Region& r, int n, long samples, uint64_t seed) {
  require(samples >= 1000, "measure_mc needs at least 1e3 samples");
  Box b = bbox(r, n);
  require(b.finite(), "region has no finite bounding box");
  double vol = b.volume();
  require(vol > 0.0, "degenerate bounding box", ErrorKind::Precondition);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    Vec x{};
    for (int i = 0; i < n; ++i) x[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * uniform01(seed, static_cast<uint64_t>(s) * 3 + i);
    if (contains(r, x)) ++hits;
  }
  double f = static_cast<double>(hits) / samples;
  return {vol * f, vol * std::sqrt(f * (1.0 - f) / samples)};
}

inline MeasureEstimate measure_mc(const RegionPtr& r, int n, long samples, uint64_t seed) {
  return measure_mc(*r, n, samples, seed);
}

// ---------------------------------------------------------------------------
// Uniform cell-centred grid

struct Grid {
  Vec origin{};
  double h = 1.0;
  std::array<int, 3> dims{1, 1, 1};
  int n = 1;

  size_t size() const { return static_cast<size_t>(dims[0]) * dims[1] * dims[2]; }
  double cell_volume() const { return std::pow(h, n); }

  std::array<int, 3> multi(size_t idx) const {
    std::array<int, 3> m{0, 0, 0};
    for (int i = 0; i < n; ++i) {
      m[i] = static_cast<int>(idx % dims[i]);
      idx /= dims[i];
    }
    return m;
  }
  size_t flat(const std::array<int, 3>& m) const {
    size_t idx = 0;
    for (int i = n - 1; i >= 0; --i) idx = idx * dims[i] + m[i];
    return idx;
  }
  bool in_range(const std::array<int, 3>& m) const {
    for (int i = 0; i < n; ++i)
      if (m[i] < 0 || m[i] >= dims[i]) return false;
    return true;
  }
  Vec center(size_t idx) const {
    auto m = multi(idx);
    Vec c{};
    for (int i = 0; i < n; ++i) c[i] = origin[i] + (m[i] + 0.5) * h;
    return c;
  }
  Box cell_box(size_t idx) const {
    auto m = multi(idx);
    Box b;
    b.dim = n;
    for (int i = 0; i < n; ++i) {
      b.lo[i] = origin[i] + m[i] * h;
      b.hi[i] = b.lo[i] + h;
    }
    return b;
  }
  // -1 when x lies outside the grid.
  long locate(const Vec& x) const {
    std::array<int, 3> m{0, 0, 0};
    for (int i = 0; i < n; ++i) {
      double t = (x[i] - origin[i]) / h;
      if (!(t >= 0.0) || t >= dims[i]) return -1;
      m[i] = static_cast<int>(std::floor(t));
    }
    return static_cast<long>(flat(m));
  }
  Box bounds() const {
    Box b;
    b.dim = n;
    for (int i = 0; i < n; ++i) {
      b.lo[i] = origin[i];
      b.hi[i] = origin[i] + dims[i] * h;
    }
    return b;
  }
};

// Grid of spacing h covering `bounds`, with the lower corner on a grid node.
inline Grid make_grid(const Box& bounds, double h) {
  require(h > 0.0, "grid spacing must be positive");
  require(bounds.finite(), "grid bounds must be finite");
  Grid g;
  g.n = bounds.dim;
  g.h = h;
  g.origin = bounds.lo;
  for (int i = 0; i < g.n; ++i) g.dims[i] = std::max(1, static_cast<int>(std::ceil((bounds.hi[i] - bounds.lo[i]) / h - 1e-9)));
  return g;
}

inline std::vector<double> cell_mask(const Grid& g, const Region& r, int subsample) {
  require(subsample >= 1, "subsample must be at least 1");
  std::vector<double> frac(g.size());
  for (size_t i = 0; i < g.size(); ++i) frac[i] = cell_fraction(r, g.cell_box(i), subsample);
  return frac;
}

inline std::vector<double> cell_mask(const Grid& g, const RegionPtr& r, int subsample) { return cell_mask(g, *r, subsample); }


// Per-cell values on a grid; zero outside the grid.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  double at(const std::array<int, 3>& m) const { return grid.in_range(m) ? values[grid.flat(m)] : 0.0; }
};

// ---------------------------------------------------------------------------

struct DomainConfig {
  int n = 1;
  RegionPtr omega;
  std::variant<std::monostate, RegionPtr, DistanceTarget> gamma;
  Box bounds;

  const DistanceTarget* gamma_target() const { return std::get_if<DistanceTarget>(&gamma); }
  RegionPtr gamma_region() const {
    auto* p = std::get_if<RegionPtr>(&gamma);
    return p ? *p : nullptr;
  }
  bool in_gamma(const Vec& x) const {
    if (auto r = gamma_region()) return contains(*r, x);
    return false;
  }
};

}  // namespace npi
