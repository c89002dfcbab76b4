#pragma once

#include <map>
#include <optional>

#include "npi/kernels.hpp"
#include "npi/parallel.hpp"

namespace npi {

struct TranslationFlow {};
// z = c(x) zeta; the matrix field is the scalar c(x) times the identity.
struct MatrixFieldFlow {
  ScaleField c;
};
struct LaminateFlow {
  double delta1, delta2, theta;
  double interface = 1.0;
};
// z = sigma(|x - center|)(zeta - x) on V = Omega minus the closed 2 eps ball.
struct RadialContractionFlow {
  double eps;
  Vec center{};
};

using FlowSpec = std::variant<TranslationFlow, MatrixFieldFlow, LaminateFlow, RadialContractionFlow>;

inline const char* flow_name(const FlowSpec& f) {
  static const char* names[] = {"translation", "matrix_field", "laminate", "radial_contraction"};
  return names[f.index()];
}

inline FlowSpec radial_contraction(double eps, const Vec& center = Vec{}) {
  require(eps > 0.0, "radial contraction needs eps > 0");
  return RadialContractionFlow{eps, center};
}

inline double radial_sigma(double eps, double t) { return eps / (t + eps); }

// Set on which the flow moves points.
inline bool flow_active(const FlowSpec& f, const Vec& x, const DomainConfig& dom) {
  if (!contains(*dom.omega, x)) return false;
  if (const auto* r = std::get_if<RadialContractionFlow>(&f)) return norm(x - r->center) > 2.0 * r->eps;
  return true;
}

inline Vec flow_offset(const FlowSpec& f, const Vec& x, const Vec& zeta) {
  return std::visit(overloaded{
                        [&](const TranslationFlow&) { return zeta; },
                        [&](const MatrixFieldFlow& m) { return m.c(x) * zeta; },
                        [&](const LaminateFlow& l) {
                          Vec z = zeta;
                          if (x[0] >= l.interface) z[0] = -z[0];
                          return z;
                        },
                        [&](const RadialContractionFlow& r) {
                          return radial_sigma(r.eps, norm(x - r.center)) * (zeta - x);
                        },
                    },
                    f);
}

inline Vec step(const FlowSpec& f, const Vec& x, const Vec& zeta, const DomainConfig& dom) {
  if (!flow_active(f, x, dom)) return x;
  return x + flow_offset(f, x, zeta);
}

inline std::vector<Vec> orbit(const FlowSpec& f, const Vec& x, const Vec& zeta, const DomainConfig& dom, int max_k) {
  require(max_k >= 1, "orbit length must be at least 1");
  std::vector<Vec> out{x};
  out.reserve(max_k + 1);
  for (int k = 0; k < max_k; ++k) out.push_back(step(f, out.back(), zeta, dom));
  return out;
}

// Least k with y^k in U and the orbit staying in U afterwards; nullopt when
// that does not happen within max_k steps.
inline std::optional<int> absorption_index(const FlowSpec& f, const Vec& x, const Vec& zeta, const Region& U,
                                           const DomainConfig& dom, int max_k = 10000) {
  std::optional<int> first;
  Vec y = x;
  for (int k = 0; k <= max_k; ++k) {
    bool in = contains(U, y);
    if (in && !first) first = k;
    if (!in) first.reset();
    if (!flow_active(f, y, dom)) return first;
    if (k == max_k) break;
    y = y + flow_offset(f, y, zeta);
  }
  return first;
}

struct AbsorptionBin {
  int alpha = 0;
  size_t count = 0;
  double measure = 0.0;
  std::vector<Vec> samples;
};

struct AbsorptionReport {
  std::vector<AbsorptionBin> bins;  // ascending alpha
  size_t not_absorbed = 0;
  double not_absorbed_measure = 0.0;
  int max_alpha = 0;
  double total_measure = 0.0;
};

// Phi sampled as cell centres, each carrying `cell_volume`.
inline AbsorptionReport absorption_partition(const FlowSpec& f, const std::vector<Vec>& omega_prime,
                                             const std::vector<Vec>& phi_samples, double cell_volume, const Region& U,
                                             const DomainConfig& dom, int max_k = 10000, size_t keep_samples = 8) {
  std::vector<std::optional<int>> idx(phi_samples.size());
  parallel_for(phi_samples.size(), [&](size_t i) {
    std::optional<int> worst = 0;
    for (const Vec& x : omega_prime) {
      auto a = absorption_index(f, x, phi_samples[i], U, dom, max_k);
      if (!a) {
        worst.reset();
        break;
      }
      worst = std::max(*worst, *a);
    }
    idx[i] = worst;
  });
  std::map<int, AbsorptionBin> bins;
  AbsorptionReport rep;
  for (size_t i = 0; i < idx.size(); ++i) {
    rep.total_measure += cell_volume;
    if (!idx[i]) {
      ++rep.not_absorbed;
      rep.not_absorbed_measure += cell_volume;
      continue;
    }
    auto& b = bins[*idx[i]];
    b.alpha = *idx[i];
    ++b.count;
    b.measure += cell_volume;
    if (b.samples.size() < keep_samples) b.samples.push_back(phi_samples[i]);
    rep.max_alpha = std::max(rep.max_alpha, *idx[i]);
  }
  for (auto& [a, b] : bins) rep.bins.push_back(std::move(b));
  return rep;
}

// Count of source points whose k-th iterate lands in each target cell,
// divided by the number of source points per target-cell volume.
inline std::vector<double> indicatrix(const FlowSpec& f, const Vec& zeta, int k, const Grid& target,
                                      const std::vector<Vec>& source, double source_cell_volume, const DomainConfig& dom) {
  require(k >= 0 && k <= 1000, "indicatrix needs 0 <= k <= 1000");
  std::vector<double> counts(target.size(), 0.0);
  double per_cell = target.cell_volume() / source_cell_volume;
  for (const Vec& x : source) {
    Vec y = x;
    for (int j = 0; j < k; ++j) y = step(f, y, zeta, dom);
    long c = target.locate(y);
    if (c >= 0) counts[c] += 1.0;
  }
  for (double& c : counts) c /= per_cell;
  return counts;
}

struct JacobianBounds {
  double Theta = 1.0;
  double Lambda = 1.0;
};

// det of d_x y(x, zeta) at an active point.
inline double jacobian_det(const FlowSpec& f, const Vec& x, const Vec& zeta, int n) {
  return std::visit(overloaded{
                        [&](const TranslationFlow&) { return 1.0; },
                        [&](const MatrixFieldFlow& m) {
                          double v = m.c.c0 + m.c.c1 * dot(x, m.c.dir);
                          if (v <= m.c.lo || v >= m.c.hi) return 1.0;
                          return 1.0 + m.c.c1 * dot(m.c.dir, zeta);
                        },
                        [&](const LaminateFlow&) { return 1.0; },
                        [&](const RadialContractionFlow& r) {
                          Vec d = x - r.center;
                          double t = norm(d);
                          double s = radial_sigma(r.eps, t);
                          double ds = -r.eps / ((t + r.eps) * (t + r.eps));
                          Vec xh = (1.0 / t) * d;
                          return std::pow(1.0 - s, n - 1) * (1.0 - s + ds * dot(xh, zeta - x));
                        },
                    },
                    f);
}

// Theta >= 1/inf|det d_x y|, Lambda >= 1/inf|det d_zeta z|.
// phi_radius: Phi lies in the closed ball of that radius; diam_active: diameter of the active set.
inline JacobianBounds jacobian_bounds(const FlowSpec& f, int n, double phi_radius, double diam_active) {
  return std::visit(overloaded{
                        [&](const TranslationFlow&) { return JacobianBounds{1.0, 1.0}; },
                        [&](const MatrixFieldFlow& m) {
                          double b = m.c.lipschitz() * phi_radius;
                          if (n * b >= 1.0)
                            throw Error(ErrorKind::Gate, "gate violated: nKR < 1 for the matrix-field determinant bound");
                          double cmin = std::max(m.c.lo, 0.0);
                          require(cmin > 0.0, "matrix field needs a positive lower bound");
                          return JacobianBounds{1.0 / (1.0 - n * b), 1.0 / std::pow(cmin, n)};
                        },
                        [&](const LaminateFlow&) { return JacobianBounds{1.0, 1.0}; },
                        [&](const RadialContractionFlow& r) {
                          return JacobianBounds{std::pow(3.0, n), std::pow((diam_active + r.eps) / r.eps, n)};
                        },
                    },
                    f);
}

// Least k0 with (D/(D+eps))^{k0-1} D < eps.
inline int radial_absorption_bound(double D, double eps) {
  require(D > 0.0 && eps > 0.0, "need D, eps > 0");
  double rho = D / (D + eps);
  int k = 1;
  while (std::pow(rho, k - 1) * D >= eps) ++k;
  return k;
}

struct OrbitCheck {
  double lhs = 0.0, rhs = 0.0;
  int k0 = 0;
  bool pass = false;
};

// Telescoping orbit inequality for a lattice translation with Theta = 1:
// sum |u|^p <= k0^{p-1} [sum_k sum |u(y^{k+1}) - u(y^k)|^p + sum |u(y^{k0})|^p],
// sums over grid cells whose centres lie in Omega.
inline OrbitCheck orbit_inequality_check(const ScalarField& u, const std::vector<char>& in_omega, const Vec& zeta,
                                         double p) {
  const Grid& g = u.grid;
  require(in_omega.size() == g.size(), "mask does not match the grid");
  std::array<int, 3> J{0, 0, 0};
  for (int i = 0; i < g.n; ++i) {
    double r = zeta[i] / g.h;
    J[i] = static_cast<int>(std::llround(r));
    require(std::abs(r - J[i]) <= 1e-9, "zeta is not a multiple of the grid spacing");
  }
  require(J[0] != 0 || J[1] != 0 || J[2] != 0, "zeta must be nonzero");
  auto inside = [&](const std::array<int, 3>& m) { return g.in_range(m) && in_omega[g.flat(m)]; };
  auto shift = [&](std::array<int, 3> m) {
    for (int i = 0; i < g.n; ++i) m[i] += J[i];
    return m;
  };
  for (size_t i = 0; i < g.size(); ++i)
    if (!in_omega[i]) require(u.values[i] == 0.0, "u must vanish outside Omega");

  OrbitCheck out;
  for (size_t i = 0; i < g.size(); ++i) {
    if (!in_omega[i]) continue;
    auto m = g.multi(i);
    int k = 0;
    while (inside(m)) {
      m = shift(m);
      ++k;
    }
    out.k0 = std::max(out.k0, k);
  }
  double diffs = 0.0, tail = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    if (!in_omega[i]) continue;
    out.lhs += std::pow(std::abs(u.values[i]), p);
    auto m = g.multi(i);
    for (int k = 0; k < out.k0; ++k) {
      if (!inside(m)) break;
      auto nx = shift(m);
      diffs += std::pow(std::abs(u.at(nx) - u.at(m)), p);
      m = nx;
    }
    if (inside(m)) tail += std::pow(std::abs(u.at(m)), p);
  }
  out.rhs = std::pow(static_cast<double>(out.k0), p - 1.0) * (diffs + tail);
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-300;
  return out;
}

}  // namespace npi
