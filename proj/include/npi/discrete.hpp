#pragma once

#include <Eigen/Dense>
#include <random>

#include "npi/kernels.hpp"
#include "npi/parallel.hpp"
#include "npi/weights.hpp"

namespace npi {

// Cell roles: Omega cells carry unknowns, Gamma cells are held at zero.
struct CellSets {
  std::vector<char> omega, gamma;
  std::vector<size_t> rows;  // Omega cells in grid order
  std::vector<long> row_of;  // grid cell -> row, or -1
};

inline CellSets classify_cells(const Grid& g, const DomainConfig& dom) {
  CellSets cs;
  cs.omega.assign(g.size(), 0);
  cs.gamma.assign(g.size(), 0);
  cs.row_of.assign(g.size(), -1);
  const double touch = 0.5 * g.h * std::sqrt(static_cast<double>(g.n)) * (1.0 + 1e-9);
  for (size_t i = 0; i < g.size(); ++i) {
    Vec c = g.center(i);
    bool gam = false;
    if (auto r = dom.gamma_region()) gam = contains(*r, c);
    if (auto* t = dom.gamma_target()) gam = gam || distance(*t, c) <= touch;
    cs.gamma[i] = gam;
    cs.omega[i] = !gam && contains(*dom.omega, c);
    if (cs.omega[i]) {
      cs.row_of[i] = static_cast<long>(cs.rows.size());
      cs.rows.push_back(i);
    }
  }
  require(!cs.rows.empty(), "grid has no cells inside the domain", ErrorKind::Resolution);
  return cs;
}

// Row-sparse weights. Entry (r, j) couples Omega cell rows[r] to grid cell j
// (an Omega or Gamma cell); coupling to cells outside both is lumped into
// `outside`, where u vanishes. `diag` is the self-cell weight.
struct SparseRows {
  Grid grid;
  CellSets cells;
  std::vector<size_t> start;  // size rows+1
  std::vector<uint32_t> col;
  std::vector<double> w;
  std::vector<double> outside, diag;
  size_t empty_rows = 0;

  size_t rows() const { return cells.rows.size(); }
};

namespace detail {

struct StencilEntry {
  std::array<int, 3> off;
  double weight;  // density * fraction * h^n
  bool origin;
};

inline bool support_is_translation_invariant(const Kernel& k) {
  switch (k.spec.index()) {
    case 0:
    case 1:
    case 3:
    case 5: return true;
    case 2: return std::get<HalfBallConeKernel>(k.spec).shrink == 0.0;
    default: return false;
  }
}

inline std::vector<StencilEntry> build_stencil(const Kernel& k, const Vec& x, const DomainConfig& dom, double h,
                                               int subsample) {
  const int n = k.n;
  RegionPtr s = support(k, x, &dom);
  const double cell = std::pow(h, n);
  const bool singular = is_singular(k);
  std::vector<StencilEntry> out;
  for_each_offset(n, h, support_reach(k, x) + h, [&](const Vec& z, const std::array<int, 3>& j) {
    bool origin = j[0] == 0 && j[1] == 0 && j[2] == 0;
    Box b;
    b.dim = n;
    for (int i = 0; i < n; ++i) {
      b.lo[i] = z[i] - 0.5 * h;
      b.hi[i] = z[i] + 0.5 * h;
    }
    double f = cell_fraction(*s, b, subsample);
    if (f <= 0.0) return;
    if (origin && singular) return;
    double d = density(k, x, z);
    out.push_back({j, d * f * cell, origin});
  });
  return out;
}

}  // namespace detail

// Weights w_rj = K(x_r, x_j - x_r) * frac_rj * h^n, with row normalization for
// families that divide by the discrete support measure.
inline SparseRows assemble_rows(const Grid& g, const Kernel& k, const DomainConfig& dom, int subsample) {
  require(g.n == k.n && dom.n == k.n, "grid, kernel and domain dimensions differ");
  require(subsample >= 1, "subsample must be at least 1");
  SparseRows S;
  S.grid = g;
  S.cells = classify_cells(g, dom);
  const size_t R = S.rows();
  std::vector<std::vector<std::pair<uint32_t, double>>> rows(R);
  S.outside.assign(R, 0.0);
  S.diag.assign(R, 0.0);
  std::vector<detail::StencilEntry> shared;
  const bool invariant = detail::support_is_translation_invariant(k);
  if (invariant) shared = detail::build_stencil(k, Vec{}, dom, g.h, subsample);
  parallel_for(R, [&](size_t r) {
    size_t cell = S.cells.rows[r];
    Vec x = g.center(cell);
    std::vector<detail::StencilEntry> local;
    if (!invariant) local = detail::build_stencil(k, x, dom, g.h, subsample);
    const auto& st = invariant ? shared : local;
    auto m = g.multi(cell);
    double total = 0.0;
    for (const auto& e : st) {
      total += e.weight;
      if (e.origin) {
        S.diag[r] += e.weight;
        continue;
      }
      std::array<int, 3> t{m[0] + e.off[0], m[1] + e.off[1], m[2] + e.off[2]};
      if (!g.in_range(t)) {
        S.outside[r] += e.weight;
        continue;
      }
      size_t j = g.flat(t);
      if (S.cells.omega[j] || S.cells.gamma[j])
        rows[r].push_back({static_cast<uint32_t>(j), e.weight});
      else
        S.outside[r] += e.weight;
    }
    if (row_normalized(k)) {
      require(total > 0.0, "row has no support", ErrorKind::Resolution);
      for (auto& [j, w] : rows[r]) w /= total;
      S.outside[r] /= total;
      S.diag[r] /= total;
      double dens = density(k, x, Vec{});
      for (auto& [j, w] : rows[r]) w *= dens;
      S.outside[r] *= dens;
      S.diag[r] *= dens;
    }
  });
  S.start.assign(R + 1, 0);
  for (size_t r = 0; r < R; ++r) {
    S.start[r + 1] = S.start[r] + rows[r].size();
    if (rows[r].empty() && S.outside[r] == 0.0) ++S.empty_rows;
  }
  S.col.reserve(S.start[R]);
  S.w.reserve(S.start[R]);
  for (auto& row : rows)
    for (auto& [j, w] : row) {
      S.col.push_back(j);
      S.w.push_back(w);
    }
  if (S.empty_rows > 0.05 * R)
    throw Error(ErrorKind::Resolution, "more than 5% of rows have empty discrete support (" +
                                           std::to_string(S.empty_rows) + " of " + std::to_string(R) + ")");
  return S;
}

// Discrete nonlocal gradient: (G u)_r = s_r [sum_j w_rj (u_j - u_r) - outside_r u_r].
struct OperatorMatrix {
  SparseRows S;
  std::vector<double> scale;
  double p = 2.0;

  std::vector<double> apply(const std::vector<double>& u) const {
    std::vector<double> out(S.rows(), 0.0);
    for (size_t r = 0; r < S.rows(); ++r) {
      double ur = u[S.cells.rows[r]], acc = -S.outside[r] * ur;
      for (size_t e = S.start[r]; e < S.start[r + 1]; ++e) acc += S.w[e] * (u[S.col[e]] - ur);
      out[r] = scale[r] * acc;
    }
    return out;
  }

  // sum_r h^n |(G u)_r|^p
  double functional(const std::vector<double>& u) const {
    auto gu = apply(u);
    double cell = S.grid.cell_volume(), t = 0.0;
    for (double v : gu) t += std::pow(std::abs(v), p) * cell;
    return t;
  }

  // Restriction to Omega unknowns (Gamma and outside held at zero).
  Eigen::MatrixXd dense_restricted() const {
    const size_t R = S.rows();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(R, R);
    for (size_t r = 0; r < R; ++r) {
      double d = -S.outside[r];
      for (size_t e = S.start[r]; e < S.start[r + 1]; ++e) {
        d -= S.w[e];
        long c = S.cells.row_of[S.col[e]];
        if (c >= 0) G(r, c) += S.w[e];
      }
      G(r, r) += d;
      G.row(r) *= scale[r];
    }
    return G;
  }
};

inline OperatorMatrix assemble_gradient(const Grid& g, const Kernel& k, const WeightSpec& weight, double p,
                                        const DomainConfig& dom, int subsample, double rhs_scale = 1.0) {
  require(is_rho(k), "assemble_gradient needs an averaging (rho) kernel");
  require(p >= 1.0, "p must be >= 1");
  OperatorMatrix G{assemble_rows(g, k, dom, subsample), {}, p};
  G.scale.resize(G.S.rows());
  for (size_t r = 0; r < G.S.rows(); ++r) {
    double gam = eval_weight(weight, g.center(G.S.cells.rows[r]));
    require(std::isfinite(gam) && gam > 0.0, "weight must be finite and positive on Omega");
    G.scale[r] = std::pow(gam, 1.0 / p) * rhs_scale;
  }
  return G;
}

// sum_r sum_j w_rj |u_j - u_r|^p + outside_r |u_r|^p, where w already carries h^n h^n.
struct FormEvaluator {
  SparseRows S;
  double p = 2.0;

  double operator()(const std::vector<double>& u) const {
    double t = 0.0;
    for (size_t r = 0; r < S.rows(); ++r) {
      double ur = u[S.cells.rows[r]];
      double acc = S.outside[r] * std::pow(std::abs(ur), p);
      for (size_t e = S.start[r]; e < S.start[r + 1]; ++e) acc += S.w[e] * std::pow(std::abs(u[S.col[e]] - ur), p);
      t += acc;
    }
    return t;
  }

  // Symmetric Q on Omega unknowns with u.Q.u equal to the p = 2 form.
  Eigen::MatrixXd dense_restricted() const {
    require(p == 2.0, "matrix form exists only for p = 2");
    const size_t R = S.rows();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(R, R);
    for (size_t r = 0; r < R; ++r) {
      Q(r, r) += S.outside[r];
      for (size_t e = S.start[r]; e < S.start[r + 1]; ++e) {
        double w = S.w[e];
        long c = S.cells.row_of[S.col[e]];
        Q(r, r) += w;
        if (c >= 0) {
          Q(c, c) += w;
          Q(r, c) -= w;
          Q(c, r) -= w;
        }
      }
    }
    return Q;
  }

  // sum_r M_r (avg_r |u|)^p, M_r the row mass and avg_r the kernel-weighted mean.
  double average_integral(const std::vector<double>& u) const {
    double t = 0.0;
    for (size_t r = 0; r < S.rows(); ++r) {
      double mass = S.outside[r] + S.diag[r], acc = S.diag[r] * std::abs(u[S.cells.rows[r]]);
      for (size_t e = S.start[r]; e < S.start[r + 1]; ++e) {
        mass += S.w[e];
        acc += S.w[e] * std::abs(u[S.col[e]]);
      }
      if (mass > 0.0) t += mass * std::pow(acc / mass, p);
    }
    return t;
  }
};

inline FormEvaluator assemble_form(const Grid& g, const Kernel& k, double p, const DomainConfig& dom, int subsample) {
  require(!is_rho(k), "assemble_form needs a mu kernel");
  require(p >= 1.0, "p must be >= 1");
  FormEvaluator F{assemble_rows(g, k, dom, subsample), p};
  const double cell = g.cell_volume();
  for (double& w : F.S.w) w *= cell;
  for (double& w : F.S.outside) w *= cell;
  for (double& w : F.S.diag) w *= cell;
  return F;
}

// sum |u|^p h^n frac
inline double lhs_norm(const ScalarField& u, double p, const std::vector<double>& frac) {
  require(frac.size() == u.values.size(), "mask does not match the field");
  double t = 0.0;
  for (size_t i = 0; i < frac.size(); ++i)
    if (frac[i] > 0.0) t += std::pow(std::abs(u.values[i]), p) * frac[i];
  return t * u.grid.cell_volume();
}

// ---------------------------------------------------------------------------
// Test functions

enum class TestFamily { SineSeries, RandomBump, DistanceModulated };

inline TestFamily parse_family(const std::string& s) {
  if (s == "sine-series") return TestFamily::SineSeries;
  if (s == "random-bump") return TestFamily::RandomBump;
  if (s == "dgamma-modulated") return TestFamily::DistanceModulated;
  throw Error(ErrorKind::Config, "unknown test-function family '" + s + "'");
}

inline const char* family_name(TestFamily f) {
  switch (f) {
    case TestFamily::SineSeries: return "sine-series";
    case TestFamily::RandomBump: return "random-bump";
    case TestFamily::DistanceModulated: return "dgamma-modulated";
  }
  return "";
}

inline uint64_t trial_seed(uint64_t seed, uint64_t trial) { return mix64(seed * 0x2545f4914f6cdd1dULL + trial); }

struct TestFunctionOptions {
  TestFamily family = TestFamily::SineSeries;
  double s = 0.5;     // decay exponent for the distance-modulated family
  double beta = 0.0;  // kernel exponent used for the admissibility threshold
  int m = 0;          // dimension of the constraint target
  double p = 2.0;
  int modes = 4;
};

inline double modulation_threshold(double beta, int n, int m, double p) { return (beta - (n - m)) / p; }

inline std::vector<ScalarField> test_functions(const Grid& g, const DomainConfig& dom, const CellSets& cells, int count,
                                               uint64_t seed, const TestFunctionOptions& opt) {
  require(count >= 0, "count must be nonnegative");
  if (opt.family == TestFamily::DistanceModulated) {
    require(dom.gamma_target() != nullptr, "distance-modulated functions need a distance target");
    double thr = modulation_threshold(opt.beta, g.n, opt.m, opt.p);
    if (!(opt.s > thr))
      throw Error(ErrorKind::Precondition,
                  "decay exponent s = " + std::to_string(opt.s) + " must exceed threshold " + std::to_string(thr));
  }
  Box b = bbox(*dom.omega, g.n);
  if (!b.finite()) b = g.bounds();
  std::vector<ScalarField> out;
  for (int t = 0; t < count; ++t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    std::uniform_real_distribution<double> U(-1.0, 1.0), pos(0.0, 1.0);
    ScalarField u(g);
    std::vector<std::pair<std::array<int, 3>, double>> modes;
    for (int k = 0; k < opt.modes; ++k) {
      std::array<int, 3> kk{1, 1, 1};
      for (int i = 0; i < g.n; ++i) kk[i] = 1 + static_cast<int>(pos(rng) * opt.modes);
      modes.push_back({kk, U(rng)});
    }
    struct Bump {
      Vec c;
      double w, a;
    };
    std::vector<Bump> bumps;
    if (opt.family == TestFamily::RandomBump)
      for (int k = 0; k < 6; ++k) {
        Vec c{};
        for (int i = 0; i < g.n; ++i) c[i] = b.lo[i] + pos(rng) * (b.hi[i] - b.lo[i]);
        bumps.push_back({c, 0.05 + 0.25 * pos(rng), U(rng)});
      }
    for (size_t i = 0; i < g.size(); ++i) {
      if (!cells.omega[i]) continue;
      Vec x = g.center(i);
      double v = 0.0;
      if (opt.family == TestFamily::RandomBump) {
        for (const auto& bp : bumps) {
          Vec d = x - bp.c;
          v += bp.a * std::exp(-dot(d, d) / (2 * bp.w * bp.w));
        }
      } else {
        for (const auto& [kk, a] : modes) {
          double term = a;
          for (int ax = 0; ax < g.n; ++ax) term *= std::sin(kk[ax] * kPi * (x[ax] - b.lo[ax]) / (b.hi[ax] - b.lo[ax]));
          v += term;
        }
        if (opt.family == TestFamily::DistanceModulated)
          v = std::pow(distance(*dom.gamma_target(), x), opt.s) * (1.0 + 0.5 * v);
      }
      u.values[i] = v;
    }
    out.push_back(std::move(u));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sharp constants for p = 2

struct SharpResult {
  double c_sharp = 0.0;
  double lambda_min = 0.0;
  double residual = 0.0;
  std::vector<double> minimizer;  // over grid cells
};

inline std::vector<double> scatter(const CellSets& cs, const Eigen::VectorXd& v, size_t n) {
  std::vector<double> out(n, 0.0);
  for (size_t r = 0; r < cs.rows.size(); ++r) out[cs.rows[r]] = v(r);
  return out;
}

inline void check_not_singular(double lam, const CellSets& cs, const Eigen::VectorXd& v) {
  if (lam > 1e-12) return;
  Eigen::Index arg;
  v.cwiseAbs().maxCoeff(&arg);
  throw Error(ErrorKind::Resolution, "restricted operator is singular (lambda_min = " + std::to_string(lam) +
                                         "); near-null vector peaks at grid cell " + std::to_string(cs.rows[arg]));
}

inline SharpResult sharp_constant_p2(const OperatorMatrix& G) {
  require(G.p == 2.0, "sharp constants need p = 2");
  require(G.S.rows() <= 5000, "dense solve limited to 5000 unknowns");
  Eigen::MatrixXd A = G.dense_restricted();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index last = sv.size() - 1;
  double smin = sv(last);
  Eigen::VectorXd v = svd.matrixV().col(last);
  check_not_singular(smin * smin, G.S.cells, v);
  SharpResult res;
  res.lambda_min = smin * smin;
  res.c_sharp = 1.0 / res.lambda_min;
  res.residual = (A * v - smin * svd.matrixU().col(last)).norm();
  require(res.residual <= 1e-8 * std::max(1.0, sv(0)), "singular vector residual too large", ErrorKind::Resolution);
  res.minimizer = scatter(G.S.cells, v, G.S.grid.size());
  return res;
}

inline SharpResult sharp_constant_p2(const FormEvaluator& F) {
  require(F.p == 2.0, "sharp constants need p = 2");
  require(F.S.rows() <= 5000, "dense solve limited to 5000 unknowns");
  Eigen::MatrixXd Q = F.dense_restricted() / F.S.grid.cell_volume();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  require(es.info() == Eigen::Success, "eigen solve failed", ErrorKind::Resolution);
  double lam = es.eigenvalues()(0);
  Eigen::VectorXd v = es.eigenvectors().col(0);
  check_not_singular(lam, F.S.cells, v);
  SharpResult res;
  res.lambda_min = lam;
  res.c_sharp = 1.0 / lam;
  res.residual = (Q * v - lam * v).norm();
  require(res.residual <= 1e-8 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()), "eigenvector residual too large",
          ErrorKind::Resolution);
  res.minimizer = scatter(F.S.cells, v, F.S.grid.size());
  return res;
}

// ---------------------------------------------------------------------------

struct VerifyResult {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  bool pass = false;
};

struct VerifySummary {
  std::vector<VerifyResult> results;
  size_t violations = 0;
  double max_ratio = 0.0;
};

// lhs = sum over Omega cells of |u|^p h^n; pass iff lhs <= bound * functional * (1 + tol).
// A missing bound only requires a finite functional.
template <class Functional>
inline VerifySummary verify_inequality(const std::vector<ScalarField>& us, const CellSets& cells, double p,
                                       const Functional& functional, std::optional<double> bound, double tol) {
  VerifySummary out;
  out.results.resize(us.size());
  parallel_for(us.size(), [&](size_t t) {
    const auto& u = us[t];
    for (size_t i = 0; i < u.values.size(); ++i)
      if (cells.gamma[i]) require(u.values[i] == 0.0, "test function does not vanish on the constraint set");
    VerifyResult r;
    for (size_t i : cells.rows) r.lhs += std::pow(std::abs(u.values[i]), p);
    r.lhs *= u.grid.cell_volume();
    r.rhs = functional(u.values);
    r.ratio = r.lhs == 0.0 ? 0.0 : r.lhs / r.rhs;
    if (bound)
      r.pass = r.lhs <= *bound * r.rhs * (1.0 + tol);
    else
      r.pass = std::isfinite(r.rhs);
    out.results[t] = r;
  });
  for (const auto& r : out.results) {
    if (!r.pass) ++out.violations;
    out.max_ratio = std::max(out.max_ratio, r.ratio);
  }
  return out;
}

}  // namespace npi
