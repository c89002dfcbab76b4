#pragma once

#include <utility>

#include "npi/core.hpp"

namespace npi {

// A numeric bound together with the sub-factors that produced it.
struct Bound {
  double value = 0.0;
  std::vector<std::pair<std::string, double>> factors;

  double factor(const std::string& name) const {
    for (const auto& [k, v] : factors)
      if (k == name) return v;
    throw Error(ErrorKind::Config, "no factor named '" + name + "'");
  }
};

inline void gate(bool ok, const std::string& condition) {
  if (!ok) throw Error(ErrorKind::Gate, "gate violated: " + condition);
}

inline double conjugate_exponent(double p) {
  require(p >= 1.0, "exponent p must be >= 1");
  return p == 1.0 ? kInf : p / (p - 1.0);
}

inline double control_objective(double lambda, double nu, double p) {
  double a = std::pow(lambda, p - 1.0);
  return std::pow(lambda / (1.0 - lambda), p - 1.0) / (a - nu);
}

struct Minimum {
  double argmin = 0.0;
  double value = 0.0;
  int iterations = 0;
};

// Golden-section search for the minimum of the control objective.
inline Minimum control_minimize(double nu, double p) {
  require(nu > 0.0 && nu < 1.0, "nu must lie in (0,1)");
  require(p > 1.0, "numeric control constant needs p > 1");
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::pow(nu, 1.0 / (p - 1.0)) + 1e-9, b = 1.0 - 1e-9;
  require(a < b, "control bracket is empty");
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = control_objective(c, nu, p), fd = control_objective(d, nu, p);
  int it = 0;
  for (; it < 200 && (b - a) > 1e-15; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = control_objective(c, nu, p);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = control_objective(d, nu, p);
    }
  }
  if (!((b - a) <= 1e-12)) throw Error(ErrorKind::Resolution, "golden-section search did not converge");
  double x = 0.5 * (a + b);
  return {x, control_objective(x, nu, p), it};
}

// C(nu, p): closed forms at p = 1 and p = 2, golden-section otherwise.
inline double control_constant(double nu, double p) {
  require(nu > 0.0 && nu < 1.0, "nu must lie in (0,1)");
  require(p >= 1.0, "exponent p must be >= 1");
  if (p == 1.0) return 1.0 / (1.0 - nu);
  if (p == 2.0) {
    double s = 1.0 - std::sqrt(nu);
    return 1.0 / (s * s);
  }
  return control_minimize(nu, p).value;
}

inline double eta(int n) {
  require(n >= 1, "dimension must be >= 1");
  return 2.0 / (n + 1) * unit_ball_volume(n - 1) / unit_ball_volume(n);
}

inline double r_zero(int n, double p, double alpha) {
  require(n >= 1 && p >= 1.0, "r_zero needs n >= 1 and p >= 1");
  require(alpha >= 0.0, "alpha must be nonnegative");
  if (p == 1.0) {
    gate(alpha == 0.0, "alpha < n/q (for p = 1 the kernel must be bounded, so alpha = 0)");
    return 1.0;
  }
  double q = conjugate_exponent(p);
  gate(alpha < n / q, "alpha < n/q");
  return (n - alpha) / n * std::pow((n - alpha) / (n - q * alpha), p - 1.0);
}

// Lebesgue measure of the truncated cone A_1(G) cap C_theta used for K4, where
// it has a closed form; returns a negative value otherwise.
inline double cone_measure_analytic(int m, int n, double theta) {
  if (m == 0 && n == 1) return 1.0;
  if (m == 0 && n == 2) return theta;
  if (m == 0 && n == 3) return 2.0 * kPi * (1.0 - std::cos(theta)) / 3.0;
  if (m == 1 && n == 2) return std::tan(theta);
  if (m == 2 && n == 3) return kPi * std::tan(theta) * std::tan(theta) / 3.0;
  return -1.0;
}

// Lower bound c'_{n,theta} for the cone measure.
inline double cone_measure_lower(int n, double theta) {
  return std::pow(std::tan(theta), n - 1) * std::pow(std::cos(theta), n) * unit_ball_volume(n - 1) / (n + 1);
}

inline double lowdim_K4(int m, int n, double theta, double c_estimate) {
  require(m >= 0 && m <= n - 1, "need 0 <= m <= n-1");
  require(theta > 0.0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
  require(c_estimate > 0.0, "cone measure must be positive");
  return std::pow(2.0 * std::tan(theta), m) / c_estimate * unit_ball_volume(m) * unit_sphere_area(n - m);
}

inline double dist_class_bound(int n, double a, double b, double alpha1, double alpha2, double beta, double K1, double K2,
                               double K3) {
  require(0.0 < a && a < b && b <= 1.0, "need 0 < a < b <= 1");
  require(alpha1 >= 1.0 && alpha1 <= n, "need 1 <= alpha1 <= n");
  require(alpha2 >= 1.0 && alpha2 <= n, "need 1 <= alpha2 <= n");
  require(beta >= alpha2, "need beta >= alpha2");
  return K1 * K2 * K3 * std::pow(b, beta - alpha2) / alpha1;
}

// ---------------------------------------------------------------------------
// Example bounds

inline Bound basic_ex1_bound(int n, double diam) {
  require(diam > 0.0, "diameter must be positive");
  double e = eta(n);
  double v = 4.0 * std::pow(1.0 + diam, 3) / (e * e);
  return {v, {{"eta", e}, {"1+diam", 1.0 + diam}}};
}

inline Bound basic_ex2_bound(double diam, double p) {
  require(diam > 0.0 && p >= 1.0, "need diam > 0 and p >= 1");
  return {std::pow(diam, p), {{"diam", diam}, {"p", p}}};
}

inline Bound basic_ex1_ext_bound(int n, double p, double delta, double diam, double tau) {
  require(delta > 0.0 && diam > 0.0, "need delta > 0 and diam > 0");
  double e = eta(n);
  double base = 1.0 - e * delta / (1.0 + diam);
  gate(tau > base && tau <= 1.0, "1 - eta*delta/(1+diam) < tau <= 1");
  double nu = base / tau;
  gate(nu > 0.0 && nu < 1.0, "nu_tau < 1");
  double C = control_constant(nu, p);
  return {C * (1.0 + diam), {{"eta", e}, {"nu_tau", nu}, {"C", C}, {"1+diam", 1.0 + diam}}};
}

inline double sign_change1_nu(int n, double p, double alpha, double tau, double delta, double diam) {
  double R0 = r_zero(n, p, alpha);
  double ratio = delta / diam;
  return R0 / tau * (1.0 - static_cast<double>(n) / (n + 2) * ratio * ratio);
}

inline Bound sign_change1_bound(int n, double p, double alpha, double tau, double delta, double diam) {
  require(delta > 0.0 && tau > 0.0 && tau <= 1.0, "need delta > 0 and 0 < tau <= 1");
  gate(diam >= 2.0 / std::sqrt(3.0), "diam >= 2/sqrt(3)");
  gate(delta <= diam / 2.0, "delta <= diam/2");
  double R0 = r_zero(n, p, alpha);
  double nu = sign_change1_nu(n, p, alpha, tau, delta, diam);
  gate(nu < 1.0, "nu_delta < 1");
  double C = control_constant(nu, p);
  return {C * diam * diam, {{"R0", R0}, {"nu_delta", nu}, {"C", C}, {"diam^2", diam * diam}}};
}

inline Bound sign_change2_bound(int n, double p, double alpha, double tau, double delta, double omega_measure) {
  require(delta > 0.0 && tau > 0.0 && tau <= 1.0 && omega_measure > 0.0, "need delta, |Omega| > 0 and 0 < tau <= 1");
  double R0 = r_zero(n, p, alpha);
  double ball = unit_ball_volume(n) * std::pow(delta, n);
  double nu = R0 * omega_measure / (tau * ball);
  gate(nu < 1.0, "nu_delta = R0|Omega|/(tau|B_delta|) < 1");
  double C = control_constant(nu, p);
  return {C, {{"R0", R0}, {"|B_delta|", ball}, {"nu_delta", nu}, {"C", C}}};
}

inline Bound gflow_bound(double p, double S, double theta, double tau, double C = 1.0) {
  require(S > 0.0 && theta >= 0.0 && tau >= 0.0 && C > 0.0, "need S > 0, theta, tau >= 0, C > 0");
  double e = std::exp(theta * S * tau);
  return {C * std::pow(S, p) * e, {{"C", C}, {"S^p", std::pow(S, p)}, {"exp(theta*S*tau)", e}}};
}

// |Z_1| for the laminate support: exact area and the sine-based expression.
inline double laminate_support_area(double delta1, double delta2, double theta) {
  double t = std::tan(theta);
  require(delta2 < delta1 * t, "laminate support is empty (need delta2 < delta1*tan(theta))");
  return (delta1 * t - delta2) * (delta1 * t - delta2) / t;
}

inline double laminate_support_area_sine(double delta1, double delta2, double theta) {
  double s = std::sin(theta);
  return (delta1 * s - delta2) * (delta1 * s - delta2) / s;
}

inline Bound discontinuous_bound(double p, double delta1, double delta2, double theta, double C = 1.0) {
  require(theta > 0.0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
  double v = std::pow(2.0, p + 4.0) * C;
  return {v,
          {{"C", C},
           {"2^(p+4)", std::pow(2.0, p + 4.0)},
           {"|Z1|", laminate_support_area(delta1, delta2, theta)},
           {"|Z1| sine form", laminate_support_area_sine(delta1, delta2, theta)}}};
}

inline Bound cor1_bound(double M0, double theta, double lambda) {
  require(M0 > 0.0, "M0 must be positive");
  double e = std::exp(theta * lambda);
  return {M0 * e, {{"M0", M0}, {"exp(theta*lambda)", e}}};
}

inline Bound cor2_bound(double alpha0, double p, double M0, double N0, double Theta0) {
  require(alpha0 >= 1.0 && p >= 1.0 && M0 > 0.0 && N0 > 0.0 && Theta0 > 0.0, "invalid corollary parameters");
  double a = std::pow(alpha0, p), t = std::pow(Theta0, alpha0);
  return {a * M0 * N0 * t, {{"alpha0^p", a}, {"M0", M0}, {"N0", N0}, {"Theta0^alpha0", t}}};
}

inline Bound third_strategy_bound(int n, double delta, double diam) {
  require(delta > 0.0 && diam > 0.0, "need delta > 0 and diam > 0");
  double dn = std::pow(delta, n), V = unit_ball_volume(n);
  return {dn * diam * diam * V, {{"delta^n", dn}, {"diam^2", diam * diam}, {"|B_1|", V}}};
}

inline Bound third_strategy_tb_bound(int n, double tau, double beta, double diam) {
  require(tau > 0.0 && tau < 1.0, "need 0 < tau < 1");
  require(diam > 0.0, "diameter must be positive");
  double k = n - beta + 1.0;
  gate(k != 0.0, "n - beta + 1 != 0");
  double base = k * diam / (n * (1.0 - std::pow(tau, k)));
  return {base * base, {{"n-beta+1", k}, {"1-tau^(n-beta+1)", 1.0 - std::pow(tau, k)}}};
}

}  // namespace npi
