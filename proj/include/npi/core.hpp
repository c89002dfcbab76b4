#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace npi {

// Points and offsets live in R^3; components beyond the ambient dimension stay 0.
using Vec = std::array<double, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator-(const Vec& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec unit(int axis) {
  Vec e{};
  e[axis] = 1.0;
  return e;
}

inline Vec make_vec(const std::vector<double>& c) {
  if (c.size() > 3) throw std::invalid_argument("points have at most 3 components");
  Vec v{};
  for (size_t i = 0; i < c.size(); ++i) v[i] = c[i];
  return v;
}

enum class ErrorKind { Precondition, Gate, Resolution, Violation, Config };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Gate: return "gate";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Violation: return "violation";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

inline void require(bool ok, const std::string& msg, ErrorKind kind = ErrorKind::Precondition) {
  if (!ok) throw Error(kind, msg);
}

// Counter-based generator: the draw for (seed, index) never depends on call order.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t index) { return mix64(mix64(seed) ^ (index * 0xd1b54a32d192ed03ULL)); }

inline double uniform01(uint64_t seed, uint64_t index) {
  return static_cast<double>(counter_hash(seed, index) >> 11) * 0x1.0p-53;
}

// Lebesgue measure of the unit ball in R^n (n = 0 gives 1).
inline double unit_ball_volume(int n) {
  if (n < 0) throw Error(ErrorKind::Precondition, "negative dimension");
  double v[2] = {1.0, 2.0};
  if (n < 2) return v[n];
  double vol = 0.0;
  for (int k = 2; k <= n; ++k) {
    vol = 2.0 * kPi / k * v[k % 2];
    v[k % 2] = vol;
  }
  return vol;
}

// H^{n-1} of the unit sphere in R^n.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

// Named numeric parameters with defaults.
class Params {
 public:
  Params() = default;
  Params(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  bool has(const std::string& k) const { return values_.count(k) > 0; }
  double get(const std::string& k, double fallback) const {
    auto it = values_.find(k);
    return it == values_.end() ? fallback : it->second;
  }
  double at(const std::string& k) const {
    auto it = values_.find(k);
    if (it == values_.end()) throw Error(ErrorKind::Config, "missing parameter '" + k + "'");
    return it->second;
  }
  void set(const std::string& k, double v) { values_[k] = v; }
  void merge(const Params& o) {
    for (const auto& [k, v] : o.values_) values_[k] = v;
  }
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

}  // namespace npi
