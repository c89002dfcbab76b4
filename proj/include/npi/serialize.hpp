#pragma once

#include <json.hpp>

#include "npi/dynamics.hpp"
#include "npi/weights.hpp"

namespace npi {

using Json = nlohmann::ordered_json;

inline Json vec_json(const Vec& v, int n) {
  Json a = Json::array();
  for (int i = 0; i < n; ++i) a.push_back(v[i]);
  return a;
}

inline Vec json_vec(const Json& j) {
  require(j.is_array() && j.size() >= 1 && j.size() <= 3, "point must be an array of 1..3 numbers", ErrorKind::Config);
  return make_vec(j.get<std::vector<double>>());
}

inline Json box_json(const Box& b) { return {{"lo", vec_json(b.lo, b.dim)}, {"hi", vec_json(b.hi, b.dim)}}; }

inline Box json_box(const Json& j) {
  return make_box(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------
// geometry_v1

inline Json to_json(const DistanceTarget& t, int n) {
  return std::visit(overloaded{
                        [&](const PointTarget& p) { return Json{{"type", "point"}, {"p", vec_json(p.p, n)}}; },
                        [&](const SegmentTarget& s) {
                          return Json{{"type", "segment"}, {"a", vec_json(s.a, n)}, {"b", vec_json(s.b, n)}};
                        },
                        [&](const CircleTarget& c) {
                          return Json{{"type", "circle"}, {"center", vec_json(c.center, n)}, {"radius", c.radius}};
                        },
                        [&](const HyperplaneTarget& h) {
                          return Json{{"type", "hyperplane"}, {"m", h.m}, {"zeroed", h.zeroed}};
                        },
                        [&](const FaceTarget& f) {
                          return Json{{"type", "box_face"}, {"box", box_json(f.box)}, {"face", f.face}};
                        },
                    },
                    t);
}

inline DistanceTarget target_from_json(const Json& j) {
  std::string type = j.at("type");
  if (type == "point") return PointTarget{json_vec(j.at("p"))};
  if (type == "segment") return SegmentTarget{json_vec(j.at("a")), json_vec(j.at("b"))};
  if (type == "circle") return make_circle(json_vec(j.at("center")), j.at("radius"));
  if (type == "hyperplane") return make_hyperplane(j.at("m"), j.at("zeroed").get<std::vector<int>>());
  if (type == "box_face") {
    Box b = json_box(j.at("box"));
    int f = j.at("face");
    require(f >= 0 && f < 2 * b.dim, "box face id out of range", ErrorKind::Config);
    return FaceTarget{b, f};
  }
  throw Error(ErrorKind::Config, "unknown distance target type '" + type + "'");
}

inline Json to_json(const Region& r, int n) {
  return std::visit(
      overloaded{
          [&](const BoxRegion& b) { return Json{{"type", "box"}, {"lo", vec_json(b.box.lo, n)}, {"hi", vec_json(b.box.hi, n)}}; },
          [&](const BallRegion& b) {
            return Json{{"type", "ball"}, {"center", vec_json(b.center, n)}, {"radius", b.radius}};
          },
          [&](const AnnulusRegion& a) {
            return Json{{"type", "annulus"}, {"target", to_json(a.target, n)}, {"inner", a.inner}, {"outer", a.outer}};
          },
          [&](const ConeRegion& c) {
            return Json{{"type", "cone"}, {"vertex", vec_json(c.vertex, n)}, {"axis", vec_json(c.axis, n)}, {"theta", c.theta}};
          },
          [&](const HalfSpaceRegion& h) {
            return Json{{"type", "half_space"}, {"point", vec_json(h.point, n)}, {"normal", vec_json(h.normal, n)}};
          },
          [&](const IntersectionRegion& s) {
            Json parts = Json::array();
            for (const auto& p : s.parts) parts.push_back(to_json(*p, n));
            return Json{{"type", "intersection"}, {"parts", parts}};
          },
          [&](const UnionRegion& s) {
            Json parts = Json::array();
            for (const auto& p : s.parts) parts.push_back(to_json(*p, n));
            return Json{{"type", "union"}, {"parts", parts}};
          },
          [&](const TranslateRegion& t) {
            return Json{{"type", "translate"}, {"region", to_json(*t.inner, n)}, {"offset", vec_json(t.offset, n)}};
          },
          [&](const ComplementRegion& c) {
            return Json{{"type", "complement"}, {"region", to_json(*c.inner, n)}, {"within", box_json(c.within)}};
          },
      },
      r.shape);
}

inline RegionPtr region_from_json(const Json& j) {
  std::string type = j.at("type");
  if (type == "box") return box_region(json_box(j));
  if (type == "ball") return ball_region(json_vec(j.at("center")), j.at("radius"));
  if (type == "annulus") return annulus_region(target_from_json(j.at("target")), j.at("inner"), j.at("outer"));
  if (type == "cone") return cone_region(json_vec(j.at("vertex")), json_vec(j.at("axis")), j.at("theta"));
  if (type == "half_space") return half_space_region(json_vec(j.at("point")), json_vec(j.at("normal")));
  if (type == "intersection" || type == "union") {
    std::vector<RegionPtr> parts;
    for (const auto& p : j.at("parts")) parts.push_back(region_from_json(p));
    return type == "union" ? unite(parts) : intersect(parts);
  }
  if (type == "translate") return translate(region_from_json(j.at("region")), json_vec(j.at("offset")));
  if (type == "complement") return complement(region_from_json(j.at("region")), json_box(j.at("within")));
  throw Error(ErrorKind::Config, "unknown region type '" + type + "'");
}

inline Json to_json(const DomainConfig& d) {
  Json j{{"schema", "geometry_v1"}, {"n", d.n}, {"omega", to_json(*d.omega, d.n)}};
  if (auto r = d.gamma_region()) j["gamma"] = to_json(*r, d.n);
  if (auto* t = d.gamma_target()) j["gamma"] = to_json(*t, d.n);
  j["bounds"] = box_json(d.bounds);
  return j;
}

// ---------------------------------------------------------------------------
// kernel_v1

inline Json scale_json(const ScaleField& c, int n) {
  return {{"c0", c.c0}, {"c1", c.c1}, {"dir", vec_json(c.dir, n)}, {"lo", c.lo}, {"hi", std::isfinite(c.hi) ? Json(c.hi) : Json(nullptr)}};
}

inline ScaleField scale_from_json(const Json& j) {
  ScaleField c;
  c.c0 = j.value("c0", 1.0);
  c.c1 = j.value("c1", 0.0);
  if (j.contains("dir")) c.dir = json_vec(j.at("dir"));
  c.lo = j.value("lo", 0.0);
  c.hi = (j.contains("hi") && !j.at("hi").is_null()) ? j.at("hi").get<double>() : kInf;
  return c;
}

inline Json to_json(const Kernel& k) {
  const int n = k.n;
  Json j{{"schema", "kernel_v1"}, {"type", kernel_name(k)}, {"n", n}};
  std::visit(overloaded{
                 [&](const UniformBallKernel& b) { j["delta"] = b.delta; },
                 [&](const UniformAnnulusKernel& a) {
                   j["eps"] = a.eps;
                   j["delta"] = a.delta;
                 },
                 [&](const HalfBallConeKernel& h) {
                   j["delta"] = h.delta;
                   j["axis"] = vec_json(h.axis, n);
                   j["shrink"] = h.shrink;
                 },
                 [&](const SignChangingKernel& s) {
                   j["delta"] = s.delta;
                   j["alpha"] = s.alpha;
                   j["tau"] = s.tau;
                   j["sigma"] = {{"sectors", s.pattern.sectors}, {"flipped", s.pattern.flipped}};
                 },
                 [&](const DistanceScaledKernel& d) {
                   j["target"] = to_json(d.target, n);
                   j["m"] = d.m;
                   j["beta"] = d.beta;
                   j["delta0"] = d.delta0;
                   j["p"] = d.p;
                 },
                 [&](const InversePowerKernel& ip) {
                   j["eps"] = ip.eps;
                   j["delta"] = ip.delta;
                   j["p"] = ip.p;
                   j["half"] = ip.half;
                 },
                 [&](const LaminateKernel& l) {
                   j["delta1"] = l.delta1;
                   j["delta2"] = l.delta2;
                   j["theta"] = l.theta;
                   j["p"] = l.p;
                   j["interface"] = l.interface;
                 },
                 [&](const FlowInversePowerKernel& f) {
                   j["eps"] = f.eps;
                   j["delta"] = f.delta;
                   j["p"] = f.p;
                   j["half"] = f.half;
                   j["scale"] = scale_json(f.scale, n);
                   j["lambda0"] = f.lambda0;
                 },
             },
             k.spec);
  return j;
}

inline Kernel kernel_from_json(const Json& j) {
  std::string type = j.at("type");
  int n = j.at("n");
  double p = j.value("p", 2.0);
  if (type == "uniform_ball") return uniform_ball(n, j.at("delta"));
  if (type == "uniform_annulus") return uniform_annulus(n, j.at("eps"), j.at("delta"));
  if (type == "half_ball_cone")
    return half_ball_cone(n, j.at("delta"), j.contains("axis") ? json_vec(j.at("axis")) : unit(0), j.value("shrink", 0.0));
  if (type == "sign_changing") {
    SigmaPattern s = j.contains("sigma") ? checkerboard(j.at("sigma").value("sectors", 1),
                                                        j.at("sigma").value("flipped", std::vector<int>{}))
                                         : SigmaPattern{};
    return sign_changing(n, j.at("delta"), j.at("alpha"), s, j.value("tau", 1.0), p);
  }
  if (type == "distance_scaled")
    return distance_scaled(n, target_from_json(j.at("target")), j.at("m"), j.at("beta"), j.at("delta0"), p);
  if (type == "inverse_power") return inverse_power(n, j.at("eps"), j.at("delta"), p, j.value("half", false));
  if (type == "laminate") return laminate(j.at("delta1"), j.at("delta2"), j.at("theta"), p, j.value("interface", 1.0));
  if (type == "flow_inverse_power")
    return flow_inverse_power(n, j.at("eps"), j.at("delta"), p, j.value("half", false), scale_from_json(j.at("scale")),
                              j.value("lambda0", 1.0));
  throw Error(ErrorKind::Config, "unknown kernel type '" + type + "'");
}

// ---------------------------------------------------------------------------
// weights_v1, flow_v1

inline Json to_json(const WeightSpec& w, int n) {
  return std::visit(overloaded{
                        [&](const ConstantOne&) { return Json{{"type", "constant_one"}}; },
                        [&](const AffineDrift& a) {
                          return Json{{"type", "affine_drift"}, {"dir", vec_json(a.dir, n)}, {"offset", a.offset}};
                        },
                        [&](const QuadraticCap& q) {
                          return Json{{"type", "quadratic_cap"}, {"x0", vec_json(q.x0, n)}, {"D", q.D}};
                        },
                        [&](const DistancePower& d) {
                          return Json{{"type", "distance_power"}, {"target", to_json(d.target, n)}, {"beta", d.beta}, {"scale", d.scale}};
                        },
                    },
                    w);
}

inline Json to_json(const CorrSpec& c, int n) {
  return std::visit(overloaded{
                        [&](const ForwardHalfBall& f) {
                          return Json{{"type", "forward_half_ball"}, {"delta", f.delta}, {"axis", vec_json(f.axis, n)}};
                        },
                        [&](const BallCorr& b) { return Json{{"type", "ball"}, {"delta", b.delta}}; },
                        [&](const ConeTube& t) {
                          return Json{{"type", "cone_tube"}, {"b", t.b}, {"theta", t.theta}, {"m", t.m}, {"target", to_json(t.target, n)}};
                        },
                        [&](const BallCap& b) {
                          return Json{{"type", "ball_cap"}, {"b", b.b}, {"m", b.m}, {"target", to_json(b.target, n)}};
                        },
                    },
                    c);
}

inline Json to_json(const FlowSpec& f, int n) {
  Json j{{"schema", "flow_v1"}, {"type", flow_name(f)}};
  std::visit(overloaded{
                 [&](const TranslationFlow&) {},
                 [&](const MatrixFieldFlow& m) { j["scale"] = scale_json(m.c, n); },
                 [&](const LaminateFlow& l) {
                   j["delta1"] = l.delta1;
                   j["delta2"] = l.delta2;
                   j["theta"] = l.theta;
                   j["interface"] = l.interface;
                 },
                 [&](const RadialContractionFlow& r) {
                   j["eps"] = r.eps;
                   j["center"] = vec_json(r.center, n);
                 },
             },
             f);
  return j;
}

inline Json to_json(const Bound& b) {
  Json f = Json::object();
  for (const auto& [k, v] : b.factors) f[k] = v;
  return {{"value", b.value}, {"factors", f}};
}

inline Json to_json(const AbsorptionReport& r, int n) {
  Json h = Json::array();
  for (const auto& b : r.bins) {
    Json s = Json::array();
    for (const auto& v : b.samples) s.push_back(vec_json(v, n));
    h.push_back({{"alpha", b.alpha}, {"measure", b.measure}, {"count", b.count}, {"samples", s}});
  }
  return {{"histogram", h},
          {"not_absorbed", {{"count", r.not_absorbed}, {"measure", r.not_absorbed_measure}}},
          {"max_alpha", r.max_alpha},
          {"total_measure", r.total_measure}};
}

inline Json to_json(const JensenReport& r, int n) {
  return {{"nu_emp", r.nu_emp},        {"worst_y", vec_json(r.worst_y, n)}, {"samples", r.samples},
          {"resolution", r.resolution}, {"nu_declared", r.nu_declared},     {"pass", r.pass}};
}

}  // namespace npi
