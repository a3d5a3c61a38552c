#pragma once

// JSON instance files and reports. Exact rationals are written as strings
// ("3/2"), doubles as numbers, and non-finite doubles as null.

#include "mixvol/estimator.hpp"
#include "mixvol/subdivision.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace mixvol {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

struct InstanceFile {
  int n = 0;
  int L = 0;
  std::vector<Polytope> polytopes;
  std::optional<Exponent> alpha;
};

namespace detail {

inline int json_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw ValidationError(std::string(what) + " must be an integer");
  return j.get<int>();
}

inline Exponent json_exponent(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of integers");
  Exponent out;
  for (const auto& x : j) out.push_back(json_int(x, what));
  return out;
}

}  // namespace detail

inline Json to_json(const Rational& q) { return to_string(q); }

inline Json to_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

inline Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(to_json(x));
  return a;
}

inline Json vertices_json(const Polytope& p) {
  Json a = Json::array();
  for (const auto& v : p.vertices()) {
    Json row = Json::array();
    for (const auto& c : v) {
      if (is_integer(c) && c.get_num().fits_slong_p()) {
        row.push_back(c.get_num().get_si());
      } else {
        row.push_back(to_string(c));
      }
    }
    a.push_back(std::move(row));
  }
  return a;
}

inline InstanceFile parse_instance(const Json& j) {
  if (!j.is_object()) throw ValidationError("instance must be a JSON object");
  for (const char* key : {"n", "L", "polytopes"})
    if (!j.contains(key)) throw ValidationError(std::string("instance is missing \"") + key + "\"");
  InstanceFile in;
  in.n = detail::json_int(j["n"], "n");
  in.L = detail::json_int(j["L"], "L");
  if (in.n < 1) throw ValidationError("n must be positive");
  if (in.L < 0 || in.L > 62) throw ValidationError("L must lie in [0, 62]");
  const long bound = 1L << in.L;
  if (!j["polytopes"].is_array() || j["polytopes"].empty()) throw ValidationError("polytopes must be a nonempty array");
  for (const auto& pj : j["polytopes"]) {
    if (!pj.is_object() || !pj.contains("vertices") || !pj["vertices"].is_array() || pj["vertices"].empty())
      throw ValidationError("each polytope needs a nonempty \"vertices\" array");
    std::vector<Point> pts;
    for (const auto& vj : pj["vertices"]) {
      if (!vj.is_array() || vj.size() != static_cast<std::size_t>(in.n))
        throw ValidationError("every vertex must have n integer coordinates");
      Point p;
      for (const auto& c : vj) {
        if (!c.is_number_integer()) throw ValidationError("vertex coordinates must be integers");
        const long x = c.get<long>();
        if (x > bound || x < -bound) throw ValidationError("vertex coordinate exceeds 2^L in absolute value");
        p.emplace_back(x);
      }
      pts.push_back(std::move(p));
    }
    std::string name;
    if (pj.contains("name")) {
      if (!pj["name"].is_string()) throw ValidationError("polytope name must be a string");
      name = pj["name"].get<std::string>();
    }
    in.polytopes.push_back(convex_hull(pts).named(name));
  }
  if (j.contains("alpha")) {
    in.alpha = detail::json_exponent(j["alpha"], "alpha");
    if (in.alpha->size() != in.polytopes.size()) throw ValidationError("alpha must have one entry per polytope");
    if (total_degree(*in.alpha) != in.n) throw ValidationError("alpha must sum to n");
  }
  return in;
}

inline Json to_json(const InstanceFile& in) {
  Json j;
  j["n"] = in.n;
  j["L"] = in.L;
  j["polytopes"] = Json::array();
  for (std::size_t i = 0; i < in.polytopes.size(); ++i) {
    const auto& p = in.polytopes[i];
    j["polytopes"].push_back({{"name", p.name().empty() ? "P" + std::to_string(i + 1) : p.name()}, {"vertices", vertices_json(p)}});
  }
  if (in.alpha) j["alpha"] = *in.alpha;
  return j;
}

inline InstanceFile load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open instance file " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("instance file is not valid JSON: " + std::string(e.what()));
  }
  return parse_instance(j);
}

inline Json to_json(const ShiftVectors& s) {
  Json x = Json::array();
  for (const auto& v : s.x) x.push_back(to_json(v));
  return {{"d2", s.d2}, {"x", x}};
}

inline Json to_json(const CapacityResult& c) {
  return {{"alpha", c.alpha},
          {"cap_value", to_json(c.cap_value)},
          {"cap_upper", to_json(c.cap_upper)},
          {"cap_lower", to_json(c.cap_lower)},
          {"certified_gap", to_json(c.certified_gap)},
          {"infimum_estimate", to_json(c.infimum_estimate)},
          {"zero_capacity", c.zero_capacity},
          {"newton_face_dim", c.newton_face_dim},
          {"y_star", to_json(c.y_star)},
          {"lambda_real", to_json(c.lambda_real)},
          {"hit_box", c.hit_box},
          {"box_radius", to_json(c.box_radius)},
          {"iterations", c.iterations},
          {"trajectory", to_json(c.trajectory)}};
}

inline Json to_json(const BoundsReport& b) {
  Json j = {{"alpha", b.alpha},
            {"d", b.d},
            {"A", to_json(b.A)},
            {"A_tilde", to_json(b.A_tilde)},
            {"a_upper", to_json(b.a_upper)},
            {"coefficient", to_json(b.coefficient)},
            {"derivative_form", to_json(b.derivative_form)},
            {"cap", to_json(b.cap)},
            {"certified_gap", to_json(b.certified_gap)},
            {"blp", {{"low", to_json(b.blp_low)}, {"middle", to_json(b.blp_middle)}, {"high", to_json(b.cap)}}},
            {"degree_violations", b.degree_violations}};
  if (b.has_gurvits) j["gurvits"] = {{"low", to_json(b.gurvits_low)}, {"high", to_json(b.gurvits_high)}};
  j["pass"] = {{"constants", b.constants_pass},
               {"blp", b.blp_pass},
               {"gurvits", b.gurvits_pass},
               {"degree", b.degree_pass},
               {"all", b.all_pass()}};
  return j;
}

inline Json to_json(const EstimateReport& r) {
  Json j = {{"n", r.n},
            {"k", r.k},
            {"alpha", r.alpha},
            {"eps", r.eps},
            {"delta", r.delta},
            {"seed", r.seed},
            {"estimate_coefficient", to_json(r.estimate_coefficient)},
            {"estimate_coefficient_float", to_json(to_double(r.estimate_coefficient))},
            {"estimate_derivative_form", to_json(r.estimate_derivative_form)},
            {"estimate_standard", to_json(r.estimate_standard)},
            {"N", r.N},
            {"T", r.T},
            {"p_hat", to_json(r.p_hat)},
            {"lambda", to_json(r.lambda)},
            {"V_at_lambda", to_json(r.V_at_lambda)},
            {"V_exact", r.V_exact},
            {"lambda_from_capacity", r.lambda_from_capacity},
            {"lambda_log_ratio_perturbation", to_json(r.lambda_log_ratio_perturbation)},
            {"shifts", to_json(r.shifts)}};
  j["capacity"] = r.capacity ? to_json(*r.capacity) : Json(nullptr);
  j["bounds"] = r.bounds ? to_json(*r.bounds) : Json(nullptr);
  j["diagnostics"] = {{"sampler_trials", r.sampler_trials},
                      {"sampler_accepted", r.sampler_accepted},
                      {"rounding_rejections", r.rounding_rejections},
                      {"volume_trials", r.volume_trials},
                      {"w1_bound", to_json(r.w1_bound)},
                      {"non_unique", r.non_unique},
                      {"support_mismatch", r.support_mismatch},
                      {"dimension_violations", r.dimension_violations},
                      {"p_oracle", r.p_oracle ? to_json(*r.p_oracle) : Json(nullptr)},
                      {"hit_probability_floor", to_json(r.hit_probability_floor)}};
  j["warnings"] = r.warnings;
  return j;
}

inline Json to_json(const FaceDescriptor& f) { return {{"vertex_indices", f.vertex_indices}, {"dim", f.dim}}; }

inline Json to_json(const SubdivisionCell& c) {
  Json faces = Json::array();
  for (const auto& f : c.face_tuple) faces.push_back(to_json(f));
  return {{"signature", c.signature},
          {"volume", to_json(c.volume)},
          {"bracket_squared", c.bracket_squared ? to_json(*c.bracket_squared) : Json(nullptr)},
          {"faces", faces},
          {"vertices", vertices_json(c.cell_polytope)}};
}

inline Json to_json(const SubdivisionAudit& a) {
  return {{"cell_volume_sum", to_json(a.cell_volume_sum)},
          {"sum_volume", to_json(a.sum_volume)},
          {"volume_ok", a.volume_ok},
          {"audited_points", a.audited_points},
          {"overlaps", a.overlaps},
          {"uncovered", a.uncovered},
          {"failures", a.failures},
          {"ok", a.ok()}};
}

inline Json to_json(const std::map<std::vector<int>, Rational>& sums) {
  Json a = Json::array();
  for (const auto& [sig, vol] : sums) a.push_back({{"signature", sig}, {"volume", to_json(vol)}});
  return a;
}

}  // namespace mixvol
