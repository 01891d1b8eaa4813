#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "homdelay/errors.hpp"
#include "homdelay/history.hpp"
#include "homdelay/krasovskii.hpp"
#include "homdelay/model.hpp"
#include "homdelay/razumikhin.hpp"
#include "homdelay/registry.hpp"
#include "homdelay/tuner.hpp"

namespace homdelay {

using Json = nlohmann::json;

inline Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

namespace detail {

inline Rational RationalFromJson(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) {
    const double v = j.get<double>();
    if (v != std::floor(v)) {
      throw ConfigError("non-integer number " + j.dump() +
                        " where a rational is expected; write it as \"p/q\"");
    }
    return Rational(static_cast<std::int64_t>(v));
  }
  if (j.is_string()) return Rational::Parse(j.get<std::string>());
  throw ConfigError("expected a number or \"p/q\", got " + j.dump());
}

inline std::vector<Rational> RationalsFromJson(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected an exponent list");
  std::vector<Rational> out;
  for (const auto& e : j) out.push_back(RationalFromJson(e));
  return out;
}

template <typename T>
T Required(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Declarative system: {n, mu, h, terms: [{target, coeff, x_exponents,
/// y_exponents}], lyapunov: {gamma, k0, k1, k2, k3, w, terms: [{coeff,
/// exponents}]}, growth?: {m, m1, m2}}. Missing growth constants are
/// estimated by sampling.
inline SystemModel system_from_json(const Json& j) {
  const auto n = detail::Required<std::size_t>(j, "n");
  if (!j.contains("mu")) throw ConfigError("missing field 'mu'");
  const Rational mu = detail::RationalFromJson(j.at("mu"));
  const auto h = detail::Required<double>(j, "h");
  std::vector<RhsTerm> terms;
  for (const auto& t : detail::Required<Json>(j, "terms")) {
    terms.push_back({detail::Required<std::size_t>(t, "target"),
                     detail::Required<double>(t, "coeff"),
                     detail::RationalsFromJson(t.at("x_exponents")),
                     detail::RationalsFromJson(t.at("y_exponents"))});
  }
  auto rhs = HomogeneousRHS::FromTerms(n, mu, h, std::move(terms));
  const Json ly = detail::Required<Json>(j, "lyapunov");
  LyapunovConstants lc;
  lc.gamma = detail::Required<double>(ly, "gamma");
  lc.k0 = detail::Required<double>(ly, "k0");
  lc.k1 = detail::Required<double>(ly, "k1");
  lc.k2 = detail::Required<double>(ly, "k2");
  lc.k3 = detail::Required<double>(ly, "k3");
  lc.w = detail::Required<double>(ly, "w");
  std::vector<Monomial> monos;
  for (const auto& t : detail::Required<Json>(ly, "terms")) {
    monos.push_back({detail::Required<double>(t, "coeff"),
                     detail::RationalsFromJson(t.at("exponents"))});
  }
  auto lyap = LyapunovData::FromPolynomial(lc, Polynomial(n, std::move(monos)));
  GrowthConstants g;
  const Json gr = j.value("growth", Json::object());
  if (!gr.contains("m") || !gr.contains("m1") || !gr.contains("m2")) {
    const GrowthConstants est = estimate_growth_constants(rhs);
    g = est;
  }
  g.m = gr.value("m", g.m);
  g.m1 = gr.value("m1", g.m1);
  g.m2 = gr.value("m2", g.m2);
  return {std::move(rhs), std::move(lyap), g};
}

/// {constant: [..]} or {samples: {theta: [...], values: [[...], ...]}}.
/// `intervals` applies to constant histories only.
inline HistorySegment history_from_json(const Json& j, double h,
                                        std::size_t intervals = 16) {
  if (j.contains("constant")) {
    const auto v = j.at("constant").get<std::vector<double>>();
    return HistorySegment::Constant(
        h, Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())),
        intervals);
  }
  if (j.contains("samples")) {
    const Json& s = j.at("samples");
    const auto theta = detail::Required<std::vector<double>>(s, "theta");
    const auto rows =
        detail::Required<std::vector<std::vector<double>>>(s, "values");
    std::vector<Vector> values;
    for (const auto& r : rows) {
      values.push_back(Eigen::Map<const Vector>(
          r.data(), static_cast<Eigen::Index>(r.size())));
    }
    HistorySegment seg = HistorySegment::FromSamples(theta, values);
    if (std::abs(seg.delay() - h) > 1e-9 * std::max(1.0, h)) {
      throw ConfigError("history samples span a different delay than h");
    }
    return seg;
  }
  throw ConfigError("history needs 'constant' or 'samples'");
}

inline Json to_json(const GrowthConstants& g) {
  return {{"m", g.m}, {"m1", g.m1}, {"m2", g.m2}};
}

inline Json to_json(const LyapunovConstants& c) {
  return {{"gamma", c.gamma}, {"k0", c.k0}, {"k1", c.k1},
          {"k2", c.k2},       {"k3", c.k3}, {"w", c.w}};
}

inline Json to_json(const RazumikhinCertificate& c) {
  return {{"method", "razumikhin"},
          {"alpha", c.alpha},   {"delta", c.delta}, {"h", c.h},
          {"mu", c.mu},         {"gamma", c.gamma}, {"m", c.m},
          {"k0", c.k0},         {"k1", c.k1},       {"k4", c.k4},
          {"H", c.H},           {"k5", c.k5},       {"kappa", c.kappa},
          {"K", c.K},           {"Delta", c.Delta}, {"d_bar", c.d_bar},
          {"cap2", c.cap2},     {"cap3", c.cap3},   {"rho", c.rho},
          {"A", c.A},           {"B", c.B},         {"c_tilde_1", c.c_tilde_1},
          {"c_tilde_2", c.c_tilde_2}};
}

inline Json to_json(const KrasovskiiCertificate& c) {
  return {{"method", "krasovskii"},
          {"path", ToString(c.path)},
          {"h", c.h},       {"mu", c.mu},       {"gamma", c.gamma},
          {"k1", c.k1},     {"w", c.w},         {"w0", c.w0},
          {"w1", c.w1},     {"w2", c.w2},       {"chi", c.chi},
          {"delta", c.delta}, {"alpha1", c.alpha1}, {"alpha2", c.alpha2},
          {"H1", c.H1},     {"H2", c.H2},       {"a1", c.a1},
          {"a2", c.a2},     {"b1", c.b1},       {"b2", c.b2},
          {"b", c.b},       {"beta", c.beta},   {"L", c.L},
          {"c_w0", c.c_w0}, {"c_w2", c.c_w2},   {"c", c.c},
          {"L1", c.L1},     {"L2", c.L2},       {"Delta", c.Delta},
          {"c_hat_1", c.c_hat_1}, {"c_hat_2", c.c_hat_2}};
}

inline Json to_json(const AnyCertificate& c) {
  return std::visit([](const auto& x) { return to_json(x); }, c);
}

inline RazumikhinParams razumikhin_params_from_json(const Json& j,
                                                    RazumikhinParams p = {}) {
  p.alpha = j.value("alpha", p.alpha);
  if (j.contains("delta")) p.delta = j.at("delta").get<double>();
  if (j.contains("rho")) p.rho = j.at("rho").get<double>();
  p.rho_margin = j.value("rho_margin", p.rho_margin);
  return p;
}

inline KrasovskiiParams krasovskii_params_from_json(const Json& j,
                                                    KrasovskiiParams p = {}) {
  if (j.contains("path")) {
    const auto s = j.at("path").get<std::string>();
    if (s == "scalar") {
      p.path = KrasovskiiPath::kScalar;
    } else if (s == "general") {
      p.path = KrasovskiiPath::kGeneral;
    } else if (s == "auto") {
      p.path = KrasovskiiPath::kAuto;
    } else {
      throw ConfigError("unknown Krasovskii path '" + s + "'");
    }
  }
  if (j.contains("chi")) p.chi = j.at("chi").get<double>();
  if (j.contains("w1")) p.w1 = j.at("w1").get<double>();
  if (j.contains("w2")) p.w2 = j.at("w2").get<double>();
  if (j.contains("delta")) p.delta = j.at("delta").get<double>();
  if (j.contains("delta_scale")) {
    p.delta_scale = j.at("delta_scale").get<double>();
  }
  return p;
}

/// {target, method, budget?, seed?, bounds?: {name: [lo, hi], ...}}.
/// Without bounds the method's default box is used.
inline TuningProblem tuning_problem_from_json(const Json& j,
                                              const SystemModel& model) {
  TuningProblem p;
  p.target = ParseTuningTarget(j.value("target", std::string("maximize-delta")));
  p.method = ParseTuningMethod(
      j.value("method", std::string("krasovskii-scalar")));
  p.budget = j.value("budget", p.budget);
  p.seed = j.value("seed", p.seed);
  if (j.contains("bounds")) {
    for (const auto& [name, range] : j.at("bounds").items()) {
      const auto r = range.get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError("bound '" + name + "' needs [lo, hi]");
      p.bounds.push_back({name, r[0], r[1]});
    }
  } else {
    p.bounds = default_bounds(model, p.method);
  }
  return p;
}

inline Json to_json(const TuningResult& r, const TuningProblem& p) {
  Json params = Json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) params[r.names[i]] = r.params[i];
  return {{"target", ToString(p.target)},
          {"method", ToString(p.method)},
          {"budget", p.budget},
          {"seed", p.seed},
          {"evaluations", r.evaluations},
          {"score", r.score},
          {"grid_score", r.grid_score},
          {"params", params},
          {"certificate", to_json(r.certificate)}};
}

/// {example?: {id, alpha1, alpha2, zeta, mu, h}} merged into `spec`.
inline ExampleSpec example_from_json(const Json& j, ExampleSpec spec) {
  spec.id = j.value("id", spec.id);
  spec.alpha1 = j.value("alpha1", spec.alpha1);
  spec.alpha2 = j.value("alpha2", spec.alpha2);
  spec.zeta = j.value("zeta", spec.zeta);
  if (j.contains("mu")) spec.mu = detail::RationalFromJson(j.at("mu"));
  if (j.contains("h")) spec.h = j.at("h").get<double>();
  return spec;
}

}  // namespace homdelay
