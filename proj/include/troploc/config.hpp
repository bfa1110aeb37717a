#pragma once

// JSON plumbing: gauge and problem specs, run configuration, and reports.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "troploc/core.hpp"
#include "troploc/gauges.hpp"
#include "troploc/io.hpp"
#include "troploc/phylo.hpp"
#include "troploc/sets.hpp"
#include "troploc/solve.hpp"

namespace troploc::config {

using nlohmann::json;

/// {"kind":"lp","p":2|"inf"} | {"kind":"simplex","lambda":[...]} | {"kind":"hyperplane"}
inline GaugeShape gauge_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("gauge must be an object with a string \"kind\"");
  }
  const auto kind = j["kind"].get<std::string>();
  auto only = [&](std::set<std::string> keys) {
    for (const auto& [k, v] : j.items()) {
      if (!keys.contains(k)) throw InputError("gauge '" + kind + "' has unknown key \"" + k + "\"");
    }
  };
  if (kind == "lp") {
    only({"kind", "p"});
    if (!j.contains("p")) throw InputError("lp gauge needs \"p\"");
    const auto& p = j["p"];
    double v = 0.0;
    if (p.is_string() && (p.get<std::string>() == "inf" || p.get<std::string>() == "infinity")) {
      v = kInf;
    } else if (p.is_number()) {
      v = p.get<double>();
    } else {
      throw InputError("lp gauge \"p\" must be a number >= 1 or \"inf\"");
    }
    if (!(v >= 1.0)) throw InputError("lp gauge \"p\" must be >= 1");
    return TropLp{v};
  }
  if (kind == "simplex") {
    only({"kind", "lambda"});
    if (!j.contains("lambda") || !j["lambda"].is_array()) throw InputError("simplex gauge needs a \"lambda\" array");
    std::vector<double> lam;
    for (const auto& v : j["lambda"]) {
      if (!v.is_number()) throw InputError("simplex gauge \"lambda\" must hold numbers");
      lam.push_back(v.get<double>());
    }
    troploc::detail::check_lambda(lam);
    return SimplexGauge{std::move(lam)};
  }
  if (kind == "hyperplane") {
    only({"kind"});
    return HyperplaneOrderStat{};
  }
  throw InputError("unknown gauge kind '" + kind + "'");
}

inline json gauge_to_json(const GaugeShape& shape) {
  if (const auto* l = std::get_if<TropLp>(&shape)) {
    return l->p == kInf ? json{{"kind", "lp"}, {"p", "inf"}} : json{{"kind", "lp"}, {"p", l->p}};
  }
  if (const auto* s = std::get_if<SimplexGauge>(&shape)) return json{{"kind", "simplex"}, {"lambda", s->lambda}};
  if (std::holds_alternative<HyperplaneOrderStat>(shape)) return json{{"kind", "hyperplane"}};
  return json{{"kind", "custom"}};
}

inline Aggregator aggregator_from(const std::string& name, const std::vector<double>& weights) {
  if (name == "sum" || name.empty()) return weights.empty() ? Aggregator::sum() : Aggregator::weighted_sum(weights);
  if (name == "weighted_sum") {
    if (weights.empty()) throw InputError("weighted_sum needs \"weights\"");
    return Aggregator::weighted_sum(weights);
  }
  if (name == "sum_squares") return Aggregator::sum_squares(weights);
  if (name == "max") {
    if (!weights.empty()) throw InputError("the max aggregator takes no weights");
    return Aggregator::max();
  }
  throw InputError("unknown aggregator '" + name + "'");
}

inline json report_to_json(const SolveReport& r) {
  json trace = json::array();
  for (const auto& s : r.descent_trace) trace.push_back({{"coordinate", s.coordinate}, {"step", s.step}});
  return json{{"method", method_name(r.method)},
              {"optimum", r.optimum.vec()},
              {"objective", r.objective},
              {"in_hull", r.in_hull},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"descent_trace", std::move(trace)}};
}

/// Everything a CLI invocation needs; loadable from JSON and overridable by flags.
struct RunConfig {
  std::string command;
  std::string method;
  std::string points;
  std::vector<std::string> sets;
  std::string trees;
  std::optional<double> lambda;
  bool regularize = false;
  std::string kernel;
  double eps = kEps;
  std::string report;
  std::string plot;
  std::uint64_t seed = 1;
  std::optional<json> gauge;
  std::string aggregator;
  std::vector<double> weights;
  bool check_majority = false;
  bool normalize_heights = false;
};

inline const std::vector<std::string>& solve_methods() {
  static const std::vector<std::string> m = {"center", "median", "fw-simplex", "fw-sym", "frechet",
                                             "hyperplane-l1", "hyperplane-linf", "set-sites"};
  return m;
}

inline const std::vector<std::string>& consensus_methods() {
  static const std::vector<std::string> m = {"median", "center", "frechet", "fw-sym"};
  return m;
}

namespace detail {

inline std::string want_string(const json& j, const char* key) {
  if (!j.is_string()) throw InputError(std::string("config \"") + key + "\" must be a string");
  return j.get<std::string>();
}

inline bool want_bool(const json& j, const char* key) {
  if (!j.is_boolean()) throw InputError(std::string("config \"") + key + "\" must be a boolean");
  return j.get<bool>();
}

inline double want_number(const json& j, const char* key) {
  if (!j.is_number()) throw InputError(std::string("config \"") + key + "\" must be a number");
  return j.get<double>();
}

}  // namespace detail

/// Structural validation (known keys, JSON types) of a config object.
inline RunConfig run_config_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw InputError("config must be a JSON object");
  RunConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "command") c.command = want_string(v, "command");
    else if (k == "method") c.method = want_string(v, "method");
    else if (k == "points") c.points = want_string(v, "points");
    else if (k == "trees") c.trees = want_string(v, "trees");
    else if (k == "kernel") c.kernel = want_string(v, "kernel");
    else if (k == "report") c.report = want_string(v, "report");
    else if (k == "plot") c.plot = want_string(v, "plot");
    else if (k == "aggregator") c.aggregator = want_string(v, "aggregator");
    else if (k == "regularize") c.regularize = want_bool(v, "regularize");
    else if (k == "check_majority") c.check_majority = want_bool(v, "check_majority");
    else if (k == "normalize_heights") c.normalize_heights = want_bool(v, "normalize_heights");
    else if (k == "lambda") c.lambda = want_number(v, "lambda");
    else if (k == "eps") c.eps = want_number(v, "eps");
    else if (k == "gauge") {
      gauge_from_json(v);
      c.gauge = v;
    } else if (k == "seed") {
      if (!v.is_number_unsigned()) throw InputError("config \"seed\" must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (k == "sets") {
      if (!v.is_array()) throw InputError("config \"sets\" must be an array of paths");
      for (const auto& s : v) c.sets.push_back(want_string(s, "sets"));
    } else if (k == "weights") {
      if (!v.is_array()) throw InputError("config \"weights\" must be an array of numbers");
      for (const auto& w : v) c.weights.push_back(want_number(w, "weights"));
    } else {
      throw InputError("unknown config key \"" + k + "\"");
    }
  }
  return c;
}

/// Semantic checks once flags and config file are merged.
inline void validate(const RunConfig& c) {
  auto one_of = [](const std::string& v, const std::vector<std::string>& options) {
    return std::find(options.begin(), options.end(), v) != options.end();
  };
  if (!(c.eps > 0.0) || !std::isfinite(c.eps)) throw InputError("eps must be positive");
  if (c.lambda && !(*c.lambda > 0.0)) throw InputError("lambda must be positive");
  for (double w : c.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("weights must be positive");
  }
  if (c.command == "solve") {
    if (!one_of(c.method, solve_methods())) throw InputError("unknown solve method '" + c.method + "'");
    if (c.method == "set-sites") {
      if (c.sets.empty()) throw InputError("set-sites needs at least one --sets file");
    } else if (c.points.empty()) {
      throw InputError("solve needs --points");
    }
    if (c.regularize && c.method != "fw-sym") throw InputError("--regularize applies to fw-sym only");
    if (!c.kernel.empty() && !c.regularize) throw InputError("--kernel requires --regularize");
  } else if (c.command == "consensus") {
    if (!one_of(c.method, consensus_methods())) throw InputError("unknown consensus method '" + c.method + "'");
    if (c.trees.empty()) throw InputError("consensus needs --trees");
    if (c.check_majority && c.method != "median") throw InputError("--check-majority applies to the median method");
  } else if (c.command == "plot") {
    if (c.points.empty()) throw InputError("plot needs --points");
    if (c.plot.empty()) throw InputError("plot needs --plot FILE");
    if (!c.method.empty() && !one_of(c.method, {"center", "median", "frechet", "fw-sym"})) {
      throw InputError("plot draws center, median, frechet or fw-sym optima");
    }
  } else {
    throw InputError("unknown command '" + c.command + "'");
  }
}

/// {"generators": [[...], ...]}
inline TropicalSet set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("generators")) throw InputError("a set file needs a \"generators\" array");
  for (const auto& [k, v] : j.items()) {
    if (k != "generators") throw InputError("unknown set key \"" + k + "\"");
  }
  return TropicalSet(io::cloud_from_json(j["generators"]));
}

inline TropicalSet load_set(const std::string& path) { return set_from_json(io::parse_json(io::read_file(path), path)); }

}  // namespace troploc::config
