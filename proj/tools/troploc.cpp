// troploc: solve location problems, build consensus trees and draw n=3 pictures.
//
// Exit codes: 0 success, 2 input or validation error, 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "troploc/troploc.hpp"

namespace {

using troploc::InputError;
using troploc::NumericError;
using troploc::config::json;
using troploc::config::RunConfig;

void setup_logging() {
  auto logger = spdlog::stderr_color_st("troploc");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("TROPLOC_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("cannot write " + path);
}

troploc::TorusPoint load_kernel(const std::string& path) {
  const auto cloud = troploc::io::load_cloud(path);
  if (cloud.size() != 1) throw InputError("kernel file must hold exactly one point");
  return cloud[0];
}

troploc::GaugeShape gauge_or(const RunConfig& c, troploc::GaugeShape fallback) {
  return c.gauge ? troploc::config::gauge_from_json(*c.gauge) : fallback;
}

bool polyhedral_ok(const troploc::GaugeShape& shape, const troploc::Aggregator& agg) {
  if (agg.kind() == troploc::Aggregator::Kind::SumSquares) return false;
  if (const auto* l = std::get_if<troploc::TropLp>(&shape)) return l->p == 1.0 || l->p == troploc::kInf;
  return std::holds_alternative<troploc::SimplexGauge>(shape);
}

troploc::SolveReport solve_points(const RunConfig& c, const troploc::PointCloud& sites) {
  using namespace troploc;
  const auto& m = c.method;
  spdlog::info("solving {} on {} sites in dimension {}", m, sites.size(), sites.dim());
  if (m == "center") return solve_center(sites);
  if (m == "median") {
    if (c.gauge) throw InputError("median uses the asymmetric distance; pick fw-simplex for other gauges");
    return solve_fw_simplex_gauge(sites, c.weights, {});
  }
  if (m == "fw-simplex") {
    const auto shape = gauge_or(c, SimplexGauge{std::vector<double>(sites.dim(), 1.0)});
    const auto* s = std::get_if<SimplexGauge>(&shape);
    if (!s) throw InputError("fw-simplex needs a simplex gauge");
    return solve_fw_simplex_gauge(sites, c.weights, s->lambda);
  }
  if (m == "frechet") {
    if (c.gauge) throw InputError("frechet uses the symmetric distance; pick fw-sym with sum_squares for other gauges");
    const auto p = LocationProblem::uniform(sites, TropLp{kInf}, Aggregator::sum_squares(c.weights));
    return solve_subgradient(p, solve_center(sites).optimum);
  }
  if (m == "fw-sym") {
    const auto shape = gauge_or(c, TropLp{kInf});
    if (std::holds_alternative<HyperplaneOrderStat>(shape)) {
      throw InputError("hyperplane gauges are fitted with hyperplane-l1 or hyperplane-linf");
    }
    const auto agg = config::aggregator_from(c.aggregator, c.weights);
    auto p = LocationProblem::uniform(sites, shape, agg);
    if (c.regularize) {
      std::optional<TorusPoint> kernel;
      if (!c.kernel.empty()) kernel = load_kernel(c.kernel);
      p = regularize(std::move(p), c.lambda.value_or(0.5), kernel);
    }
    if (polyhedral_ok(shape, agg)) return solve_polyhedral(p);
    return solve_subgradient(p, solve_center(sites).optimum);
  }
  if (m == "hyperplane-l1") return solve_best_fit_hyperplane(sites, HyperplaneError::L1);
  if (m == "hyperplane-linf") return solve_best_fit_hyperplane(sites, HyperplaneError::Linf);
  throw InputError("unknown method '" + m + "'");
}

int cmd_solve(const RunConfig& c) {
  using namespace troploc;
  SolveReport r;
  json request = {{"method", c.method}};
  std::optional<PointCloud> sites;
  if (c.method == "set-sites") {
    SetLocationProblem p;
    for (const auto& path : c.sets) p.sets.push_back(config::load_set(path));
    p.shape = gauge_or(c, TropLp{1.0});
    p.aggregator = config::aggregator_from(c.aggregator, c.weights);
    if (!c.plot.empty() && p.sets.front().dim() != 3) throw InputError("plotting is defined only for n=3");
    r = solve_set_sites(p);
    sites = union_generators(p.sets);
    request["sets"] = c.sets;
    request["gauge"] = config::gauge_to_json(p.shape);
  } else {
    sites = io::load_cloud(c.points);
    if (!c.plot.empty() && sites->dim() != 3) throw InputError("plotting is defined only for n=3");
    r = solve_points(c, *sites);
    request["points"] = c.points;
  }
  r.in_hull = in_hull_max(*sites, r.optimum, c.eps);
  if (!r.in_hull) throw NumericError("optimum failed the hull check at eps " + io::format_double(c.eps));
  if (c.regularize) request["lambda"] = c.lambda.value_or(0.5);
  auto out = config::report_to_json(r);
  out["request"] = std::move(request);
  const auto text = out.dump(2) + "\n";
  std::cout << text;
  if (!c.report.empty()) write_text(c.report, text);
  if (!c.plot.empty()) {
    plot::Options opt;
    opt.seed = c.seed;
    write_text(c.plot, plot::render_svg(*sites, {{c.method, r.optimum}}, opt));
  }
  return 0;
}

troploc::ConsensusMethod consensus_method(const std::string& m) {
  using troploc::ConsensusMethod;
  if (m == "median") return ConsensusMethod::Median;
  if (m == "center") return ConsensusMethod::Center;
  if (m == "frechet") return ConsensusMethod::Frechet;
  return ConsensusMethod::FwSymRegularized;
}

int cmd_consensus(const RunConfig& c) {
  using namespace troploc;
  const auto trees = load_trees(c.trees);
  ConsensusOptions opt;
  opt.method = consensus_method(c.method);
  opt.lambda = c.lambda.value_or(0.5);
  opt.normalize_heights = c.normalize_heights;
  spdlog::info("consensus of {} trees by {}", trees.size(), c.method);
  const auto res = consensus(trees, opt);
  if (!res.starts_agree) spdlog::warn("the consensus optimum is not unique; returning the first representative");

  const auto newick = write_newick(res.tree);
  const auto& taxa = res.matrix.taxa;
  // Clades seen in any input, with their support and whether the consensus keeps them.
  std::map<std::vector<std::string>, std::size_t> support;
  for (const auto& t : trees) {
    for (const auto& cl : clades(opt.normalize_heights ? normalize_heights(t) : t)) ++support[cl];
  }
  const double threshold = majority_threshold(taxa.size());
  const double absence = absence_threshold(taxa.size());
  json clade_list = json::array();
  std::size_t violations = 0;
  for (const auto& [cl, count] : support) {
    Nesting nest{cl, {}};
    for (const auto& s : taxa) {
      if (!std::binary_search(cl.begin(), cl.end(), s)) nest.B.push_back(s);
    }
    const bool shown = has_nesting(res.matrix, nest);
    const double frac = static_cast<double>(count) / static_cast<double>(trees.size());
    if (c.check_majority && ((frac > threshold && !shown) || (frac < absence && shown))) ++violations;
    clade_list.push_back({{"clade", cl}, {"support", frac}, {"displayed", shown}});
  }
  json report = {{"method", c.method},
                 {"taxa", taxa},
                 {"newick", newick},
                 {"objective", res.report.objective},
                 {"in_hull", res.report.in_hull},
                 {"ultrametric", is_ultrametric(res.matrix, std::max(c.eps, kUltrametricEps))},
                 {"unique", res.starts_agree},
                 {"matrix", res.matrix.upper_triangle()},
                 {"clades", std::move(clade_list)}};
  if (opt.method == ConsensusMethod::FwSymRegularized) report["lambda"] = opt.lambda;
  if (c.check_majority) {
    report["majority"] = {{"threshold", threshold}, {"absence_threshold", absence}, {"violations", violations}};
  }
  std::cout << newick << "\n";
  if (c.check_majority) {
    std::cout << "majority_threshold " << io::format_double(threshold) << "\n";
    std::cout << "absence_threshold " << io::format_double(absence) << "\n";
  }
  if (!c.report.empty()) write_text(c.report, report.dump(2) + "\n");
  return 0;
}

int cmd_plot(const RunConfig& c) {
  using namespace troploc;
  const auto sites = io::load_cloud(c.points);
  if (sites.dim() != 3) throw InputError("plotting is defined only for n=3");
  std::vector<std::string> methods = {"center", "median", "frechet", "fw-sym"};
  if (!c.method.empty()) methods = {c.method};
  std::vector<plot::Marker> markers;
  for (const auto& m : methods) {
    RunConfig one = c;
    one.method = m;
    markers.push_back({m, solve_points(one, sites).optimum});
  }
  plot::Options opt;
  opt.seed = c.seed;
  write_text(c.plot, plot::render_svg(sites, markers, opt));
  return 0;
}

// Flags given on the command line win over the config file.
struct Flags {
  std::string config, method, points, trees, kernel, report, plot, aggregator, gauge;
  std::vector<std::string> sets;
  std::vector<double> weights;
  double lambda = 0.0, eps = 0.0;
  std::uint64_t seed = 1;
  bool regularize = false, check_majority = false, normalize_heights = false;
};

RunConfig merge(const std::string& command, const Flags& f, CLI::App& sub) {
  RunConfig c;
  if (!f.config.empty()) {
    c = troploc::config::run_config_from_json(troploc::io::parse_json(troploc::io::read_file(f.config), f.config));
    if (!c.command.empty() && c.command != command) {
      throw InputError("config is for '" + c.command + "', not '" + command + "'");
    }
  }
  c.command = command;
  auto given = [&](const char* name) { return sub.get_option_no_throw(name) && sub.count(name) > 0; };
  if (given("--method")) c.method = f.method;
  if (given("--points")) c.points = f.points;
  if (given("--trees")) c.trees = f.trees;
  if (given("--kernel")) c.kernel = f.kernel;
  if (given("--report")) c.report = f.report;
  if (given("--plot")) c.plot = f.plot;
  if (given("--aggregator")) c.aggregator = f.aggregator;
  if (given("--sets")) c.sets = f.sets;
  if (given("--weights")) c.weights = f.weights;
  if (given("--lambda")) c.lambda = f.lambda;
  if (given("--eps")) c.eps = f.eps;
  if (given("--seed")) c.seed = f.seed;
  if (given("--regularize")) c.regularize = true;
  if (given("--check-majority")) c.check_majority = true;
  if (given("--normalize-heights")) c.normalize_heights = true;
  if (given("--gauge")) {
    auto g = troploc::io::parse_json(f.gauge, "--gauge");
    troploc::config::gauge_from_json(g);
    c.gauge = std::move(g);
  }
  if (c.method.empty()) {
    if (command == "consensus") c.method = "fw-sym";
    if (command == "solve") throw InputError("solve needs --method");
  }
  troploc::config::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Tropical location problems and phylogenetic consensus"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "Solve a location problem; prints a JSON report");
  auto* cons = app.add_subcommand("consensus", "Consensus of equidistant trees; prints canonical Newick");
  auto* plot = app.add_subcommand("plot", "SVG of the n=3 torus with hull and optima");
  for (auto* sub : {solve, cons, plot}) {
    sub->add_option("--config", f.config, "JSON run configuration");
    sub->add_option("--method", f.method, "Solver or consensus method");
    sub->add_option("--eps", f.eps, "Tolerance for hull and ultrametric checks");
    sub->add_option("--report", f.report, "Write the JSON report here");
    sub->add_option("--seed", f.seed, "Sampling seed for plots");
    sub->add_option("--lambda", f.lambda, "Regularization weight");
  }
  for (auto* sub : {solve, plot}) {
    sub->add_option("--points", f.points, "Sites (.csv or .json)");
    sub->add_option("--plot", f.plot, "Write an SVG here");
    sub->add_option("--weights", f.weights, "Per-site weights");
    sub->add_option("--gauge", f.gauge, "Gauge as JSON, e.g. {\"kind\":\"lp\",\"p\":2}");
    sub->add_option("--aggregator", f.aggregator, "sum | weighted_sum | sum_squares | max");
  }
  solve->add_option("--sets", f.sets, "Set-site files ({\"generators\": [...]})");
  solve->add_flag("--regularize", f.regularize, "Add lambda * d_asym(kernel, x)");
  solve->add_option("--kernel", f.kernel, "Regularizer kernel (defaults to the tropical center)");
  cons->add_option("--trees", f.trees, "Newick file (one tree per line) or directory of .nwk files");
  cons->add_flag("--check-majority", f.check_majority, "Report the majority bounds and their checks");
  cons->add_flag("--normalize-heights", f.normalize_heights, "Extend pendant edges of non-equidistant trees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(merge("solve", f, *solve));
    if (cons->parsed()) return cmd_consensus(merge("consensus", f, *cons));
    return cmd_plot(merge("plot", f, *plot));
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const NumericError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
}
