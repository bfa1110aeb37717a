// Runs the built troploc binary end to end.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "troploc/troploc.hpp"

using namespace troploc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TROPLOC_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(TROPLOC_DATA_DIR) + "/" + name; }

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("troploc_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json solve_json(const std::string& args) {
  const auto r = run("solve " + args);
  EXPECT_EQ(r.code, 0) << args;
  return r.code == 0 ? json::parse(r.out) : json{};
}

TorusPoint optimum(const json& j) { return TorusPoint(j["optimum"].get<std::vector<double>>()); }

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Cli, CenterOnSample) {
  const auto j = solve_json("--method center --points " + data("V.csv"));
  EXPECT_TRUE(equivalent(optimum(j), TorusPoint{1, 1, 0}, 1e-9));
  EXPECT_NEAR(j["objective"].get<double>(), 3.0, 1e-9);
  EXPECT_TRUE(j["in_hull"].get<bool>());
  EXPECT_EQ(j["request"]["method"], "center");
}

TEST(Cli, PointMethodsOnSample) {
  const auto v = io::load_cloud(data("V.csv"));
  EXPECT_NEAR(solve_json("--method median --points " + data("V.csv"))["objective"].get<double>(), 10.0, 1e-9);
  EXPECT_NEAR(solve_json("--method fw-sym --points " + data("V.csv"))["objective"].get<double>(), 8.0, 1e-9);
  const auto f = solve_json("--method frechet --points " + data("V.csv"));
  EXPECT_NEAR(f["objective"].get<double>(), 16.0, 1e-6);
  EXPECT_TRUE(equivalent(optimum(f), TorusPoint{1, 1, 0}, 1e-3));
  for (const char* m : {"fw-simplex", "hyperplane-l1", "hyperplane-linf"}) {
    const auto j = solve_json(std::string("--method ") + m + " --points " + data("V.csv"));
    EXPECT_TRUE(in_hull_max(v, optimum(j)));
  }
}

TEST(Cli, SinglePointIsItsOwnOptimum) {
  for (const char* m : {"center", "median", "frechet", "fw-sym", "fw-simplex"}) {
    const auto j = solve_json(std::string("--method ") + m + " --points " + data("single.csv"));
    EXPECT_TRUE(equivalent(optimum(j), TorusPoint{2, 5, 1}, 1e-9)) << m;
    EXPECT_NEAR(j["objective"].get<double>(), 0.0, 1e-9) << m;
  }
}

TEST(Cli, GaugesAggregatorsAndRegularizer) {
  const auto j = solve_json("--method fw-sym --points " + data("V.csv") + " --gauge '{\"kind\":\"lp\",\"p\":2}'");
  EXPECT_TRUE(in_hull_max(io::load_cloud(data("V.csv")), optimum(j)));
  const auto m = solve_json("--method fw-sym --aggregator max --gauge '{\"kind\":\"lp\",\"p\":1}' --points " +
                            data("V.csv"));
  EXPECT_NEAR(m["objective"].get<double>(), 3.0, 1e-9);
  const auto r = solve_json("--method fw-sym --regularize --lambda 0.25 --points " + data("V.csv"));
  EXPECT_EQ(r["request"]["lambda"].get<double>(), 0.25);
  const auto kernel = write("kernel.csv", "1,1,0\n");
  const auto k = solve_json("--method fw-sym --regularize --kernel " + kernel + " --points " + data("V.csv"));
  EXPECT_TRUE(equivalent(optimum(k), TorusPoint{1, 1, 0}, 1e-9));
}

TEST(Cli, SetSites) {
  const auto j = solve_json("--method set-sites --sets " + data("set_a.json") + " " + data("set_b.json"));
  EXPECT_NEAR(j["objective"].get<double>(), 3.0, 1e-9);
  EXPECT_EQ(j["request"]["sets"].size(), 2u);
}

TEST(Cli, ReportAndConfigFile) {
  const auto report = (scratch() / "report.json").string();
  const auto r = run("solve --method center --points " + data("V.csv") + " --report " + report);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(report), r.out);

  const auto cfg = write("run.json", "{\"command\":\"solve\",\"method\":\"median\",\"points\":\"" + data("V.csv") + "\"}");
  EXPECT_EQ(json::parse(run("solve --config " + cfg).out)["request"]["method"], "median");
  // Flags override the file.
  EXPECT_EQ(json::parse(run("solve --config " + cfg + " --method center").out)["request"]["method"], "center");
  EXPECT_EQ(run("consensus --config " + cfg).code, 2);
  EXPECT_EQ(run("solve --config " + write("bad.json", "{\"colour\":1}")).code, 2);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("solve --points " + data("V.csv")).code, 2);
  EXPECT_EQ(run("solve --method nope --points " + data("V.csv")).code, 2);
  EXPECT_EQ(run("solve --method center --points " + (scratch() / "absent.csv").string()).code, 2);
  EXPECT_EQ(run("solve --method center --points " + write("ragged.csv", "0,1,2\n1,2\n")).code, 2);
  EXPECT_EQ(run("solve --method median --regularize --points " + data("V.csv")).code, 2);
  EXPECT_EQ(run("solve --method fw-sym --kernel x.csv --points " + data("V.csv")).code, 2);
  EXPECT_EQ(run("solve --method fw-sym --gauge '{\"kind\":\"lp\"}' --points " + data("V.csv")).code, 2);
  EXPECT_EQ(run("solve --method fw-sym --gauge 'not json' --points " + data("V.csv")).code, 2);
  EXPECT_EQ(run("solve --method center --eps 0 --points " + data("V.csv")).code, 2);
  // A kernel outside the hull of the sites is rejected.
  EXPECT_EQ(run("solve --method fw-sym --regularize --kernel " + write("far.csv", "0,0,9\n") + " --points " +
                data("V.csv"))
                .code,
            2);
  EXPECT_EQ(run("consensus --method median").code, 2);
  EXPECT_EQ(run("consensus --method center --check-majority --trees " + data("cherries.nwk")).code, 2);
  EXPECT_EQ(run("consensus --trees " + write("broken.nwk", "((a:1,b:1),c:2);\n")).code, 2);
}

TEST(Cli, ConsensusOnCherries) {
  for (const char* m : {"median", "center", "frechet", "fw-sym"}) {
    const auto r = run(std::string("consensus --method ") + m + " --trees " + data("cherries.nwk"));
    ASSERT_EQ(r.code, 0) << m;
    const auto line = r.out.substr(0, r.out.find('\n'));
    const auto tree = parse_newick(line);
    EXPECT_TRUE(clades(tree).contains(std::vector<std::string>{"a", "b"})) << m << ": " << line;
    EXPECT_TRUE(is_equidistant(tree));
  }
  const auto report = (scratch() / "consensus.json").string();
  const auto r = run("consensus --method median --check-majority --trees " + data("cherries.nwk") + " --report " + report);
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("majority_threshold 0.6666666666666667\n"), std::string::npos);
  EXPECT_NE(r.out.find("absence_threshold 0.3333333333333333\n"), std::string::npos);
  const auto j = json::parse(slurp(report));
  EXPECT_EQ(j["majority"]["violations"].get<int>(), 0);
  EXPECT_TRUE(j["ultrametric"].get<bool>());
  EXPECT_TRUE(j["in_hull"].get<bool>());
}

TEST(Cli, PlotIsDeterministic) {
  const auto a = (scratch() / "a.svg").string();
  const auto b = (scratch() / "b.svg").string();
  const auto c = (scratch() / "c.svg").string();
  ASSERT_EQ(run("plot --points " + data("V.csv") + " --plot " + a).code, 0);
  ASSERT_EQ(run("plot --points " + data("V.csv") + " --plot " + b).code, 0);
  ASSERT_EQ(run("plot --points " + data("V.csv") + " --plot " + c + " --seed 9").code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
  EXPECT_NE(slurp(a).find("<svg"), std::string::npos);
}

TEST(Cli, PlotSinglePointAndWrongDimension) {
  const auto one = (scratch() / "one.svg").string();
  ASSERT_EQ(run("plot --points " + data("single.csv") + " --plot " + one).code, 0);
  const auto svg = slurp(one);
  EXPECT_EQ(count(svg, "<path"), 1u);
  EXPECT_NE(svg.find("center, median, frechet, fw-sym"), std::string::npos);

  const auto flat = write("flat.csv", "0,1\n1,0\n");
  const auto none = (scratch() / "none.svg").string();
  EXPECT_EQ(run("plot --points " + flat + " --plot " + none).code, 2);
  EXPECT_FALSE(fs::exists(none));
  EXPECT_EQ(run("solve --method center --points " + flat + " --plot " + none).code, 2);
  EXPECT_FALSE(fs::exists(none));
}
