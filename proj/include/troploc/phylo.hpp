#pragma once

// Equidistant rooted trees, their ultrametric matrices as points of the torus
// of dimension C(n,2), nestings, and tropically convex consensus.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "troploc/core.hpp"
#include "troploc/gauges.hpp"
#include "troploc/io.hpp"
#include "troploc/solve.hpp"

namespace troploc {

inline constexpr double kUltrametricEps = 1e-6;

struct PhyloNode {
  std::string label;
  double length = 0.0;  // edge to the parent; unused at the root
  int parent = -1;
  std::vector<int> children;
  bool leaf() const { return children.empty(); }
};

/// Rooted tree with weighted edges. Node 0 is the root.
class PhyloTree {
 public:
  std::vector<PhyloNode> nodes;

  const PhyloNode& root() const { return nodes.front(); }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].leaf()) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  /// Sorted leaf labels.
  std::vector<std::string> taxa() const {
    std::vector<std::string> out;
    for (int v : leaves()) out.push_back(nodes[v].label);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Distance from the root to every node.
  std::vector<double> depths() const {
    std::vector<double> d(nodes.size(), 0.0);
    // Parents precede children in both parser and builder output.
    for (std::size_t i = 1; i < nodes.size(); ++i) d[i] = d[nodes[i].parent] + nodes[i].length;
    return d;
  }
};

namespace detail {

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : s_(text) {}

  PhyloTree parse() {
    PhyloTree t;
    t.nodes.emplace_back();
    subtree(t, 0, true);
    skip_ws();
    expect(';');
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after ';'");
    std::set<std::string> seen;
    for (int v : t.leaves()) {
      if (!seen.insert(t.nodes[v].label).second) throw InputError("duplicate leaf label '" + t.nodes[v].label + "'");
    }
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("newick syntax error at byte " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool label_char(char c) { return c != '(' && c != ')' && c != ',' && c != ':' && c != ';'; }

  std::string label() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && label_char(s_[pos_])) ++pos_;
    std::string_view l = s_.substr(start, pos_ - start);
    while (!l.empty() && std::isspace(static_cast<unsigned char>(l.back()))) l.remove_suffix(1);
    return std::string(l);
  }

  void subtree(PhyloTree& t, int node, bool is_root) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      do {
        const int child = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        t.nodes[child].parent = node;
        t.nodes[node].children.push_back(child);
        subtree(t, child, false);
        skip_ws();
      } while (pos_ < s_.size() && s_[pos_] == ',' && ++pos_);
      expect(')');
      t.nodes[node].label = label();
    } else {
      const std::size_t at = pos_;
      t.nodes[node].label = label();
      if (t.nodes[node].label.empty()) {
        pos_ = at;
        fail("expected a leaf label or '('");
      }
    }
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && label_char(s_[pos_]) && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      double len = 0.0;
      try {
        len = io::parse_double(s_.substr(start, pos_ - start));
      } catch (const InputError&) {
        pos_ = start;
        fail("bad branch length");
      }
      if (!is_root && !(len > 0.0)) {
        pos_ = start;
        fail("branch lengths must be positive");
      }
      t.nodes[node].length = is_root ? 0.0 : len;
    } else if (!is_root) {
      fail("missing branch length");
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one tree. Internal nodes may have a single child.
inline PhyloTree parse_newick(std::string_view text) { return detail::NewickParser(text).parse(); }

namespace detail {

inline std::string smallest_label(const PhyloTree& t, int v, std::vector<std::string>& memo) {
  if (!memo[v].empty() || t.nodes[v].leaf()) {
    if (memo[v].empty()) memo[v] = t.nodes[v].label;
    return memo[v];
  }
  std::string best;
  for (int c : t.nodes[v].children) {
    auto s = smallest_label(t, c, memo);
    if (best.empty() || s < best) best = std::move(s);
  }
  memo[v] = best;
  return best;
}

inline void write_node(const PhyloTree& t, int v, std::vector<std::string>& memo, std::string& out) {
  const auto& node = t.nodes[v];
  if (!node.leaf()) {
    auto kids = node.children;
    std::sort(kids.begin(), kids.end(), [&](int a, int b) { return smallest_label(t, a, memo) < smallest_label(t, b, memo); });
    out += '(';
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out += ',';
      write_node(t, kids[i], memo, out);
    }
    out += ')';
  }
  out += node.label;
  if (v != 0) {
    out += ':';
    out += io::format_double(node.length);
  }
}

}  // namespace detail

/// Canonical Newick: children ordered by their smallest leaf label, shortest
/// round-trip number formatting, no root length.
inline std::string write_newick(const PhyloTree& t) {
  if (t.nodes.empty()) throw InputError("empty tree");
  std::vector<std::string> memo(t.nodes.size());
  std::string out;
  if (t.nodes.size() == 1) {
    // A bare leaf has no edge to carry a height.
    out = t.nodes[0].label;
  } else {
    detail::write_node(t, 0, memo, out);
  }
  out += ';';
  return out;
}

inline std::vector<double> leaf_heights(const PhyloTree& t) {
  const auto d = t.depths();
  std::vector<double> h;
  for (int v : t.leaves()) h.push_back(d[v]);
  return h;
}

inline bool is_equidistant(const PhyloTree& t, double eps = kUltrametricEps) {
  const auto h = leaf_heights(t);
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  return *hi - *lo <= eps * std::max(1.0, *hi);
}

/// Lengthens pendant edges so every leaf sits at the maximum root-to-leaf height.
inline PhyloTree normalize_heights(PhyloTree t) {
  const auto d = t.depths();
  double top = 0.0;
  for (int v : t.leaves()) top = std::max(top, d[v]);
  for (int v : t.leaves()) {
    if (v != 0) t.nodes[v].length += top - d[v];
  }
  return t;
}

/// Symmetric matrix on sorted taxa; embeds in the torus via the upper
/// triangle in lexicographic pair order (0,1), (0,2), ..., (n-2,n-1).
struct UltrametricMatrix {
  std::vector<std::string> taxa;
  std::vector<std::vector<double>> D;

  std::size_t size() const { return taxa.size(); }

  std::size_t index_of(const std::string& label) const {
    const auto it = std::lower_bound(taxa.begin(), taxa.end(), label);
    if (it == taxa.end() || *it != label) throw InputError("unknown taxon '" + label + "'");
    return static_cast<std::size_t>(it - taxa.begin());
  }

  double at(const std::string& a, const std::string& b) const { return D[index_of(a)][index_of(b)]; }

  std::vector<double> upper_triangle() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t j = i + 1; j < size(); ++j) out.push_back(D[i][j]);
    }
    return out;
  }

  TorusPoint to_point() const {
    if (size() < 3) throw InputError("the torus embedding needs at least 3 taxa");
    return TorusPoint(upper_triangle());
  }

  /// Inverse of upper_triangle for the given sorted taxa.
  static UltrametricMatrix from_upper(std::vector<std::string> taxa, std::span<const double> x) {
    const std::size_t n = taxa.size();
    if (x.size() != n * (n - 1) / 2) throw InputError("point dimension does not match C(n,2)");
    UltrametricMatrix u{std::move(taxa), std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) u.D[i][j] = u.D[j][i] = x[k++];
    }
    return u;
  }
};

/// Three-point condition D_ij <= max(D_ik, D_kj) + eps over distinct triples.
inline bool is_ultrametric(const std::vector<std::vector<double>>& D, double eps = kUltrametricEps) {
  const std::size_t n = D.size();
  for (const auto& row : D) {
    if (row.size() != n) throw InputError("distance matrix must be square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(D[i][i]) > eps) throw InputError("distance matrix must have a zero diagonal");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(D[i][j] - D[j][i]) > eps) throw InputError("distance matrix must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (D[i][j] > std::max(D[i][k], D[k][j]) + eps) return false;
      }
    }
  }
  return true;
}

inline bool is_ultrametric(const UltrametricMatrix& u, double eps = kUltrametricEps) { return is_ultrametric(u.D, eps); }

/// Leaf-to-leaf path lengths. Non-equidistant trees are rejected unless
/// `normalize` lengthens their pendant edges first.
inline UltrametricMatrix tree_to_ultrametric(const PhyloTree& input, bool normalize = false) {
  const PhyloTree t = normalize ? normalize_heights(input) : input;
  if (!is_equidistant(t)) throw InputError("tree is not equidistant (use height normalization to force it)");
  const auto depth = t.depths();
  const auto leaves = t.leaves();
  std::vector<std::pair<std::string, int>> by_label;
  for (int v : leaves) by_label.emplace_back(t.nodes[v].label, v);
  std::sort(by_label.begin(), by_label.end());
  const std::size_t n = by_label.size();

  auto ancestors = [&](int v) {
    std::vector<int> path;
    for (; v != -1; v = t.nodes[v].parent) path.push_back(v);
    return path;
  };
  UltrametricMatrix u;
  for (const auto& [label, v] : by_label) u.taxa.push_back(label);
  u.D.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto pa = ancestors(by_label[i].second);
    const std::set<int> anc(pa.begin(), pa.end());
    for (std::size_t j = i + 1; j < n; ++j) {
      int w = by_label[j].second;
      while (!anc.contains(w)) w = t.nodes[w].parent;
      const double d = depth[by_label[i].second] + depth[by_label[j].second] - 2.0 * depth[w];
      u.D[i][j] = u.D[j][i] = d;
    }
  }
  return u;
}

/// Agglomerates clusters at the smallest remaining value v (all clusters linked
/// at v merge together, giving polytomies) under a node at height v/2.
inline PhyloTree ultrametric_to_tree(const UltrametricMatrix& u, double eps = kUltrametricEps) {
  const std::size_t n = u.size();
  if (n < 2) throw InputError("need at least 2 taxa to build a tree");
  if (!is_ultrametric(u, eps)) throw InputError("matrix is not ultrametric");

  struct Built {
    std::string label;
    double length = 0.0;
    std::vector<int> children;
  };
  std::vector<Built> built;
  std::vector<double> height;
  struct Cluster {
    int node;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) {
    clusters.push_back({static_cast<int>(built.size()), {i}});
    built.push_back({u.taxa[i], 0.0, {}});
    height.push_back(0.0);
  }
  auto link = [&](const Cluster& a, const Cluster& b) {
    double v = kInf;
    for (auto i : a.members) {
      for (auto j : b.members) v = std::min(v, u.D[i][j]);
    }
    return v;
  };
  while (clusters.size() > 1) {
    double v = kInf;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) v = std::min(v, link(clusters[a], clusters[b]));
    }
    // Connected components of the "linked at <= v" relation.
    const double cut = v + eps * std::max(1.0, std::abs(v));
    std::vector<int> comp(clusters.size(), -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < clusters.size(); ++s) {
      if (comp[s] != -1) continue;
      std::vector<std::size_t> stack = {s};
      comp[s] = ncomp;
      while (!stack.empty()) {
        const auto a = stack.back();
        stack.pop_back();
        for (std::size_t b = 0; b < clusters.size(); ++b) {
          if (comp[b] == -1 && link(clusters[a], clusters[b]) <= cut) {
            comp[b] = ncomp;
            stack.push_back(b);
          }
        }
      }
      ++ncomp;
    }
    std::vector<Cluster> next;
    for (int c = 0; c < ncomp; ++c) {
      std::vector<std::size_t> idx;
      for (std::size_t s = 0; s < clusters.size(); ++s) {
        if (comp[s] == c) idx.push_back(s);
      }
      if (idx.size() == 1) {
        next.push_back(std::move(clusters[idx.front()]));
        continue;
      }
      const double h = v / 2.0;
      Cluster merged{static_cast<int>(built.size()), {}};
      built.push_back({"", 0.0, {}});
      height.push_back(h);
      for (auto s : idx) {
        const double len = h - height[clusters[s].node];
        if (!(len > 0.0)) throw InputError("matrix yields a non-positive branch length");
        built[clusters[s].node].length = len;
        built[merged.node].children.push_back(clusters[s].node);
        merged.members.insert(merged.members.end(), clusters[s].members.begin(), clusters[s].members.end());
      }
      next.push_back(std::move(merged));
    }
    clusters = std::move(next);
  }

  // Re-index so the root is node 0 and parents precede children.
  PhyloTree t;
  std::vector<std::pair<int, int>> queue = {{clusters.front().node, -1}};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const auto [old, parent] = queue[q];
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.push_back({built[old].label, parent == -1 ? 0.0 : built[old].length, parent, {}});
    if (parent != -1) t.nodes[parent].children.push_back(id);
    for (int c : built[old].children) queue.emplace_back(c, id);
  }
  return t;
}

/// A < B: the most recent common ancestor of A lies strictly below that of A u B.
struct Nesting {
  std::vector<std::string> A;
  std::vector<std::string> B;
};

inline bool has_nesting(const UltrametricMatrix& u, const Nesting& nest, double eps = kUltrametricEps) {
  if (nest.A.empty() || nest.B.empty()) throw InputError("nesting sets must be nonempty");
  std::set<std::size_t> a, ab;
  for (const auto& s : nest.A) a.insert(u.index_of(s));
  for (const auto& s : nest.B) {
    if (a.contains(u.index_of(s))) throw InputError("nesting sets must be disjoint");
  }
  if (a.size() != nest.A.size()) throw InputError("nesting set A has repeated taxa");
  ab = a;
  for (const auto& s : nest.B) ab.insert(u.index_of(s));
  auto max_over = [&](const std::set<std::size_t>& s) {
    double m = 0.0;  // empty pair set
    for (auto i : s) {
      for (auto j : s) {
        if (i < j) m = std::max(m, u.D[i][j]);
      }
    }
    return m;
  };
  return max_over(a) + eps < max_over(ab);
}

/// Clades of a tree other than single leaves and the full taxon set, each as sorted labels.
inline std::set<std::vector<std::string>> clades(const PhyloTree& t) {
  std::vector<std::vector<std::string>> below(t.nodes.size());
  for (std::size_t i = t.nodes.size(); i-- > 0;) {
    if (t.nodes[i].leaf()) below[i].push_back(t.nodes[i].label);
    if (t.nodes[i].parent != -1) {
      auto& p = below[t.nodes[i].parent];
      p.insert(p.end(), below[i].begin(), below[i].end());
    }
  }
  const std::size_t n = t.leaves().size();
  std::set<std::vector<std::string>> out;
  for (auto& b : below) {
    if (b.size() >= 2 && b.size() < n) {
      std::sort(b.begin(), b.end());
      out.insert(b);
    }
  }
  return out;
}

/// Supermajority bound 1 - 1/C(n,2) for n taxa.
inline double majority_threshold(std::size_t n_taxa) {
  if (n_taxa < 3) throw InputError("majority bounds need at least 3 taxa");
  return 1.0 - 2.0 / static_cast<double>(n_taxa * (n_taxa - 1));
}

/// Below this fraction of inputs a nesting is absent from the median consensus.
inline double absence_threshold(std::size_t n_taxa) {
  if (n_taxa < 3) throw InputError("majority bounds need at least 3 taxa");
  return 2.0 / static_cast<double>(n_taxa * (n_taxa - 1));
}

enum class ConsensusMethod { Median, Center, Frechet, FwSymRegularized };

inline std::string consensus_method_name(ConsensusMethod m) {
  switch (m) {
    case ConsensusMethod::Median: return "median";
    case ConsensusMethod::Center: return "center";
    case ConsensusMethod::Frechet: return "frechet";
    case ConsensusMethod::FwSymRegularized: return "fw_sym_regularized";
  }
  return "";
}

struct ConsensusOptions {
  ConsensusMethod method = ConsensusMethod::FwSymRegularized;
  double lambda = 0.5;
  bool normalize_heights = false;
};

struct ConsensusResult {
  PhyloTree tree;
  UltrametricMatrix matrix;
  SolveReport report;
  bool ultrametric = false;
  bool starts_agree = true;  // false flags a non-unique optimum
  std::vector<UltrametricMatrix> inputs;
};

namespace detail {

struct WeightedSites {
  PointCloud sites;
  std::vector<double> weights;
};

// Identical inputs merge into one weighted site; scaling all weights leaves
// every solver's pivots and iterates unchanged.
inline WeightedSites merge_duplicates(const std::vector<TorusPoint>& pts) {
  std::vector<TorusPoint> uniq;
  std::vector<double> w;
  for (const auto& p : pts) {
    const auto c = canonical(p);
    auto it = std::find_if(uniq.begin(), uniq.end(), [&](const TorusPoint& q) { return q.vec() == c.vec(); });
    if (it == uniq.end()) {
      uniq.push_back(c);
      w.push_back(1.0);
    } else {
      w[static_cast<std::size_t>(it - uniq.begin())] += 1.0;
    }
  }
  return {PointCloud(std::move(uniq)), std::move(w)};
}

inline SolveReport run_consensus_solver(const WeightedSites& ws, const ConsensusOptions& opt, bool reversed) {
  PointCloud sites = ws.sites;
  std::vector<double> w = ws.weights;
  if (reversed) {
    auto pts = sites.points();
    std::reverse(pts.begin(), pts.end());
    std::reverse(w.begin(), w.end());
    sites = PointCloud(std::move(pts));
  }
  switch (opt.method) {
    case ConsensusMethod::Median:
      return solve_fw_simplex_gauge(sites, w, {});
    case ConsensusMethod::Center:
      return solve_center(sites);
    case ConsensusMethod::Frechet: {
      const auto p = LocationProblem::uniform(sites, TropLp{kInf}, Aggregator::sum_squares(w));
      const TorusPoint start = reversed ? sites[0] : solve_center(sites).optimum;
      return solve_subgradient(p, start);
    }
    case ConsensusMethod::FwSymRegularized: {
      auto p = LocationProblem::uniform(sites, TropLp{kInf}, Aggregator::weighted_sum(w));
      return solve_polyhedral(regularize(std::move(p), opt.lambda));
    }
  }
  throw InputError("unknown consensus method");
}

}  // namespace detail

/// Tropically convex consensus: the optimum lies in the max-tropical hull of
/// the input ultrametrics, hence is itself ultrametric. The returned class is
/// represented with minimum entry equal to the mean of the inputs' smallest
/// off-diagonal entries, which keeps every entry positive.
inline ConsensusResult consensus(const std::vector<PhyloTree>& trees, const ConsensusOptions& opt = {}) {
  if (trees.empty()) throw InputError("consensus needs at least one tree");
  ConsensusResult res;
  for (const auto& t : trees) res.inputs.push_back(tree_to_ultrametric(t, opt.normalize_heights));
  const auto& taxa = res.inputs.front().taxa;
  for (const auto& u : res.inputs) {
    if (u.taxa != taxa) throw InputError("input trees have different taxa sets");
  }
  if (taxa.size() < 3) throw InputError("consensus needs at least 3 taxa");

  std::vector<TorusPoint> pts;
  double shift = 0.0;
  for (const auto& u : res.inputs) {
    pts.push_back(u.to_point());
    shift += detail::min_entry(u.upper_triangle());
  }
  shift /= static_cast<double>(res.inputs.size());
  const auto ws = detail::merge_duplicates(pts);

  res.report = detail::run_consensus_solver(ws, opt, false);
  if (ws.sites.size() > 1 && opt.method != ConsensusMethod::Center) {
    const auto alt = detail::run_consensus_solver(ws, opt, true);
    const double tol = opt.method == ConsensusMethod::Frechet ? 1e-3 : kUltrametricEps;
    res.starts_agree = equivalent(res.report.optimum, alt.optimum, tol);
  }
  if (!res.report.in_hull || !in_hull_max(ws.sites, res.report.optimum)) {
    throw NumericError("consensus optimum left the max-tropical hull");
  }

  auto x = canonical_coords(res.report.optimum.coords());
  for (double& v : x) v += shift;
  res.matrix = UltrametricMatrix::from_upper(taxa, x);
  res.ultrametric = is_ultrametric(res.matrix);
  if (!res.ultrametric) throw NumericError("consensus result is not ultrametric");
  res.tree = ultrametric_to_tree(res.matrix);
  return res;
}

/// Reads trees from a file (one per line) or from every .nwk file of a
/// directory in name order.
inline std::vector<PhyloTree> load_trees(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".nwk") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<PhyloTree> out;
  for (const auto& f : files) {
    std::istringstream in(io::read_file(f));
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out.push_back(parse_newick(line));
      } catch (const InputError& e) {
        throw InputError(f + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (out.empty()) throw InputError("no trees found in " + path);
  return out;
}

}  // namespace troploc
