#include "facebn/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "facebn/errors.hpp"

namespace facebn {

namespace {

std::size_t su(int v) { return static_cast<std::size_t>(v); }

}  // namespace

void AttributeSpace::validate() const {
  if (cardinalities.empty()) throw DataError("attribute space has no attributes");
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    if (cardinalities[i] < 2)
      throw DataError("attribute " + std::to_string(i) + " has cardinality " +
                      std::to_string(cardinalities[i]) + ", need at least 2");
  }
  if (class_count < 2)
    throw DataError("class count " + std::to_string(class_count) + ", need at least 2");
}

AttributeSpace AttributeSpace::uniform(int n, int cardinality, int class_count) {
  return AttributeSpace{std::vector<int>(su(n), cardinality), class_count};
}

int Structure::arc_count() const {
  int arcs = 0;
  for (int p : parent)
    if (p >= 0) ++arcs;
  return arcs;
}

std::vector<std::pair<int, int>> Structure::attribute_arcs() const {
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < n(); ++i)
    if (parent[su(i)] >= 0) arcs.emplace_back(i, parent[su(i)]);
  return arcs;
}

void Structure::validate(int expected_n) const {
  if (n() != expected_n)
    throw DataError("structure covers " + std::to_string(n()) + " attributes, expected " +
                    std::to_string(expected_n));
  for (int i = 0; i < n(); ++i) {
    int p = parent[su(i)];
    if (p < -1 || p >= n() || p == i)
      throw DataError("attribute " + std::to_string(i) + " has invalid parent " +
                      std::to_string(p));
  }
  // The parent map must be a forest: walking up from any node terminates.
  for (int start = 0; start < n(); ++start) {
    int steps = 0;
    for (int v = start; v != -1; v = parent[su(v)]) {
      if (++steps > n())
        throw DataError("attribute parent graph has a cycle through " + std::to_string(start));
    }
  }
}

std::vector<std::string> structure_lines(const Structure& s) {
  std::vector<std::string> lines;
  lines.reserve(su(s.n()));
  for (int i = 0; i < s.n(); ++i) {
    int p = s.parent[su(i)];
    lines.push_back(std::to_string(i) + " -> " + (p < 0 ? std::string("class") : std::to_string(p)));
  }
  return lines;
}

std::int64_t CountTables::n_ca(int c, int i, int v) const {
  return attr[su(i)][su(v) * su(space.class_count) + su(c)];
}

std::int64_t CountTables::n_cab(int c, int i, int vi, int j, int vj) const {
  if (i == j) throw DataError("pair count requested for identical attributes");
  if (i > j) {
    std::swap(i, j);
    std::swap(vi, vj);
  }
  const auto& table = pair[su(i) * su(space.n()) + su(j)];
  std::size_t cell = (su(vi) * su(space.cardinalities[su(j)]) + su(vj)) * su(space.class_count) + su(c);
  return table[cell];
}

CountTables count_tables(const Dataset& data, const AttributeSpace& space) {
  space.validate();
  const int n = space.n();
  const int C = space.class_count;

  CountTables t;
  t.space = space;
  t.per_class.assign(su(C), 0);
  t.attr.resize(su(n));
  for (int i = 0; i < n; ++i) t.attr[su(i)].assign(su(space.cardinalities[su(i)]) * su(C), 0);
  t.pair.resize(su(n) * su(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      t.pair[su(i) * su(n) + su(j)].assign(
          su(space.cardinalities[su(i)]) * su(space.cardinalities[su(j)]) * su(C), 0);

  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto& [values, cls] = data[r];
    if (static_cast<int>(values.size()) != n)
      throw RangeError("record " + std::to_string(r) + " has " + std::to_string(values.size()) +
                       " attributes, expected " + std::to_string(n));
    if (cls < 0 || cls >= C)
      throw RangeError("record " + std::to_string(r) + " has class " + std::to_string(cls) +
                       " outside [0, " + std::to_string(C) + ")");
    for (int i = 0; i < n; ++i) {
      if (values[su(i)] < 0 || values[su(i)] >= space.cardinalities[su(i)])
        throw RangeError("record " + std::to_string(r) + " attribute " + std::to_string(i) +
                         " value " + std::to_string(values[su(i)]) + " outside [0, " +
                         std::to_string(space.cardinalities[su(i)]) + ")");
    }

    ++t.total;
    ++t.per_class[su(cls)];
    for (int i = 0; i < n; ++i) t.attr[su(i)][su(values[su(i)]) * su(C) + su(cls)]++;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        auto& table = t.pair[su(i) * su(n) + su(j)];
        std::size_t cell =
            (su(values[su(i)]) * su(space.cardinalities[su(j)]) + su(values[su(j)])) * su(C) + su(cls);
        table[cell]++;
      }
  }
  return t;
}

// --- Estimation --------------------------------------------------------------

std::vector<double> laplace_class_prior(const CountTables& counts) {
  const int C = counts.space.class_count;
  std::vector<double> prior(su(C));
  for (int c = 0; c < C; ++c)
    prior[su(c)] = static_cast<double>(counts.n_c(c) + 1) / static_cast<double>(counts.total + C);
  return prior;
}

std::vector<double> ml_distribution(const std::vector<std::int64_t>& counts) {
  std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (total == 0)
    throw ZeroConfigError("maximum likelihood undefined: parent configuration never observed");
  std::vector<double> p(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v)
    p[v] = static_cast<double>(counts[v]) / static_cast<double>(total);
  return p;
}

std::vector<double> map_distribution(const std::vector<std::int64_t>& counts,
                                     const std::vector<double>& alphas) {
  if (alphas.size() != counts.size())
    throw AlphaError("got " + std::to_string(alphas.size()) + " Dirichlet parameters for " +
                     std::to_string(counts.size()) + " values");
  double denom = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (alphas[v] < 1.0)
      throw AlphaError("Dirichlet parameter " + std::to_string(alphas[v]) +
                       " below 1, MAP mode undefined");
    denom += static_cast<double>(counts[v]) + alphas[v] - 1.0;
  }
  if (denom <= 0.0)
    throw ZeroConfigError("MAP mode undefined: all pseudocounts vanish");
  std::vector<double> p(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v)
    p[v] = (static_cast<double>(counts[v]) + alphas[v] - 1.0) / denom;
  return p;
}

namespace {

// Builds the CPT stack for one structure, delegating each conditional
// distribution (one parent configuration at a time) to `estimate`.
template <typename Fn>
std::vector<std::vector<double>> build_cpts(const CountTables& counts, const Structure& structure,
                                            Fn estimate) {
  const auto& space = counts.space;
  const int n = space.n();
  const int C = space.class_count;
  structure.validate(n);

  std::vector<std::vector<double>> cpt(su(n));
  std::vector<std::int64_t> column;
  for (int i = 0; i < n; ++i) {
    const int vi = space.cardinalities[su(i)];
    const int p = structure.parent[su(i)];
    if (p < 0) {
      cpt[su(i)].resize(su(vi) * su(C));
      for (int c = 0; c < C; ++c) {
        column.resize(su(vi));
        for (int v = 0; v < vi; ++v) column[su(v)] = counts.n_ca(c, i, v);
        std::vector<double> dist = estimate(column);
        for (int v = 0; v < vi; ++v) cpt[su(i)][su(v) * su(C) + su(c)] = dist[su(v)];
      }
    } else {
      const int vp = space.cardinalities[su(p)];
      cpt[su(i)].resize(su(vi) * su(vp) * su(C));
      for (int c = 0; c < C; ++c)
        for (int pv = 0; pv < vp; ++pv) {
          column.resize(su(vi));
          for (int v = 0; v < vi; ++v) column[su(v)] = counts.n_cab(c, i, v, p, pv);
          std::vector<double> dist = estimate(column);
          for (int v = 0; v < vi; ++v)
            cpt[su(i)][(su(v) * su(vp) + su(pv)) * su(C) + su(c)] = dist[su(v)];
        }
      }
  }
  return cpt;
}

}  // namespace

double BnModel::prob_root(int i, int v, int c) const {
  return cpt[su(i)][su(v) * su(space.class_count) + su(c)];
}

double BnModel::prob_child(int i, int v, int pv, int c) const {
  const int vp = space.cardinalities[su(structure.parent[su(i)])];
  return cpt[su(i)][(su(v) * su(vp) + su(pv)) * su(space.class_count) + su(c)];
}

void BnModel::validate() const {
  space.validate();
  structure.validate(space.n());
  const int C = space.class_count;
  if (static_cast<int>(class_prior.size()) != C) throw DataError("class prior size mismatch");
  double sum = std::accumulate(class_prior.begin(), class_prior.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw DataError("class prior does not sum to 1");
  if (static_cast<int>(cpt.size()) != space.n()) throw DataError("CPT stack size mismatch");
  for (int i = 0; i < space.n(); ++i) {
    const int vi = space.cardinalities[su(i)];
    const int p = structure.parent[su(i)];
    const int configs = (p < 0 ? 1 : space.cardinalities[su(p)]) * C;
    if (static_cast<int>(cpt[su(i)].size()) != vi * configs)
      throw DataError("CPT for attribute " + std::to_string(i) + " has wrong size");
    for (int cfg = 0; cfg < configs; ++cfg) {
      double col = 0.0;
      for (int v = 0; v < vi; ++v) col += cpt[su(i)][su(v) * su(configs) + su(cfg)];
      if (std::abs(col - 1.0) > 1e-12)
        throw DataError("CPT column for attribute " + std::to_string(i) + " sums to " +
                        std::to_string(col));
    }
  }
}

BnModel laplace_model(const CountTables& counts, const Structure& structure) {
  BnModel m;
  m.space = counts.space;
  m.structure = structure;
  m.class_prior = laplace_class_prior(counts);
  m.cpt = build_cpts(counts, structure, [](const std::vector<std::int64_t>& column) {
    std::int64_t total = std::accumulate(column.begin(), column.end(), std::int64_t{0});
    std::vector<double> p(column.size());
    for (std::size_t v = 0; v < column.size(); ++v)
      p[v] = static_cast<double>(column[v] + 1) /
             static_cast<double>(total + static_cast<std::int64_t>(column.size()));
    return p;
  });
  return m;
}

BnModel ml_model(const CountTables& counts, const Structure& structure) {
  BnModel m;
  m.space = counts.space;
  m.structure = structure;
  m.class_prior = laplace_class_prior(counts);
  m.cpt = build_cpts(counts, structure,
                     [](const std::vector<std::int64_t>& column) { return ml_distribution(column); });
  return m;
}

BnModel map_model(const CountTables& counts, const Structure& structure, double alpha) {
  BnModel m;
  m.space = counts.space;
  m.structure = structure;
  m.class_prior = laplace_class_prior(counts);
  m.cpt = build_cpts(counts, structure, [alpha](const std::vector<std::int64_t>& column) {
    return map_distribution(column, std::vector<double>(column.size(), alpha));
  });
  return m;
}

// --- Information measures ------------------------------------------------------

namespace {

// One term of a plug-in MI sum; joint and the two marginals are raw counts
// over the same base. Zero joints contribute zero.
double mi_term(std::int64_t joint, std::int64_t ma, std::int64_t mb, std::int64_t base) {
  if (joint == 0) return 0.0;
  double pj = static_cast<double>(joint) / static_cast<double>(base);
  double pa = static_cast<double>(ma) / static_cast<double>(base);
  double pb = static_cast<double>(mb) / static_cast<double>(base);
  return pj * std::log(pj / (pa * pb));
}

}  // namespace

double mutual_information_with_class(const CountTables& counts, int attr) {
  if (counts.total == 0) throw EmptyDataError("mutual information needs at least one record");
  const int C = counts.space.class_count;
  const int vi = counts.space.cardinalities[su(attr)];
  std::vector<std::int64_t> value_marginal(su(vi), 0);
  for (int v = 0; v < vi; ++v)
    for (int c = 0; c < C; ++c) value_marginal[su(v)] += counts.n_ca(c, attr, v);
  double mi = 0.0;
  for (int v = 0; v < vi; ++v)
    for (int c = 0; c < C; ++c)
      mi += mi_term(counts.n_ca(c, attr, v), value_marginal[su(v)], counts.n_c(c), counts.total);
  return mi;
}

double within_class_mi(const CountTables& counts, int i, int j, int c) {
  const std::int64_t nc = counts.n_c(c);
  if (nc == 0) return 0.0;
  const int vi = counts.space.cardinalities[su(i)];
  const int vj = counts.space.cardinalities[su(j)];
  double mi = 0.0;
  for (int a = 0; a < vi; ++a)
    for (int b = 0; b < vj; ++b)
      mi += mi_term(counts.n_cab(c, i, a, j, b), counts.n_ca(c, i, a), counts.n_ca(c, j, b), nc);
  return mi;
}

double conditional_mutual_information(const CountTables& counts, int i, int j) {
  if (counts.total == 0)
    throw EmptyDataError("conditional mutual information needs at least one record");
  double cmi = 0.0;
  for (int c = 0; c < counts.space.class_count; ++c) {
    double pc = static_cast<double>(counts.n_c(c)) / static_cast<double>(counts.total);
    if (pc > 0.0) cmi += pc * within_class_mi(counts, i, j, c);
  }
  return cmi;
}

double mutual_information(int attr, const Dataset& data, const AttributeSpace& space) {
  if (data.empty()) throw EmptyDataError("mutual information needs at least one record");
  return mutual_information_with_class(count_tables(data, space), attr);
}

double conditional_mutual_information(int i, int j, const Dataset& data,
                                      const AttributeSpace& space) {
  if (data.empty())
    throw EmptyDataError("conditional mutual information needs at least one record");
  return conditional_mutual_information(count_tables(data, space), i, j);
}

double CmiMatrix::average_off_diagonal() const {
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) sum += at(i, j);
  return sum / (static_cast<double>(n) * (n - 1));
}

CmiMatrix CmiMatrix::from_values(int n, std::vector<double> values) {
  if (static_cast<int>(values.size()) != n * n) throw DataError("pairwise score matrix size mismatch");
  CmiMatrix m{n, std::move(values)};
  for (int i = 0; i < n; ++i) {
    if (m.at(i, i) != 0.0) throw DataError("pairwise score matrix has a nonzero diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (m.at(i, j) != m.at(j, i)) throw DataError("pairwise score matrix is not symmetric");
      double v = m.at(i, j);
      if (v < 0.0) {
        if (v < -1e-12)
          throw DataError("pairwise information score " + std::to_string(v) + " is negative");
        m.values[su(i) * su(n) + su(j)] = 0.0;  // rounding residue
        m.values[su(j) * su(n) + su(i)] = 0.0;
      }
    }
  }
  return m;
}

namespace {

// MI is nonnegative in exact arithmetic; clip the rounding residue so
// downstream threshold comparisons never see a negative score.
double clip_score(double v) {
  if (v >= 0.0) return v;
  if (v >= -1e-12) return 0.0;
  throw DataError("pairwise information score " + std::to_string(v) + " is negative");
}

template <typename Fn>
CmiMatrix pairwise_matrix(int n, Fn score) {
  CmiMatrix m;
  m.n = n;
  m.values.assign(su(n) * su(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = clip_score(score(i, j));
      m.values[su(i) * su(n) + su(j)] = v;
      m.values[su(j) * su(n) + su(i)] = v;
    }
  return m;
}

}  // namespace

CmiMatrix cmi_matrix(const CountTables& counts) {
  return pairwise_matrix(counts.space.n(), [&](int i, int j) {
    return conditional_mutual_information(counts, i, j);
  });
}

CmiMatrix within_class_mi_matrix(const CountTables& counts, int c) {
  return pairwise_matrix(counts.space.n(),
                         [&](int i, int j) { return within_class_mi(counts, i, j, c); });
}

std::vector<double> class_mi_scores(const CountTables& counts) {
  std::vector<double> scores(su(counts.space.n()));
  for (int i = 0; i < counts.space.n(); ++i)
    scores[su(i)] = mutual_information_with_class(counts, i);
  return scores;
}

// --- Structure learning ---------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> up;

  explicit UnionFind(int n) : up(su(n)) { std::iota(up.begin(), up.end(), 0); }

  int find(int x) {
    while (up[su(x)] != x) x = up[su(x)] = up[su(up[su(x)])];
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[su(b)] = a;
    return true;
  }
};

struct WeightedEdge {
  int i, j;  // i < j
  double w;
};

// Maximum-weight spanning tree edges. Ties are broken toward the
// lexicographically smallest (i, j) pair so the result is deterministic.
std::vector<WeightedEdge> kruskal_tree(const CmiMatrix& cmi) {
  std::vector<WeightedEdge> edges;
  edges.reserve(su(cmi.n) * su(cmi.n - 1) / 2);
  for (int i = 0; i < cmi.n; ++i)
    for (int j = i + 1; j < cmi.n; ++j) edges.push_back({i, j, cmi.at(i, j)});
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  UnionFind uf(cmi.n);
  std::vector<WeightedEdge> tree;
  tree.reserve(su(cmi.n - 1));
  for (const auto& e : edges)
    if (uf.unite(e.i, e.j)) tree.push_back(e);
  return tree;
}

int argmax_lowest(const std::vector<double>& scores, const std::vector<int>& members) {
  int best = members.front();
  for (int m : members)
    if (scores[su(m)] > scores[su(best)]) best = m;
  return best;
}

// Directs each component of an undirected forest away from its
// highest-scoring member (BFS, neighbors visited in ascending order).
Structure orient_forest(int n, const std::vector<WeightedEdge>& edges,
                        const std::vector<double>& root_scores) {
  std::vector<std::vector<int>> adj(su(n));
  for (const auto& e : edges) {
    adj[su(e.i)].push_back(e.j);
    adj[su(e.j)].push_back(e.i);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());

  UnionFind uf(n);
  for (const auto& e : edges) uf.unite(e.i, e.j);
  std::vector<std::vector<int>> components(su(n));
  for (int v = 0; v < n; ++v) components[su(uf.find(v))].push_back(v);

  Structure s = Structure::naive(n);
  std::vector<char> seen(su(n), 0);
  for (const auto& members : components) {
    if (members.empty()) continue;
    int root = argmax_lowest(root_scores, members);
    std::queue<int> frontier;
    frontier.push(root);
    seen[su(root)] = 1;
    while (!frontier.empty()) {
      int v = frontier.front();
      frontier.pop();
      for (int u : adj[su(v)])
        if (!seen[su(u)]) {
          seen[su(u)] = 1;
          s.parent[su(u)] = v;
          frontier.push(u);
        }
    }
  }
  return s;
}

void check_learning_inputs(const CmiMatrix& cmi, const std::vector<double>& root_scores) {
  if (static_cast<int>(root_scores.size()) != cmi.n)
    throw DataError("got " + std::to_string(root_scores.size()) + " root scores for " +
                    std::to_string(cmi.n) + " attributes");
}

}  // namespace

Structure chow_liu_tan(const CmiMatrix& cmi, const std::vector<double>& root_scores) {
  check_learning_inputs(cmi, root_scores);
  if (cmi.n < 2) throw DataError("tree augmentation needs at least two attributes");
  return orient_forest(cmi.n, kruskal_tree(cmi), root_scores);
}

Structure fan_structure(const CmiMatrix& cmi, const std::vector<double>& root_scores,
                        const FanThreshold& threshold) {
  check_learning_inputs(cmi, root_scores);
  if (cmi.n < 2) return Structure::naive(cmi.n);

  double cutoff = threshold.average ? cmi.average_off_diagonal() : threshold.fixed;
  std::vector<WeightedEdge> kept;
  for (const auto& e : kruskal_tree(cmi))
    if (e.w >= cutoff) kept.push_back(e);  // exactly at threshold stays in
  return orient_forest(cmi.n, kept, root_scores);
}

// --- Inference --------------------------------------------------------------------

namespace {

void check_evidence(const AttributeSpace& space, const std::vector<int>& a) {
  if (static_cast<int>(a.size()) != space.n())
    throw RangeError("evidence has " + std::to_string(a.size()) + " attributes, expected " +
                     std::to_string(space.n()));
  for (int i = 0; i < space.n(); ++i)
    if (a[su(i)] < 0 || a[su(i)] >= space.cardinalities[su(i)])
      throw RangeError("evidence attribute " + std::to_string(i) + " value " +
                       std::to_string(a[su(i)]) + " outside [0, " +
                       std::to_string(space.cardinalities[su(i)]) + ")");
}

std::vector<double> normalize_log_scores(std::vector<double> scores) {
  double hi = *std::max_element(scores.begin(), scores.end());
  double lse = 0.0;
  for (double s : scores) lse += std::exp(s - hi);
  lse = hi + std::log(lse);
  for (double& s : scores) s = std::exp(s - lse);
  return scores;
}

}  // namespace

std::vector<double> posterior(const BnModel& model, const std::vector<int>& a) {
  check_evidence(model.space, a);
  const int C = model.space.class_count;
  std::vector<double> scores(su(C));
  for (int c = 0; c < C; ++c) {
    double s = std::log(model.class_prior[su(c)]);
    for (int i = 0; i < model.space.n(); ++i) {
      int p = model.structure.parent[su(i)];
      double pr = p < 0 ? model.prob_root(i, a[su(i)], c)
                        : model.prob_child(i, a[su(i)], a[su(p)], c);
      s += std::log(pr);
    }
    scores[su(c)] = s;
  }
  return normalize_log_scores(std::move(scores));
}

std::vector<double> multinet_posterior(const MultiNetModel& model, const std::vector<int>& a) {
  check_evidence(model.space, a);
  const int C = model.space.class_count;
  if (static_cast<int>(model.nets.size()) != C) throw DataError("multinet is missing class networks");
  std::vector<double> scores(su(C));
  for (int c = 0; c < C; ++c) {
    const ClassNet& net = model.nets[su(c)];
    double s = std::log(model.class_prior[su(c)]);
    for (int i = 0; i < model.space.n(); ++i) {
      int p = net.structure.parent[su(i)];
      double pr;
      if (p < 0) {
        pr = net.cpt[su(i)][su(a[su(i)])];
      } else {
        const int vp = model.space.cardinalities[su(p)];
        pr = net.cpt[su(i)][su(a[su(i)]) * su(vp) + su(a[su(p)])];
      }
      s += std::log(pr);
    }
    scores[su(c)] = s;
  }
  return normalize_log_scores(std::move(scores));
}

int map_decision(const std::vector<double>& posterior) {
  if (posterior.empty()) throw EmptyDataError("decision over an empty posterior");
  int best = 0;
  for (int c = 1; c < static_cast<int>(posterior.size()); ++c)
    if (posterior[su(c)] > posterior[su(best)]) best = c;
  return best;
}

// --- DAG counting --------------------------------------------------------------------

boost::multiprecision::cpp_int robinson_dag_count(int n) {
  using boost::multiprecision::cpp_int;
  if (n < 0) throw RangeError("DAG count undefined for negative node counts");

  std::vector<cpp_int> g(su(n) + 1);
  g[0] = 1;
  for (int m = 1; m <= n; ++m) {
    // Pascal row for C(m, k).
    std::vector<cpp_int> binom(su(m) + 1);
    binom[0] = 1;
    for (int k = 1; k <= m; ++k) binom[su(k)] = binom[su(k - 1)] * (m - k + 1) / k;

    cpp_int total = 0;
    for (int k = 1; k <= m; ++k) {
      cpp_int term = binom[su(k)] * (cpp_int(1) << (k * (m - k))) * g[su(m - k)];
      if (k % 2 == 1)
        total += term;
      else
        total -= term;
    }
    g[su(m)] = total;
  }
  return g[su(n)];
}

}  // namespace facebn
