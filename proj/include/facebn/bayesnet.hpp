#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace facebn {

// Discrete attribute layout shared by every classifier: n attributes with
// fixed cardinalities plus a class variable.
struct AttributeSpace {
  std::vector<int> cardinalities;  // each >= 2
  int class_count = 0;             // >= 2

  int n() const { return static_cast<int>(cardinalities.size()); }
  void validate() const;  // DataError

  static AttributeSpace uniform(int n, int cardinality, int class_count);
};

// One discrete record: attribute values plus its class.
using Instance = std::pair<std::vector<int>, int>;
using Dataset = std::vector<Instance>;

// Augmenting arcs between attributes. parent[i] == -1 means attribute i has
// only the class as parent; otherwise parent[i] is its single attribute
// parent. The parent graph must be a forest.
struct Structure {
  std::vector<int> parent;

  static Structure naive(int n) { return Structure{std::vector<int>(static_cast<std::size_t>(n), -1)}; }

  int n() const { return static_cast<int>(parent.size()); }
  int arc_count() const;
  std::vector<std::pair<int, int>> attribute_arcs() const;  // (child, parent)
  void validate(int n) const;                               // DataError

  bool operator==(const Structure&) const = default;
};

std::vector<std::string> structure_lines(const Structure& s);  // "0 -> class" / "3 -> 1"

// Sufficient statistics: N, N(c), N(c, a_i) and N(c, a_i, a_j) for all
// unordered attribute pairs.
struct CountTables {
  AttributeSpace space;
  std::int64_t total = 0;
  std::vector<std::int64_t> per_class;
  std::vector<std::vector<std::int64_t>> attr;   // [i][value * C + c]
  std::vector<std::vector<std::int64_t>> pair;   // [i * n + j], i < j: [(vi * Vj + vj) * C + c]

  std::int64_t n_c(int c) const { return per_class[static_cast<std::size_t>(c)]; }
  std::int64_t n_ca(int c, int i, int v) const;
  std::int64_t n_cab(int c, int i, int vi, int j, int vj) const;
};

CountTables count_tables(const Dataset& data, const AttributeSpace& space);  // RangeError

// --- Parameter estimation -------------------------------------------------

// P(c) = (N(c) + 1) / (N + k), k = class count.
std::vector<double> laplace_class_prior(const CountTables& counts);

// Single conditional distribution from a count vector.
std::vector<double> ml_distribution(const std::vector<std::int64_t>& counts);  // ZeroConfigError
// Dirichlet-MAP: (N + alpha - 1) / sum(N + alpha - 1); alpha >= 1.
std::vector<double> map_distribution(const std::vector<std::int64_t>& counts,
                                     const std::vector<double>& alphas);  // AlphaError

struct BnModel {
  AttributeSpace space;
  Structure structure;
  std::vector<double> class_prior;
  // Per attribute. Root attribute i: [v * C + c]. With parent j:
  // [(v * Vj + pv) * C + c].
  std::vector<std::vector<double>> cpt;

  double prob_root(int i, int v, int c) const;
  double prob_child(int i, int v, int pv, int c) const;
  void validate() const;
};

enum class Estimator { Laplace, MaximumLikelihood, Map };

// Laplace: P(a_i|c) = (N(c,a_i)+1)/(N(c)+v_i),
//          P(a_i|a_j,c) = (N(c,a_i,a_j)+1)/(N(c,a_j)+v_i).
BnModel laplace_model(const CountTables& counts, const Structure& structure);
BnModel ml_model(const CountTables& counts, const Structure& structure);  // ZeroConfigError
BnModel map_model(const CountTables& counts, const Structure& structure, double alpha);

// --- Information measures (empirical ML frequencies, natural log) ----------

double mutual_information_with_class(const CountTables& counts, int attr);
double within_class_mi(const CountTables& counts, int i, int j, int c);
double conditional_mutual_information(const CountTables& counts, int i, int j);

// Data-shaped entry points; EmptyDataError on an empty dataset.
double mutual_information(int attr, const Dataset& data, const AttributeSpace& space);
double conditional_mutual_information(int i, int j, const Dataset& data,
                                      const AttributeSpace& space);

// Symmetric nonnegative pairwise scores with a zero diagonal. Tiny negative
// rounding residue (>= -1e-12) is clipped to zero.
struct CmiMatrix {
  int n = 0;
  std::vector<double> values;  // n x n

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  double average_off_diagonal() const;  // sum_{i != j} / (n (n - 1))

  static CmiMatrix from_values(int n, std::vector<double> values);  // DataError on asymmetry
};

CmiMatrix cmi_matrix(const CountTables& counts);
CmiMatrix within_class_mi_matrix(const CountTables& counts, int c);
std::vector<double> class_mi_scores(const CountTables& counts);  // I(A_i; C) per attribute

// --- Structure learning -----------------------------------------------------

// Maximum-weight spanning tree over the attributes (Kruskal, ties broken by
// the lexicographically smallest edge), rooted at the attribute with the
// highest root score and directed away from the root.
Structure chow_liu_tan(const CmiMatrix& cmi, const std::vector<double>& root_scores);

struct FanThreshold {
  bool average = true;  // threshold = mean pairwise CMI
  double fixed = 0.0;

  static FanThreshold avg() { return {true, 0.0}; }
  static FanThreshold at(double s) { return {false, s}; }

  bool operator==(const FanThreshold&) const = default;
};

// TAN tree with every edge strictly below the threshold removed; each
// remaining component is rooted at its best-scoring member.
Structure fan_structure(const CmiMatrix& cmi, const std::vector<double>& root_scores,
                        const FanThreshold& threshold);

// --- Inference ---------------------------------------------------------------

// P(c | a) through the factored product, computed in log space and
// normalized by log-sum-exp.
std::vector<double> posterior(const BnModel& model, const std::vector<int>& a);  // RangeError

// Per-class networks sharing one class prior.
struct ClassNet {
  Structure structure;
  // Per attribute, conditional on this net's class. Root: [v]. With parent
  // j: [v * Vj + pv].
  std::vector<std::vector<double>> cpt;
};

struct MultiNetModel {
  AttributeSpace space;
  std::vector<double> class_prior;
  std::vector<ClassNet> nets;  // one per class
};

std::vector<double> multinet_posterior(const MultiNetModel& model, const std::vector<int>& a);

int map_decision(const std::vector<double>& posterior);  // argmax, ties to lowest class

// --- DAG counting -------------------------------------------------------------

// Number of labeled DAGs on n nodes:
// G(n) = sum_{k=1..n} (-1)^(k+1) C(n,k) 2^(k(n-k)) G(n-k), G(0) = 1.
boost::multiprecision::cpp_int robinson_dag_count(int n);

}  // namespace facebn
