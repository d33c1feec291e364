// Gate checks for the release: each criterion prints one PASS/FAIL line and
// the process exits nonzero if any fails. Tolerances and time budgets are
// pinned here, next to the checks they protect.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "facebn/bayesnet.hpp"
#include "facebn/classifier.hpp"
#include "facebn/features.hpp"
#include "facebn/pipeline.hpp"
#include "facebn/quantizer.hpp"
#include "facebn/tangent.hpp"
#include "facebn/textio.hpp"
#include "test_support.hpp"

using namespace facebn;

namespace {

struct Check {
  std::string label;
  double budget_seconds;  // <= 0 means no budget
  std::function<bool(std::string&)> run;
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string fmt(double v) { return format_double(v); }

// --- 1: uniform class prior ----------------------------------------------------

bool check_uniform_prior(std::string& why) {
  AttributeSpace space = AttributeSpace::uniform(1, 2, 5);
  Dataset data;
  for (int c = 0; c < 5; ++c)
    for (int r = 0; r < 20; ++r) data.push_back({{0}, c});
  std::vector<double> prior = laplace_class_prior(count_tables(data, space));
  for (int c = 0; c < 5; ++c) {
    // (20 + 1) / (100 + 5) must reduce to exactly one fifth, tolerance zero.
    if (prior[static_cast<std::size_t>(c)] != 21.0 / 105.0 ||
        prior[static_cast<std::size_t>(c)] != 0.2) {
      why = "P(class " + std::to_string(c) + ") = " + fmt(prior[static_cast<std::size_t>(c)]);
      return false;
    }
  }
  return true;
}

// --- 2: spanning-tree learner vs enumeration -------------------------------------

std::vector<std::pair<int, int>> best_tree_edges(int n,
                                                 const std::function<double(int, int)>& weight) {
  std::vector<int> seq(static_cast<std::size_t>(std::max(0, n - 2)), 0);
  double best = -1e300;
  std::vector<std::pair<int, int>> best_edges;
  while (true) {
    std::vector<std::pair<int, int>> edges = testsupport::prufer_decode(n, seq);
    double total = 0;
    for (auto [a, b] : edges) total += weight(a, b);
    if (total > best) {
      best = total;
      std::sort(edges.begin(), edges.end());
      best_edges = edges;
    }
    int pos = n - 3;
    while (pos >= 0 && seq[static_cast<std::size_t>(pos)] == n - 1)
      seq[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    seq[static_cast<std::size_t>(pos)]++;
  }
  return best_edges;
}

bool check_tree_learning(std::string& why) {
  std::mt19937_64 rng(20260815);
  for (int n = 3; n <= 6; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      CmiMatrix cmi;
      cmi.n = n;
      cmi.values.assign(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double w = testsupport::unit(rng);
          cmi.values[static_cast<std::size_t>(i) * n + j] = w;
          cmi.values[static_cast<std::size_t>(j) * n + i] = w;
        }
      std::vector<double> scores;
      for (int i = 0; i < n; ++i) scores.push_back(testsupport::unit(rng));

      Structure learned = chow_liu_tan(cmi, scores);
      auto learned_edges = testsupport::undirected_arcs(learned);
      auto oracle_edges = best_tree_edges(n, [&](int a, int b) { return cmi.at(a, b); });
      if (learned_edges != oracle_edges) {
        why = "n = " + std::to_string(n) + ", trial " + std::to_string(trial) +
              ": learned tree differs from the enumerated maximum";
        return false;
      }
    }
  }
  return true;
}

// --- 3: FAN collapses to naive Bayes above every edge weight ---------------------

bool check_fan_degeneracy(std::string& why) {
  AttributeSpace space = AttributeSpace::uniform(4, 2, 2);
  std::mt19937_64 rng(99);
  Dataset data = testsupport::random_dataset(space, 80, rng);
  data[0].second = 0;  // both classes observed regardless of the draw
  data[1].second = 1;

  TrainedClassifier nb = train(ClassifierKind::nb(), data, space);
  TrainedClassifier fan = train(ClassifierKind::gfan(FanThreshold::at(100.0)), data, space);
  if (fan.bn->structure.arc_count() != 0) {
    why = "threshold above every weight left " + std::to_string(fan.bn->structure.arc_count()) +
          " attribute arcs";
    return false;
  }
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<int> a = {mask & 1, (mask >> 1) & 1, (mask >> 2) & 1, (mask >> 3) & 1};
    auto [nb_cls, nb_post] = classify(nb, a);
    auto [fan_cls, fan_post] = classify(fan, a);
    if (nb_cls != fan_cls || nb_post != fan_post) {
      why = "instance mask " + std::to_string(mask) + " diverged";
      return false;
    }
  }
  return true;
}

// --- 4: structure recovery from sampled data -------------------------------------

bool check_structure_recovery(std::string& why) {
  testsupport::TanSample sample = testsupport::sample_tan_dataset(10000, 424242);
  TrainedClassifier clf = train(ClassifierKind::gtan(), sample.data, sample.space);
  auto learned = testsupport::undirected_arcs(clf.bn->structure);
  if (learned != sample.skeleton) {
    why = "recovered skeleton has " + std::to_string(learned.size()) + " arcs, expected " +
          std::to_string(sample.skeleton.size()) + " matching the generator";
    return false;
  }
  return true;
}

// --- 5: estimation suite ----------------------------------------------------------

bool columns_sum_to_one(const BnModel& m, std::string& why) {
  for (int i = 0; i < m.space.n(); ++i) {
    int vi = m.space.cardinalities[static_cast<std::size_t>(i)];
    int parent = m.structure.parent[static_cast<std::size_t>(i)];
    int configs = m.space.class_count;
    if (parent >= 0) configs *= m.space.cardinalities[static_cast<std::size_t>(parent)];
    for (int cfg = 0; cfg < configs; ++cfg) {
      double sum = 0;
      for (int v = 0; v < vi; ++v)
        sum += m.cpt[static_cast<std::size_t>(i)][static_cast<std::size_t>(v) * configs + cfg];
      if (!near(sum, 1.0, 1e-12)) {
        why = "CPT column of attribute " + std::to_string(i) + " sums to " + fmt(sum);
        return false;
      }
    }
  }
  return true;
}

bool check_estimation(std::string& why) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    AttributeSpace space = testsupport::random_space(rng);
    Dataset data = testsupport::random_dataset(space, 30, rng);
    for (int c = 0; c < space.class_count; ++c)
      data.push_back({data[0].first, c});  // every class observed at least once
    Structure structure = testsupport::random_forest(space.n(), rng);

    CountTables counts = count_tables(data, space);
    BnModel laplace = laplace_model(counts, structure);
    if (!columns_sum_to_one(laplace, why)) return false;

    std::vector<int> a;
    for (int v : space.cardinalities) a.push_back(testsupport::pick(rng, v));
    std::vector<double> fast = posterior(laplace, a);
    std::vector<double> slow = testsupport::direct_posterior(laplace, a);
    for (int c = 0; c < space.class_count; ++c) {
      double rel = std::fabs(fast[static_cast<std::size_t>(c)] - slow[static_cast<std::size_t>(c)]) /
                   std::max(slow[static_cast<std::size_t>(c)], 1e-300);
      if (rel > 1e-9) {
        why = "log-space posterior off by relative " + fmt(rel);
        return false;
      }
    }

    BnModel map2 = map_model(counts, structure, 2.0);
    for (std::size_t i = 0; i < laplace.cpt.size(); ++i)
      for (std::size_t e = 0; e < laplace.cpt[i].size(); ++e)
        if (!near(map2.cpt[i][e], laplace.cpt[i][e], 1e-15)) {
          why = "MAP(alpha = 2) drifted from the add-one estimate by " +
                fmt(std::fabs(map2.cpt[i][e] - laplace.cpt[i][e]));
          return false;
        }
  }
  return true;
}

// --- 6: tangent-distance properties -------------------------------------------------

double euclidean(const GrayImage& a, const GrayImage& b) {
  double sum = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

bool check_tangent_distance(std::string& why) {
  std::mt19937_64 rng(31337);
  TransformSet transforms = TransformSet::defaults();
  for (int trial = 0; trial < 200; ++trial) {
    GrayImage x = testsupport::random_image(20, 20, rng);
    GrayImage mu = testsupport::random_image(20, 20, rng);
    TangentBasis basis = tangent_basis(x, transforms);
    double td = tangent_distance_ss(x, mu, basis);
    if (td > euclidean(x, mu) + 1e-6) {
      why = "trial " + std::to_string(trial) + ": distance " + fmt(td) +
            " exceeds the Euclidean bound " + fmt(euclidean(x, mu));
      return false;
    }
    double self = tangent_distance_ss(x, x, basis);
    if (self > 1e-9) {
      why = "self distance " + fmt(self);
      return false;
    }
  }

  // Two-pixel worked examples with the single tangent vector (1, 1).
  TangentBasis manual;
  manual.width = 2;
  manual.height = 1;
  manual.vectors = {{1.0, 1.0}};
  manual.steps = {1.0};
  GrayImage x = GrayImage::filled(2, 1, 0);
  GrayImage reachable = GrayImage::filled(2, 1, 2);
  GrayImage offside = GrayImage::filled(2, 1, 0);
  offside.at(0, 0) = 2;
  if (!near(tangent_distance_ss(x, reachable, manual), 0.0, 1e-12)) {
    why = "reachable two-pixel target is " + fmt(tangent_distance_ss(x, reachable, manual)) +
          " away, expected 0";
    return false;
  }
  if (!near(tangent_distance_ss(x, offside, manual), std::sqrt(2.0), 1e-12)) {
    why = "orthogonal two-pixel target is " + fmt(tangent_distance_ss(x, offside, manual)) +
          " away, expected sqrt(2)";
    return false;
  }
  return true;
}

// --- 7: co-occurrence worked example --------------------------------------------------

bool check_glcm_example(std::string& why) {
  GrayImage img = GrayImage::filled(2, 2, 0);
  img.at(1, 0) = 255;
  img.at(0, 1) = 255;
  BlockView block{&img, 0, 0, 2, 2};
  GlcmConfig cfg;
  cfg.levels = 2;
  cfg.dx = 1;
  cfg.dy = 0;
  BlockFeatureVector d = block_descriptor(block, cfg);
  if (d.energy != 0.5 || !near(d.entropy, std::log(2.0), 1e-12) || d.contrast != 1.0 ||
      d.homogeneity != 0.5) {
    why = "got energy " + fmt(d.energy) + ", entropy " + fmt(d.entropy) + ", contrast " +
          fmt(d.contrast) + ", homogeneity " + fmt(d.homogeneity);
    return false;
  }
  return true;
}

// --- 8: DAG counts ----------------------------------------------------------------------

bool check_dag_counts(std::string& why) {
  const long long expected[] = {1, 3, 25, 543};
  for (int n = 1; n <= 4; ++n) {
    boost::multiprecision::cpp_int fast = robinson_dag_count(n);
    long long brute = testsupport::count_dags_brute(n);
    if (fast != expected[n - 1] || brute != expected[n - 1]) {
      why = "G(" + std::to_string(n) + ") = " + fast.str() + ", enumeration " +
            std::to_string(brute);
      return false;
    }
  }
  if (robinson_dag_count(10).str() != "4175098976430598143") {
    why = "G(10) = " + robinson_dag_count(10).str();
    return false;
  }
  return true;
}

// --- 9: k-means ---------------------------------------------------------------------------

double codebook_inertia(const Codebook& cb, const std::vector<FeaturePoint>& points) {
  double total = 0;
  for (const auto& p : points) {
    FeaturePoint z = cb.standardization.apply(p);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cb.centroids) {
      double d = 0;
      for (int f = 0; f < kFeatureCount; ++f) d += (z[static_cast<std::size_t>(f)] - c[static_cast<std::size_t>(f)]) * (z[static_cast<std::size_t>(f)] - c[static_cast<std::size_t>(f)]);
      best = std::min(best, d);
    }
    total += best;
  }
  return total;
}

bool check_kmeans(std::string& why) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FeaturePoint> points(40 + static_cast<std::size_t>(testsupport::pick(rng, 80)));
    for (auto& p : points)
      for (double& f : p) f = testsupport::unit(rng) * 10.0;
    KMeansConfig cfg;
    cfg.k = 2 + testsupport::pick(rng, 5);
    cfg.seed = rng();
    KMeansDiagnostics diag;
    kmeans_fit(points, cfg, &diag);
    for (std::size_t i = 1; i < diag.inertia_per_iteration.size(); ++i)
      if (diag.inertia_per_iteration[i] > diag.inertia_per_iteration[i - 1] + 1e-9) {
        why = "inertia rose on iteration " + std::to_string(i) + " of trial " +
              std::to_string(trial);
        return false;
      }
  }

  // 1-D {0, 1, 10, 11} with k = 2: the returned partition must reach the
  // enumerated optimum and pair the near neighbors.
  std::vector<FeaturePoint> points;
  for (double v : {0.0, 1.0, 10.0, 11.0}) points.push_back(FeaturePoint{v, 0, 0, 0, 0, 0});
  KMeansConfig cfg;
  cfg.k = 2;
  cfg.seed = 5;
  Codebook cb = kmeans_fit(points, cfg);

  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < 15; ++mask) {  // both groups nonempty
    FeaturePoint z[4];
    for (int i = 0; i < 4; ++i) z[i] = cb.standardization.apply(points[static_cast<std::size_t>(i)]);
    double total = 0;
    for (int group = 0; group < 2; ++group) {
      double sum = 0;
      int count = 0;
      for (int i = 0; i < 4; ++i)
        if (((mask >> i) & 1) == group) {
          sum += z[i][0];
          ++count;
        }
      if (count == 0) continue;
      double mean = sum / count;
      for (int i = 0; i < 4; ++i)
        if (((mask >> i) & 1) == group) total += (z[i][0] - mean) * (z[i][0] - mean);
    }
    best = std::min(best, total);
  }
  double got = codebook_inertia(cb, points);
  if (!near(got, best, 1e-9)) {
    why = "inertia " + fmt(got) + " misses the enumerated optimum " + fmt(best);
    return false;
  }
  if (assign_label(cb, points[0]) != assign_label(cb, points[1]) ||
      assign_label(cb, points[2]) != assign_label(cb, points[3]) ||
      assign_label(cb, points[0]) == assign_label(cb, points[2])) {
    why = "near neighbors were split across clusters";
    return false;
  }
  return true;
}

// --- 10: end-to-end determinism -------------------------------------------------------------

bool check_end_to_end(std::string& why) {
  testsupport::TempDir dir("acceptance");
  std::filesystem::path manifest = testsupport::write_synthetic_faces(dir.path() / "data");

  PipelineConfig cfg;
  cfg.manifest = manifest.string();
  cfg.train_fraction = 0.5;
  cfg.seed = 7;
  cfg.k = 8;
  cfg.kmeans_seed = 3;
  cfg.kind = ClassifierKind::nb();

  cfg.outdir = (dir.path() / "run1").string();
  PipelineResult first = run_pipeline(cfg);
  cfg.outdir = (dir.path() / "run2").string();
  PipelineResult second = run_pipeline(cfg);

  if (first.report.pcc_train != 1.0 || first.report.pcc_test != 1.0) {
    why = "PCC train " + fmt(first.report.pcc_train) + ", test " + fmt(first.report.pcc_test);
    return false;
  }
  std::string text1 = read_text_file(first.report_text_file.string());
  if (text1 != read_text_file(second.report_text_file.string()) ||
      read_text_file(first.report_json_file.string()) !=
          read_text_file(second.report_json_file.string())) {
    why = "reports differ between identically configured runs";
    return false;
  }
  for (const char* column : {"Network", "Structure", "class", "Train rate", "Test rate"})
    if (text1.find(column) == std::string::npos) {
      why = std::string("text report is missing the '") + column + "' column";
      return false;
    }
  return true;
}

}  // namespace

int main() {
  std::vector<Check> checks = {
      {"balanced five-class add-one prior is exactly 0.2", 1.0, check_uniform_prior},
      {"tree learner matches spanning-tree enumeration, 100 matrices each for n = 3..6", 10.0,
       check_tree_learning},
      {"forest learner with an unreachable cutoff equals naive Bayes on all 16 instances", 0.0,
       check_fan_degeneracy},
      {"tree learner recovers the generator skeleton from 10000 samples", 5.0,
       check_structure_recovery},
      {"CPT columns, log-space posteriors and MAP(alpha = 2) agree with direct computation", 5.0,
       check_estimation},
      {"tangent distance bounded by Euclidean, zero on self, two-pixel examples exact", 5.0,
       check_tangent_distance},
      {"checkerboard co-occurrence block scores energy 0.5, entropy ln 2, contrast 1", 0.0,
       check_glcm_example},
      {"DAG counts match exhaustive enumeration through n = 4 and G(10) exactly", 5.0,
       check_dag_counts},
      {"k-means inertia never rises and the 1-D example reaches the enumerated optimum", 5.0,
       check_kmeans},
      {"synthetic five-class pipeline scores PCC 1.0 with byte-identical reports", 30.0,
       check_end_to_end},
  };

  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    std::string why;
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = checks[i].run(why);
    } catch (const std::exception& e) {
      why = std::string("threw: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && checks[i].budget_seconds > 0 && seconds > checks[i].budget_seconds) {
      ok = false;
      why = "exceeded the " + fmt(checks[i].budget_seconds) + " s budget";
    }
    std::printf("%s  %2zu  %s  (%.3f s)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                checks[i].label.c_str(), seconds, why.empty() ? "" : ": ", why.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
