#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "facebn/errors.hpp"
#include "facebn/quantizer.hpp"
#include "test_support.hpp"

using namespace facebn;

namespace {

// A feature point varying only in the first coordinate.
FeaturePoint one_dim(double v) { return {v, 0, 0, 0, 0, 0}; }

FeaturePoint random_point(std::mt19937_64& rng) {
  FeaturePoint p;
  for (double& v : p) v = testsupport::unit(rng) * 10.0 - 5.0;
  return p;
}

double sq_dist(const FeaturePoint& a, const FeaturePoint& b) {
  double s = 0;
  for (int d = 0; d < kFeatureCount; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

double inertia_of(const Codebook& cb, const std::vector<FeaturePoint>& raw) {
  double total = 0;
  for (const auto& p : raw) {
    FeaturePoint z = cb.standardization.apply(p);
    double best = sq_dist(z, cb.centroids[0]);
    for (const auto& c : cb.centroids) best = std::min(best, sq_dist(z, c));
    total += best;
  }
  return total;
}

}  // namespace

TEST_SUITE("quantizer") {

TEST_CASE("standardization computes population z-scores and flags flat features") {
  std::vector<FeaturePoint> pts = {one_dim(0), one_dim(2), one_dim(4)};
  Codebook cb = kmeans_fit(pts, {3, 1, 100, 1e-9});
  CHECK(cb.standardization.mean[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cb.standardization.stddev[0] ==
        doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));  // population divisor
  CHECK_FALSE(cb.standardization.degenerate[0]);
  for (int d = 1; d < kFeatureCount; ++d) {
    CHECK(cb.standardization.degenerate[d]);
    CHECK(cb.standardization.stddev[d] == 1.0);  // kept harmless for division
  }

  FeaturePoint z = cb.standardization.apply(one_dim(4));
  CHECK(z[0] == doctest::Approx(2.0 / std::sqrt(8.0 / 3.0)).epsilon(1e-12));
  CHECK(z[1] == 0.0);
}

TEST_CASE("k = 1 puts the single centroid at the standardized mean") {
  std::mt19937_64 rng(41);
  std::vector<FeaturePoint> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(random_point(rng));
  Codebook cb = kmeans_fit(pts, {1, 7, 100, 1e-9});
  REQUIRE(cb.centroids.size() == 1);
  // The mean of z-scored data is the zero vector.
  for (int d = 0; d < kFeatureCount; ++d)
    CHECK(cb.centroids[0][d] == doctest::Approx(0.0).epsilon(1e-9));
  for (const auto& p : pts) CHECK(assign_label(cb, p) == 0);
}

TEST_CASE("k equal to the number of distinct points reaches zero inertia") {
  std::vector<FeaturePoint> pts = {one_dim(0), one_dim(3), one_dim(9),
                                   one_dim(0), one_dim(3), one_dim(9)};
  KMeansDiagnostics diag;
  Codebook cb = kmeans_fit(pts, {3, 11, 200, 1e-12}, &diag);
  REQUIRE_FALSE(diag.inertia_per_iteration.empty());
  CHECK(diag.inertia_per_iteration.back() == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(inertia_of(cb, pts) == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("the {0, 1, 10, 11} line splits into its two natural pairs") {
  std::vector<FeaturePoint> pts = {one_dim(0), one_dim(1), one_dim(10), one_dim(11)};
  Codebook cb = kmeans_fit(pts, {2, 1, 100, 1e-12});
  REQUIRE(cb.centroids.size() == 2);

  FeaturePoint lo = cb.standardization.apply(one_dim(0.5));
  FeaturePoint hi = cb.standardization.apply(one_dim(10.5));
  std::vector<double> got = {cb.centroids[0][0], cb.centroids[1][0]};
  std::sort(got.begin(), got.end());
  CHECK(got[0] == doctest::Approx(lo[0]).epsilon(1e-9));
  CHECK(got[1] == doctest::Approx(hi[0]).epsilon(1e-9));

  CHECK(assign_label(cb, one_dim(0)) == assign_label(cb, one_dim(1)));
  CHECK(assign_label(cb, one_dim(10)) == assign_label(cb, one_dim(11)));
  CHECK(assign_label(cb, one_dim(0)) != assign_label(cb, one_dim(10)));
}

TEST_CASE("degenerate inputs are data errors") {
  std::vector<FeaturePoint> two = {one_dim(0), one_dim(1)};
  CHECK_THROWS_AS(kmeans_fit(two, {3, 1, 100, 1e-6}), DataError);          // n < k
  CHECK_THROWS_AS(kmeans_fit({}, {1, 1, 100, 1e-6}), DataError);           // empty
  std::vector<FeaturePoint> same = {one_dim(5), one_dim(5), one_dim(5)};
  CHECK_THROWS_AS(kmeans_fit(same, {2, 1, 100, 1e-6}), DataError);         // < k distinct
  CHECK_THROWS_AS(kmeans_fit(two, {0, 1, 100, 1e-6}), DataError);          // nonsense k
}

TEST_CASE("assignment ties break toward the lowest centroid index") {
  Codebook cb;
  cb.k = 4;
  for (int d = 0; d < kFeatureCount; ++d) {
    cb.standardization.mean[d] = 0;
    cb.standardization.stddev[d] = 1;
  }
  cb.centroids = {one_dim(-9), one_dim(1), one_dim(5), one_dim(-1)};
  // 0 is equidistant from centroids 1 and 3; the lower index wins.
  CHECK(assign_label(cb, one_dim(0)) == 1);
  CHECK(assign_label(cb, one_dim(5)) == 2);
}

TEST_CASE("assignment agrees with an exhaustive nearest-centroid scan") {
  std::mt19937_64 rng(43);
  std::vector<FeaturePoint> pts;
  for (int i = 0; i < 120; ++i) pts.push_back(random_point(rng));
  Codebook cb = kmeans_fit(pts, {8, 3, 300, 1e-9});

  for (int trial = 0; trial < 1000; ++trial) {
    FeaturePoint q = random_point(rng);
    FeaturePoint z = cb.standardization.apply(q);
    int best = 0;
    double best_d = sq_dist(z, cb.centroids[0]);
    for (int j = 1; j < cb.k; ++j) {
      double d = sq_dist(z, cb.centroids[static_cast<std::size_t>(j)]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    CHECK(assign_label(cb, q) == best);
  }
}

TEST_CASE("fitting twice gives bit-identical codebooks") {
  std::mt19937_64 rng(44);
  std::vector<FeaturePoint> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(random_point(rng));
  KMeansConfig cfg{6, 99, 300, 1e-9};
  Codebook a = kmeans_fit(pts, cfg);
  Codebook b = kmeans_fit(pts, cfg);
  REQUIRE(a.centroids.size() == b.centroids.size());
  for (std::size_t j = 0; j < a.centroids.size(); ++j)
    CHECK(a.centroids[j] == b.centroids[j]);

  Codebook c = kmeans_fit(pts, {6, 100, 300, 1e-9});
  bool any_diff = false;
  for (std::size_t j = 0; j < a.centroids.size(); ++j)
    if (a.centroids[j] != c.centroids[j]) any_diff = true;
  CHECK(any_diff);  // a different seed should move at least one centroid
}

TEST_CASE("inertia is monotone non-increasing across iterations") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FeaturePoint> pts;
    int n = 30 + testsupport::pick(rng, 120);
    for (int i = 0; i < n; ++i) pts.push_back(random_point(rng));
    KMeansDiagnostics diag;
    kmeans_fit(pts, {2 + testsupport::pick(rng, 7), rng(), 300, 1e-9}, &diag);
    REQUIRE_FALSE(diag.inertia_per_iteration.empty());
    for (std::size_t i = 1; i < diag.inertia_per_iteration.size(); ++i)
      CHECK(diag.inertia_per_iteration[i] <= diag.inertia_per_iteration[i - 1] + 1e-9);
  }
}

TEST_CASE("centroids are pairwise distinct after fitting") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<FeaturePoint> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(random_point(rng));
    Codebook cb = kmeans_fit(pts, {8, rng(), 300, 1e-9});
    for (std::size_t a = 0; a < cb.centroids.size(); ++a)
      for (std::size_t b = a + 1; b < cb.centroids.size(); ++b)
        CHECK(sq_dist(cb.centroids[a], cb.centroids[b]) > 0.0);
  }
}

TEST_CASE("labelize demands exactly nine descriptors and maps in block order") {
  std::vector<FeaturePoint> pts = {one_dim(0), one_dim(1), one_dim(10), one_dim(11)};
  Codebook cb = kmeans_fit(pts, {2, 1, 100, 1e-12});

  std::vector<BlockFeatureVector> blocks(9);
  for (int b = 0; b < 9; ++b) blocks[static_cast<std::size_t>(b)].mean = (b % 2 == 0) ? 0.0 : 10.0;
  LabelVector labels = labelize(cb, blocks);
  for (int b = 0; b < 9; ++b) {
    FeaturePoint raw{blocks[static_cast<std::size_t>(b)].mean, 0, 0, 0, 0, 0};
    CHECK(labels[static_cast<std::size_t>(b)] == assign_label(cb, raw));
  }

  blocks.pop_back();
  CHECK_THROWS_AS(labelize(cb, blocks), LengthError);
}

TEST_CASE("codebook file round trip is exact") {
  testsupport::TempDir dir("codebook");
  std::mt19937_64 rng(47);
  std::vector<FeaturePoint> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(random_point(rng));
  Codebook cb = kmeans_fit(pts, {5, 13, 300, 1e-9});

  save_codebook(cb, dir.path() / "cb.txt");
  Codebook back = load_codebook(dir.path() / "cb.txt");
  CHECK(back.k == cb.k);
  CHECK(back.standardization.mean == cb.standardization.mean);
  CHECK(back.standardization.stddev == cb.standardization.stddev);
  CHECK(back.standardization.degenerate == cb.standardization.degenerate);
  REQUIRE(back.centroids.size() == cb.centroids.size());
  for (std::size_t j = 0; j < cb.centroids.size(); ++j) CHECK(back.centroids[j] == cb.centroids[j]);

  CHECK_THROWS_AS(load_codebook(dir.path() / "missing.txt"), IoError);
}

TEST_CASE("corrupt codebook files are format errors") {
  testsupport::TempDir dir("codebookbad");
  write_text_file((dir.path() / "bad.txt").string(), "not a codebook\n");
  CHECK_THROWS_AS(load_codebook(dir.path() / "bad.txt"), FormatError);
}

}  // TEST_SUITE
