#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "facebn/features.hpp"

namespace facebn {

using FeaturePoint = std::array<double, kFeatureCount>;
using LabelVector = std::array<int, kGridBlocks>;

// Per-feature z-score parameters learned from the training blocks. A feature
// with zero variance keeps stddev 1 and is flagged.
struct Standardization {
  FeaturePoint mean{};
  FeaturePoint stddev{};
  std::array<bool, kFeatureCount> degenerate{};

  FeaturePoint apply(const FeaturePoint& raw) const;
};

struct Codebook {
  int k = 0;
  Standardization standardization;
  std::vector<FeaturePoint> centroids;  // in standardized space
};

struct KMeansConfig {
  int k = 8;
  std::uint64_t seed = 1;
  int max_iter = 300;
  double tol = 1e-6;  // max centroid movement per iteration
};

struct KMeansDiagnostics {
  std::vector<double> inertia_per_iteration;
  int iterations = 0;
  int empty_cluster_reseeds = 0;
};

// k-means++ seeding keyed by the config seed, then Lloyd iterations.
// Assignment ties go to the lowest centroid index; an empty cluster is
// reseeded to the point farthest from its current centroid. Deterministic:
// the same inputs always give a bit-identical codebook.
Codebook kmeans_fit(const std::vector<FeaturePoint>& descriptors, const KMeansConfig& cfg,
                    KMeansDiagnostics* diagnostics = nullptr);  // DataError

// Nearest centroid in standardized space; ties to the lowest index.
int assign_label(const Codebook& codebook, const FeaturePoint& raw);

// One label per grid block, in block order. LengthError unless exactly 9
// descriptors are supplied.
LabelVector labelize(const Codebook& codebook, const std::vector<BlockFeatureVector>& descriptors);

void save_codebook(const Codebook& codebook, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace facebn
