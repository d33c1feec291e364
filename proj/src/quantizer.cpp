#include "facebn/quantizer.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "facebn/errors.hpp"
#include "facebn/textio.hpp"

namespace facebn {

namespace {

double sq_dist(const FeaturePoint& a, const FeaturePoint& b) {
  double s = 0;
  for (int f = 0; f < kFeatureCount; ++f) {
    const double d = a[f] - b[f];
    s += d * d;
  }
  return s;
}

// Uniform double in [0, 1) from the top 53 bits; keeps seeding reproducible
// across standard library implementations.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int nearest_centroid(const std::vector<FeaturePoint>& centroids, const FeaturePoint& p) {
  int best = 0;
  double best_d = sq_dist(centroids[0], p);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = sq_dist(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

FeaturePoint Standardization::apply(const FeaturePoint& raw) const {
  FeaturePoint out;
  for (int f = 0; f < kFeatureCount; ++f) out[f] = (raw[f] - mean[f]) / stddev[f];
  return out;
}

Codebook kmeans_fit(const std::vector<FeaturePoint>& descriptors, const KMeansConfig& cfg,
                    KMeansDiagnostics* diagnostics) {
  if (cfg.k < 1) throw DataError("k-means: k must be >= 1, got " + std::to_string(cfg.k));
  const std::size_t n = descriptors.size();
  if (n < static_cast<std::size_t>(cfg.k)) {
    throw DataError("k-means: " + std::to_string(n) + " points for k = " + std::to_string(cfg.k));
  }

  Codebook cb;
  cb.k = cfg.k;

  // Per-feature z-score; zero-variance features keep stddev 1.
  for (int f = 0; f < kFeatureCount; ++f) {
    double sum = 0;
    for (const auto& d : descriptors) sum += d[f];
    cb.standardization.mean[f] = sum / static_cast<double>(n);
    double sq = 0;
    for (const auto& d : descriptors) {
      const double diff = d[f] - cb.standardization.mean[f];
      sq += diff * diff;
    }
    const double sd = std::sqrt(sq / static_cast<double>(n));
    cb.standardization.degenerate[f] = !(sd > 0);
    cb.standardization.stddev[f] = cb.standardization.degenerate[f] ? 1.0 : sd;
  }

  std::vector<FeaturePoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = cb.standardization.apply(descriptors[i]);

  // k-means++ seeding.
  std::mt19937_64 rng(cfg.seed);
  std::vector<FeaturePoint>& centroids = cb.centroids;
  centroids.reserve(static_cast<std::size_t>(cfg.k));
  centroids.push_back(pts[rng() % n]);
  std::vector<double> d2(n);
  while (centroids.size() < static_cast<std::size_t>(cfg.k)) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = sq_dist(pts[i], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        best = std::min(best, sq_dist(pts[i], centroids[c]));
      }
      d2[i] = best;
      total += best;
    }
    if (!(total > 0)) {
      throw DataError("k-means: fewer distinct points than clusters (k = " +
                      std::to_string(cfg.k) + ")");
    }
    double u = next_unit(rng) * total;
    std::size_t pick = n;  // last positive-weight point as a rounding guard
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0) continue;
      pick = i;
      u -= d2[i];
      if (u <= 0) break;
    }
    centroids.push_back(pts[pick]);
  }

  // Lloyd iterations.
  std::vector<int> owner(n, 0);
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    double inertia = 0;
    for (std::size_t i = 0; i < n; ++i) {
      owner[i] = nearest_centroid(centroids, pts[i]);
      inertia += sq_dist(centroids[static_cast<std::size_t>(owner[i])], pts[i]);
    }
    if (diagnostics) {
      diagnostics->inertia_per_iteration.push_back(inertia);
      diagnostics->iterations = iter + 1;
    }

    std::vector<FeaturePoint> next(centroids.size(), FeaturePoint{});
    std::vector<std::int64_t> members(centroids.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(owner[i]);
      ++members[c];
      for (int f = 0; f < kFeatureCount; ++f) next[c][f] += pts[i][f];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (members[c] > 0) {
        for (int f = 0; f < kFeatureCount; ++f) next[c][f] /= static_cast<double>(members[c]);
      } else {
        next[c] = centroids[c];
      }
    }

    // Empty clusters grab the point currently worst served.
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (members[c] > 0) continue;
      double worst = 0;
      std::size_t worst_i = n;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = sq_dist(next[static_cast<std::size_t>(owner[i])], pts[i]);
        if (d > worst) {
          worst = d;
          worst_i = i;
        }
      }
      if (worst_i == n) continue;  // every point already sits on a centroid
      next[c] = pts[worst_i];
      --members[static_cast<std::size_t>(owner[worst_i])];
      owner[worst_i] = static_cast<int>(c);
      members[c] = 1;
      if (diagnostics) ++diagnostics->empty_cluster_reseeds;
    }

    double shift = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      shift = std::max(shift, std::sqrt(sq_dist(centroids[c], next[c])));
    }
    centroids = std::move(next);
    if (shift < cfg.tol) break;
  }
  return cb;
}

int assign_label(const Codebook& codebook, const FeaturePoint& raw) {
  return nearest_centroid(codebook.centroids, codebook.standardization.apply(raw));
}

LabelVector labelize(const Codebook& codebook, const std::vector<BlockFeatureVector>& descriptors) {
  if (descriptors.size() != kGridBlocks) {
    throw LengthError("labelize: expected " + std::to_string(kGridBlocks) + " descriptors, got " +
                      std::to_string(descriptors.size()));
  }
  LabelVector labels{};
  for (int b = 0; b < kGridBlocks; ++b) {
    labels[static_cast<std::size_t>(b)] =
        assign_label(codebook, descriptors[static_cast<std::size_t>(b)].as_array());
  }
  return labels;
}

void save_codebook(const Codebook& codebook, const std::filesystem::path& path) {
  std::string out = "facebn codebook v1\n";
  out += "k " + std::to_string(codebook.k) + "\n";
  out += "features " + std::to_string(kFeatureCount) + "\n";
  out += "standardization\n";
  for (int f = 0; f < kFeatureCount; ++f) {
    out += format_double(codebook.standardization.mean[f]) + " " +
           format_double(codebook.standardization.stddev[f]) + " " +
           (codebook.standardization.degenerate[f] ? "1" : "0") + "\n";
  }
  out += "centroids\n";
  for (const auto& c : codebook.centroids) {
    for (int f = 0; f < kFeatureCount; ++f) {
      out += format_double(c[f]);
      out += (f + 1 == kFeatureCount) ? "\n" : " ";
    }
  }
  write_text_file(path.string(), out);
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path.string()));
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw FormatError("codebook file truncated: " + path.string());
    return line;
  };

  if (next_line() != "facebn codebook v1") {
    throw FormatError("not a facebn codebook: " + path.string());
  }
  Codebook cb;
  {
    auto t = split_whitespace(next_line());
    if (t.size() != 2 || t[0] != "k") throw FormatError("codebook: expected 'k <count>'");
    cb.k = static_cast<int>(parse_int(t[1]));
  }
  {
    auto t = split_whitespace(next_line());
    if (t.size() != 2 || t[0] != "features" || parse_int(t[1]) != kFeatureCount) {
      throw FormatError("codebook: unsupported feature count");
    }
  }
  if (next_line() != "standardization") throw FormatError("codebook: missing standardization");
  for (int f = 0; f < kFeatureCount; ++f) {
    auto t = split_whitespace(next_line());
    if (t.size() != 3) throw FormatError("codebook: bad standardization row");
    cb.standardization.mean[f] = parse_double(t[0]);
    cb.standardization.stddev[f] = parse_double(t[1]);
    cb.standardization.degenerate[f] = t[2] == "1";
  }
  if (next_line() != "centroids") throw FormatError("codebook: missing centroids");
  for (int c = 0; c < cb.k; ++c) {
    auto t = split_whitespace(next_line());
    if (t.size() != kFeatureCount) throw FormatError("codebook: bad centroid row");
    FeaturePoint p;
    for (int f = 0; f < kFeatureCount; ++f) p[f] = parse_double(t[f]);
    cb.centroids.push_back(p);
  }
  if (cb.k < 1 || cb.centroids.size() != static_cast<std::size_t>(cb.k)) {
    throw FormatError("codebook: inconsistent centroid count");
  }
  return cb;
}

}  // namespace facebn
