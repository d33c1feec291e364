#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "facebn/classifier.hpp"
#include "facebn/evaluation.hpp"
#include "facebn/features.hpp"
#include "facebn/image.hpp"
#include "facebn/quantizer.hpp"
#include "facebn/tangent.hpp"

namespace facebn {

// One flat bag of options driving the end-to-end run. Persisted as key=value
// text; every key can also be set from a CLI flag of the same name.
struct PipelineConfig {
  std::string manifest;
  std::string outdir;
  double train_fraction = 0.5;
  std::uint64_t seed = 1;
  bool augment = false;
  bool augment_test = false;
  TransformSet transforms = TransformSet::defaults();
  int augment_grid = 1;  // alpha grid: +-1..grid step units per transform
  GlcmConfig glcm;
  int k = 8;
  std::uint64_t kmeans_seed = 1;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;
  ClassifierKind kind = ClassifierKind::nb();
  bool report_timings = false;

  void validate() const;  // ConfigError
  std::vector<std::pair<std::string, std::string>> to_kv() const;
};

// ConfigError on unknown keys or unparsable values.
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);  // IoError
std::string render_config(const PipelineConfig& cfg);

// Loaded images with stable ids: the manifest-relative path, plus a
// "~<transform><sign><magnitude>" suffix for augmented variants.
struct ImageSet {
  int class_count = 0;
  std::vector<std::string> ids;
  std::vector<int> classes;
  std::vector<GrayImage> images;
};

ImageSet load_image_set(const DatasetManifest& manifest, const std::filesystem::path& base);

// Originals plus first-order tangent variants: for each transform l and
// magnitude g in 1..grid, alpha = +-(g * step_l) along that one direction.
ImageSet augment_set(const ImageSet& set, const TransformSet& transforms, int grid);

struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<int> classes;  // aligned with ids; empty when unknown (CSV round trip)
  std::vector<std::vector<BlockFeatureVector>> rows;  // 9 block descriptors per image
};

FeatureTable compute_features(const ImageSet& set, const GlcmConfig& glcm);

// CSV: image,block,mean,std,energy,entropy,contrast,homogeneity. Class ids
// are not part of the CSV; rejoin them from a manifest via attach_classes.
void save_features_csv(const FeatureTable& table, const std::string& path);
FeatureTable load_features_csv(const std::string& path);  // IoError, FormatError
void attach_classes(FeatureTable& table, const DatasetManifest& manifest,
                    const std::filesystem::path& base);  // DataError on unknown ids

std::vector<FeaturePoint> feature_points(const FeatureTable& table);  // image-major, block order

// Quantized records ready for the classifier.
struct LabeledSet {
  int k = 0;
  int class_count = 0;
  std::vector<std::string> ids;
  Dataset data;
};

LabeledSet labelize_table(const FeatureTable& table, const Codebook& codebook, int class_count);

void save_labels(const LabeledSet& set, const std::string& path);
LabeledSet load_labels(const std::string& path);  // IoError, FormatError

AttributeSpace label_space(const LabeledSet& set);

struct PipelineResult {
  EvaluationReport report;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::filesystem::path outdir;
  std::filesystem::path codebook_file;
  std::filesystem::path model_file;
  std::filesystem::path report_text_file;
  std::filesystem::path report_json_file;
  std::filesystem::path config_echo_file;
};

// ingest -> split -> augment -> features -> codebook -> train -> evaluate ->
// write. The first failing stage's error is rethrown with the stage name
// prepended. Outputs are a pure function of config + inputs, so re-running
// the written config echo reproduces every artifact byte for byte.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace facebn
