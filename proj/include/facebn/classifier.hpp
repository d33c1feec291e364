#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "facebn/bayesnet.hpp"

namespace facebn {

enum class Variant { NB, GTAN, GFAN, TAN_PER_CLASS, FAN_PER_CLASS };

bool is_fan(Variant v);
bool is_per_class(Variant v);

// CLI/file token: nb, gtan, gfan, tan, fan (tan/fan are the per-class nets).
std::string variant_token(Variant v);
Variant parse_variant(const std::string& token);  // ConfigError

struct ClassifierKind {
  Variant variant = Variant::NB;
  std::optional<FanThreshold> threshold;  // present iff FAN variant

  void validate() const;  // ConfigError

  static ClassifierKind nb() { return {Variant::NB, std::nullopt}; }
  static ClassifierKind gtan() { return {Variant::GTAN, std::nullopt}; }
  static ClassifierKind gfan(FanThreshold t) { return {Variant::GFAN, t}; }
  static ClassifierKind tan_per_class() { return {Variant::TAN_PER_CLASS, std::nullopt}; }
  static ClassifierKind fan_per_class(FanThreshold t) { return {Variant::FAN_PER_CLASS, t}; }

  bool operator==(const ClassifierKind&) const = default;
};

// "avg" or a fixed numeric threshold ("0.25", "inf", ...).
FanThreshold parse_fan_threshold(const std::string& text);  // ConfigError
std::string format_fan_threshold(const FanThreshold& t);

struct TrainingInfo {
  std::int64_t instances = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;  // measured, not serialized
};

struct TrainedClassifier {
  ClassifierKind kind;
  AttributeSpace space;
  std::optional<BnModel> bn;            // NB / GTAN / GFAN
  std::optional<MultiNetModel> multinet;  // per-class variants
  TrainingInfo info;
};

// Learns structure and Laplace parameters for the requested variant. Global
// variants fit one network on the pooled data; per-class variants learn one
// structure per class from that class's instances, with the shared Laplace
// class prior. Every class must be observed at least once.
TrainedClassifier train(const ClassifierKind& kind, const Dataset& data,
                        const AttributeSpace& space);  // DataError

std::pair<int, std::vector<double>> classify(const TrainedClassifier& clf,
                                             const std::vector<int>& a);  // RangeError

std::vector<std::pair<int, std::vector<double>>> predict_batch(
    const TrainedClassifier& clf, const std::vector<std::vector<int>>& instances);

// Report labels: network family and structure scope.
std::string network_label(const ClassifierKind& kind);    // "NB" / "TAN" / "FAN"
std::string structure_label(const ClassifierKind& kind);  // "naive" / "global" / "per-class"

// Arc listings: "i -> class" or "i -> j" lines, per-class nets prefixed
// with their class.
std::vector<std::string> structure_summary(const TrainedClassifier& clf);

void save_classifier(const TrainedClassifier& clf, const std::string& path);  // IoError
TrainedClassifier load_classifier(const std::string& path);  // IoError, FormatError

}  // namespace facebn
