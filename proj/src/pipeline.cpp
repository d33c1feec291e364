#include "facebn/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <type_traits>
#include <unordered_map>

#include "facebn/errors.hpp"
#include "facebn/textio.hpp"

namespace facebn {

namespace {

std::size_t su(int v) { return static_cast<std::size_t>(v); }

std::string bool_text(bool b) { return b ? "1" : "0"; }

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ConfigError(key + ": expected a boolean (0/1/true/false), got '" + value + "'");
}

std::string join_transforms(const TransformSet& t) {
  std::string out;
  for (std::size_t i = 0; i < t.kinds.size(); ++i) {
    if (i > 0) out += ',';
    out += transform_kind_name(t.kinds[i]);
  }
  return out;
}

std::string join_steps(const TransformSet& t) {
  std::string out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(t.steps[i]);
  }
  return out;
}

template <typename Fn>
void with_config_context(const std::string& key, Fn&& fn) {
  try {
    fn();
  } catch (ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (manifest.empty()) throw ConfigError("manifest path is empty");
  if (outdir.empty()) throw ConfigError("output directory is empty");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw ConfigError("train-fraction " + format_double(train_fraction) + " outside (0, 1]");
  try {
    transforms.validate();
    glcm.validate();
    kind.validate();
  } catch (ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (augment_grid < 1 || augment_grid > 3)
    throw ConfigError("augment-grid " + std::to_string(augment_grid) +
                      " outside [1, 3] (variants must stay within 3 step units)");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (kmeans_max_iter < 1) throw ConfigError("kmeans-max-iter must be at least 1");
  if (!(kmeans_tol >= 0.0)) throw ConfigError("kmeans-tol must be nonnegative");
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::to_kv() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("manifest", manifest);
  kv.emplace_back("outdir", outdir);
  kv.emplace_back("train-fraction", format_double(train_fraction));
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("augment", bool_text(augment));
  kv.emplace_back("augment-test", bool_text(augment_test));
  kv.emplace_back("tangent-transforms", join_transforms(transforms));
  kv.emplace_back("tangent-steps", join_steps(transforms));
  kv.emplace_back("augment-grid", std::to_string(augment_grid));
  kv.emplace_back("glcm-levels", std::to_string(glcm.levels));
  kv.emplace_back("glcm-offset", std::to_string(glcm.dx) + "," + std::to_string(glcm.dy));
  kv.emplace_back("k", std::to_string(k));
  kv.emplace_back("kmeans-seed", std::to_string(kmeans_seed));
  kv.emplace_back("kmeans-max-iter", std::to_string(kmeans_max_iter));
  kv.emplace_back("kmeans-tol", format_double(kmeans_tol));
  kv.emplace_back("kind", variant_token(kind.variant));
  if (kind.threshold) kv.emplace_back("threshold", format_fan_threshold(*kind.threshold));
  kv.emplace_back("report-timings", bool_text(report_timings));
  return kv;
}

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  with_config_context(key, [&] {
    if (key == "manifest") {
      cfg.manifest = value;
    } else if (key == "outdir") {
      cfg.outdir = value;
    } else if (key == "train-fraction") {
      cfg.train_fraction = parse_double(value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value));
    } else if (key == "augment") {
      cfg.augment = parse_bool(key, value);
    } else if (key == "augment-test") {
      cfg.augment_test = parse_bool(key, value);
    } else if (key == "tangent-transforms") {
      std::vector<TransformKind> kinds;
      for (const auto& token : split(value, ','))
        kinds.push_back(parse_transform_kind(trim(token)));
      cfg.transforms.kinds = std::move(kinds);
      // Steps follow the transform list; resize and let validate() check.
      cfg.transforms.steps.resize(cfg.transforms.kinds.size(), 1.0);
    } else if (key == "tangent-steps") {
      std::vector<double> steps;
      for (const auto& token : split(value, ',')) steps.push_back(parse_double(trim(token)));
      cfg.transforms.steps = std::move(steps);
    } else if (key == "augment-grid") {
      cfg.augment_grid = static_cast<int>(parse_int(value));
    } else if (key == "glcm-levels") {
      cfg.glcm.levels = static_cast<int>(parse_int(value));
    } else if (key == "glcm-offset") {
      std::vector<std::string> parts = split(value, ',');
      if (parts.size() != 2) throw ConfigError("glcm-offset needs 'dx,dy'");
      cfg.glcm.dx = static_cast<int>(parse_int(trim(parts[0])));
      cfg.glcm.dy = static_cast<int>(parse_int(trim(parts[1])));
    } else if (key == "k") {
      cfg.k = static_cast<int>(parse_int(value));
    } else if (key == "kmeans-seed") {
      cfg.kmeans_seed = static_cast<std::uint64_t>(parse_int(value));
    } else if (key == "kmeans-max-iter") {
      cfg.kmeans_max_iter = static_cast<int>(parse_int(value));
    } else if (key == "kmeans-tol") {
      cfg.kmeans_tol = parse_double(value);
    } else if (key == "kind") {
      Variant v = parse_variant(value);
      cfg.kind.variant = v;
      if (!is_fan(v))
        cfg.kind.threshold.reset();
      else if (!cfg.kind.threshold)
        cfg.kind.threshold = FanThreshold::avg();
    } else if (key == "threshold") {
      cfg.kind.threshold = parse_fan_threshold(value);
    } else if (key == "report-timings") {
      cfg.report_timings = parse_bool(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  });
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " is not key=value: '" +
                        line + "'");
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  // kind before threshold so a FAN kind does not clobber an explicit threshold.
  for (const auto& [key, value] : entries)
    if (key == "kind") apply_config_entry(cfg, key, value);
  for (const auto& [key, value] : entries)
    if (key != "kind") apply_config_entry(cfg, key, value);
  return cfg;
}

PipelineConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string render_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& [key, value] : cfg.to_kv()) out += key + "=" + value + "\n";
  return out;
}

// --- Stage data ----------------------------------------------------------------

ImageSet load_image_set(const DatasetManifest& manifest, const std::filesystem::path& base) {
  ImageSet set;
  set.class_count = manifest.class_count;
  set.ids.reserve(manifest.entries.size());
  set.classes.reserve(manifest.entries.size());
  set.images.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    set.ids.push_back(entry.path.lexically_proximate(base).generic_string());
    set.classes.push_back(entry.class_id);
    set.images.push_back(load_image(entry.path));
    const GrayImage& img = set.images.back();
    const GrayImage& first = set.images.front();
    if (img.width != first.width || img.height != first.height)
      throw DataError(set.ids.back() + ": dimensions " + std::to_string(img.width) + "x" +
                      std::to_string(img.height) + " do not match the dataset's " +
                      std::to_string(first.width) + "x" + std::to_string(first.height));
  }
  return set;
}

ImageSet augment_set(const ImageSet& set, const TransformSet& transforms, int grid) {
  transforms.validate();
  if (grid < 1 || grid > 3)
    throw ConfigError("augment-grid " + std::to_string(grid) + " outside [1, 3]");

  ImageSet out;
  out.class_count = set.class_count;
  const std::size_t L = transforms.count();
  const std::size_t variants_per_image = 2 * L * su(grid);
  out.ids.reserve(set.ids.size() * (1 + variants_per_image));
  out.classes.reserve(out.ids.capacity());
  out.images.reserve(out.ids.capacity());

  std::vector<std::vector<double>> alphas;
  std::vector<std::string> suffixes;
  alphas.reserve(variants_per_image);
  suffixes.reserve(variants_per_image);
  for (int g = 1; g <= grid; ++g)
    for (std::size_t l = 0; l < L; ++l)
      for (double sign : {+1.0, -1.0}) {
        std::vector<double> alpha(L, 0.0);
        alpha[l] = sign * g * transforms.steps[l];
        alphas.push_back(std::move(alpha));
        // '~' keeps variant ids legal as manifest paths ('#' would start a comment).
        suffixes.push_back("~" + transform_kind_name(transforms.kinds[l]) +
                           (sign > 0 ? "+" : "-") + std::to_string(g));
      }

  for (std::size_t i = 0; i < set.images.size(); ++i) {
    out.ids.push_back(set.ids[i]);
    out.classes.push_back(set.classes[i]);
    out.images.push_back(set.images[i]);
    TangentBasis basis = tangent_basis(set.images[i], transforms);
    std::vector<GrayImage> variants = tangent_augment(set.images[i], basis, alphas);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      out.ids.push_back(set.ids[i] + suffixes[v]);
      out.classes.push_back(set.classes[i]);
      out.images.push_back(std::move(variants[v]));
    }
  }
  return out;
}

FeatureTable compute_features(const ImageSet& set, const GlcmConfig& glcm) {
  FeatureTable table;
  table.ids = set.ids;
  table.classes = set.classes;
  table.rows.reserve(set.images.size());
  for (const auto& image : set.images) table.rows.push_back(describe_image(image, glcm));
  return table;
}

namespace {

constexpr const char* kCsvHeader = "image,block,mean,std,energy,entropy,contrast,homogeneity";

}  // namespace

void save_features_csv(const FeatureTable& table, const std::string& path) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t b = 0; b < table.rows[r].size(); ++b) {
      out += table.ids[r];
      out += ',';
      out += std::to_string(b);
      for (double v : table.rows[r][b].as_array()) {
        out += ',';
        out += format_double(v);
      }
      out += '\n';
    }
  write_text_file(path, out);
}

FeatureTable load_features_csv(const std::string& path) {
  std::vector<std::string> lines = split(read_text_file(path), '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty() || trim(lines.front()) != kCsvHeader)
    throw FormatError(path + ": missing feature CSV header");

  FeatureTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> fields = split(lines[i], ',');
    if (fields.size() != 8)
      throw FormatError(path + " line " + std::to_string(i + 1) + ": expected 8 fields, got " +
                        std::to_string(fields.size()));
    int block = static_cast<int>(parse_int(fields[1]));
    if (block == 0) {
      table.ids.push_back(fields[0]);
      table.rows.emplace_back();
    }
    if (table.rows.empty() || fields[0] != table.ids.back() ||
        block != static_cast<int>(table.rows.back().size()))
      throw FormatError(path + " line " + std::to_string(i + 1) +
                        ": blocks out of order for image '" + fields[0] + "'");
    BlockFeatureVector d;
    d.mean = parse_double(fields[2]);
    d.stddev = parse_double(fields[3]);
    d.energy = parse_double(fields[4]);
    d.entropy = parse_double(fields[5]);
    d.contrast = parse_double(fields[6]);
    d.homogeneity = parse_double(fields[7]);
    table.rows.back().push_back(d);
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (static_cast<int>(table.rows[r].size()) != kGridBlocks)
      throw FormatError(path + ": image '" + table.ids[r] + "' has " +
                        std::to_string(table.rows[r].size()) + " blocks, expected 9");
  return table;
}

void attach_classes(FeatureTable& table, const DatasetManifest& manifest,
                    const std::filesystem::path& base) {
  std::unordered_map<std::string, int> class_of;
  for (const auto& entry : manifest.entries)
    class_of[entry.path.lexically_proximate(base).generic_string()] = entry.class_id;

  table.classes.clear();
  table.classes.reserve(table.ids.size());
  for (const auto& id : table.ids) {
    std::string key = id.substr(0, id.find('~'));  // augmented ids inherit the base image's class
    auto it = class_of.find(key);
    if (it == class_of.end())
      throw DataError("image '" + id + "' is not listed in the manifest");
    table.classes.push_back(it->second);
  }
}

std::vector<FeaturePoint> feature_points(const FeatureTable& table) {
  std::vector<FeaturePoint> points;
  points.reserve(table.rows.size() * su(kGridBlocks));
  for (const auto& row : table.rows)
    for (const auto& d : row) points.push_back(d.as_array());
  return points;
}

LabeledSet labelize_table(const FeatureTable& table, const Codebook& codebook, int class_count) {
  if (table.classes.size() != table.ids.size())
    throw DataError("feature table has no class column; attach classes from a manifest first");
  LabeledSet set;
  set.k = codebook.k;
  set.class_count = class_count;
  set.ids = table.ids;
  set.data.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    LabelVector lv = labelize(codebook, table.rows[r]);
    set.data.emplace_back(std::vector<int>(lv.begin(), lv.end()), table.classes[r]);
  }
  return set;
}

namespace {

constexpr const char* kLabelsMagic = "facebn labels v1";

}  // namespace

void save_labels(const LabeledSet& set, const std::string& path) {
  std::ostringstream out;
  out << kLabelsMagic << '\n';
  out << "k " << set.k << '\n';
  out << "classes " << set.class_count << '\n';
  for (std::size_t r = 0; r < set.data.size(); ++r) {
    out << set.ids[r] << ' ' << set.data[r].second;
    for (int label : set.data[r].first) out << ' ' << label;
    out << '\n';
  }
  write_text_file(path, out.str());
}

LabeledSet load_labels(const std::string& path) {
  std::vector<std::string> lines;
  for (const auto& line : split(read_text_file(path), '\n'))
    if (!trim(line).empty()) lines.push_back(line);
  if (lines.empty() || lines.front() != kLabelsMagic)
    throw FormatError(path + ": not a label file");

  LabeledSet set;
  if (lines.size() < 3) throw FormatError(path + ": truncated label file");
  std::vector<std::string> k_fields = split_whitespace(lines[1]);
  std::vector<std::string> c_fields = split_whitespace(lines[2]);
  if (k_fields.size() != 2 || k_fields[0] != "k" || c_fields.size() != 2 ||
      c_fields[0] != "classes")
    throw FormatError(path + ": bad label file header");
  set.k = static_cast<int>(parse_int(k_fields[1]));
  set.class_count = static_cast<int>(parse_int(c_fields[1]));
  if (set.k < 1 || set.class_count < 1) throw FormatError(path + ": bad label file header");

  for (std::size_t i = 3; i < lines.size(); ++i) {
    std::vector<std::string> fields = split_whitespace(lines[i]);
    if (static_cast<int>(fields.size()) != 2 + kGridBlocks)
      throw FormatError(path + " line " + std::to_string(i + 1) + ": expected id, class and " +
                        std::to_string(kGridBlocks) + " labels");
    int cls = static_cast<int>(parse_int(fields[1]));
    if (cls < 0 || cls >= set.class_count)
      throw FormatError(path + " line " + std::to_string(i + 1) + ": class " +
                        std::to_string(cls) + " outside [0, " + std::to_string(set.class_count) +
                        ")");
    std::vector<int> values;
    values.reserve(su(kGridBlocks));
    for (int b = 0; b < kGridBlocks; ++b) {
      int v = static_cast<int>(parse_int(fields[su(b) + 2]));
      if (v < 0 || v >= set.k)
        throw FormatError(path + " line " + std::to_string(i + 1) + ": label " +
                          std::to_string(v) + " outside [0, " + std::to_string(set.k) + ")");
      values.push_back(v);
    }
    set.ids.push_back(fields[0]);
    set.data.emplace_back(std::move(values), cls);
  }
  return set;
}

AttributeSpace label_space(const LabeledSet& set) {
  return AttributeSpace::uniform(kGridBlocks, set.k, set.class_count);
}

// --- End-to-end run ---------------------------------------------------------------

namespace {

class StageRunner {
 public:
  explicit StageRunner(std::vector<std::pair<std::string, double>>& times) : times_(times) {}

  template <typename Fn>
  auto operator()(const char* name, Fn&& fn) -> decltype(fn()) {
    auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(name, start);
      } else {
        auto result = fn();
        record(name, start);
        return result;
      }
    } catch (Error& e) {
      e.prepend_context(std::string("stage ") + name);
      throw;
    }
  }

 private:
  void record(const char* name, std::chrono::steady_clock::time_point start) {
    times_.emplace_back(name,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  std::vector<std::pair<std::string, double>>& times_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();

  PipelineResult result;
  StageRunner stage(result.stage_seconds);
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::absolute(cfg.manifest);
  const fs::path base = manifest_path.parent_path();
  const fs::path outdir = fs::absolute(cfg.outdir);

  struct Ingested {
    DatasetManifest train, test;
    ImageSet train_images, test_images;
  };
  Ingested in = stage("ingest", [&] {
    DatasetManifest manifest = load_manifest(manifest_path);
    auto [train_m, test_m] = split_dataset(manifest, SplitSpec{cfg.train_fraction, cfg.seed});
    return Ingested{train_m, test_m, load_image_set(train_m, base),
                    load_image_set(test_m, base)};
  });

  if (cfg.augment) {
    stage("augment", [&] {
      in.train_images = augment_set(in.train_images, cfg.transforms, cfg.augment_grid);
      if (cfg.augment_test)
        in.test_images = augment_set(in.test_images, cfg.transforms, cfg.augment_grid);
    });
  }

  FeatureTable train_features = stage("features", [&] {
    return compute_features(in.train_images, cfg.glcm);
  });
  FeatureTable test_features = stage("features", [&] {
    return compute_features(in.test_images, cfg.glcm);
  });

  Codebook codebook = stage("codebook", [&] {
    KMeansConfig km{cfg.k, cfg.kmeans_seed, cfg.kmeans_max_iter, cfg.kmeans_tol};
    return kmeans_fit(feature_points(train_features), km);
  });
  LabeledSet train_labels = stage("codebook", [&] {
    return labelize_table(train_features, codebook, in.train.class_count);
  });
  LabeledSet test_labels = stage("codebook", [&] {
    return labelize_table(test_features, codebook, in.test.class_count);
  });

  TrainedClassifier clf = stage("train", [&] {
    TrainedClassifier c = train(cfg.kind, train_labels.data, label_space(train_labels));
    c.info.seed = cfg.seed;
    return c;
  });

  result.report = stage("evaluate", [&] {
    return evaluate(clf, train_labels.data, test_labels.data);
  });

  stage("write", [&] {
    fs::create_directories(outdir);
    result.outdir = outdir;
    result.codebook_file = outdir / "codebook.txt";
    result.model_file = outdir / "model.txt";
    result.report_text_file = outdir / "report.txt";
    result.report_json_file = outdir / "report.json";
    result.config_echo_file = outdir / "config.echo";

    save_manifest(in.train, outdir / "train_manifest.txt");
    save_manifest(in.test, outdir / "test_manifest.txt");
    save_features_csv(train_features, (outdir / "train_features.csv").string());
    save_features_csv(test_features, (outdir / "test_features.csv").string());
    save_codebook(codebook, result.codebook_file);
    save_labels(train_labels, (outdir / "train_labels.txt").string());
    save_labels(test_labels, (outdir / "test_labels.txt").string());
    save_classifier(clf, result.model_file.string());
    write_text_file(result.report_text_file.string(),
                    render_text(result.report, cfg.report_timings));
    write_text_file(result.report_json_file.string(),
                    render_json(result.report, cfg.report_timings));

    // The echo pins resolved paths so a rerun from the echo file alone
    // reproduces this run regardless of the working directory.
    PipelineConfig echo = cfg;
    echo.manifest = manifest_path.string();
    echo.outdir = outdir.string();
    write_text_file(result.config_echo_file.string(), render_config(echo));
  });

  return result;
}

}  // namespace facebn
