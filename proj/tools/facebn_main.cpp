// Command line front end: each pipeline stage runs standalone on persisted
// intermediates, plus `pipeline` for the end-to-end run and `dag-count`.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "facebn/bayesnet.hpp"
#include "facebn/classifier.hpp"
#include "facebn/errors.hpp"
#include "facebn/evaluation.hpp"
#include "facebn/pipeline.hpp"
#include "facebn/textio.hpp"

namespace fs = std::filesystem;
using namespace facebn;

namespace {

TransformSet make_transforms(const std::string& kinds_csv, const std::string& steps_csv) {
  TransformSet t = TransformSet::defaults();
  if (!kinds_csv.empty()) {
    t.kinds.clear();
    for (const auto& token : split(kinds_csv, ','))
      t.kinds.push_back(parse_transform_kind(trim(token)));
    t.steps.assign(t.kinds.size(), 1.0);
  }
  if (!steps_csv.empty()) {
    t.steps.clear();
    for (const auto& token : split(steps_csv, ',')) t.steps.push_back(parse_double(trim(token)));
  }
  t.validate();
  return t;
}

GlcmConfig make_glcm(int levels, const std::string& offset_csv) {
  GlcmConfig g;
  g.levels = levels;
  if (!offset_csv.empty()) {
    std::vector<std::string> parts = split(offset_csv, ',');
    if (parts.size() != 2) throw ConfigError("--glcm-offset needs 'dx,dy'");
    g.dx = static_cast<int>(parse_int(trim(parts[0])));
    g.dy = static_cast<int>(parse_int(trim(parts[1])));
  }
  g.validate();
  return g;
}

ClassifierKind make_kind(const std::string& kind_token, const std::string& threshold_token) {
  ClassifierKind kind;
  kind.variant = parse_variant(kind_token);
  if (!threshold_token.empty())
    kind.threshold = parse_fan_threshold(threshold_token);
  else if (is_fan(kind.variant))
    kind.threshold = FanThreshold::avg();
  kind.validate();
  return kind;
}

int run(CLI::App& app, int argc, char** argv) {
  // --- ingest: split a manifest into train/test manifests --------------------
  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and write a train/test split");
  std::string ingest_manifest, ingest_outdir;
  double ingest_fraction = 0.5;
  std::uint64_t ingest_seed = 1;
  ingest->add_option("--manifest", ingest_manifest, "Dataset manifest")->required();
  ingest->add_option("--outdir", ingest_outdir, "Output directory")->required();
  ingest->add_option("--train-fraction", ingest_fraction, "Training fraction in (0, 1]");
  ingest->add_option("--seed", ingest_seed, "Split seed");
  ingest->callback([&] {
    DatasetManifest manifest = load_manifest(ingest_manifest);
    auto [train_m, test_m] = split_dataset(manifest, SplitSpec{ingest_fraction, ingest_seed});
    fs::create_directories(ingest_outdir);
    save_manifest(train_m, fs::path(ingest_outdir) / "train_manifest.txt");
    save_manifest(test_m, fs::path(ingest_outdir) / "test_manifest.txt");
    std::cout << "images " << manifest.entries.size() << "\nclasses " << manifest.class_count
              << "\ntrain " << train_m.entries.size() << "\ntest " << test_m.entries.size()
              << "\n";
  });

  // --- augment: write tangent variants as PGM files --------------------------
  auto* augment = app.add_subcommand("augment", "Write first-order tangent variants of a dataset");
  std::string aug_manifest, aug_outdir, aug_kinds, aug_steps;
  int aug_grid = 1;
  augment->add_option("--manifest", aug_manifest, "Dataset manifest")->required();
  augment->add_option("--outdir", aug_outdir, "Output directory")->required();
  augment->add_option("--transforms", aug_kinds, "Comma list of tx,ty,rot,scale");
  augment->add_option("--steps", aug_steps, "Comma list of step sizes");
  augment->add_option("--grid", aug_grid, "Magnitudes 1..grid step units (max 3)");
  augment->callback([&] {
    DatasetManifest manifest = load_manifest(aug_manifest);
    fs::path base = fs::absolute(aug_manifest).parent_path();
    ImageSet set = augment_set(load_image_set(manifest, base), make_transforms(aug_kinds, aug_steps),
                               aug_grid);
    fs::create_directories(aug_outdir);
    DatasetManifest out;
    out.class_count = set.class_count;
    for (std::size_t i = 0; i < set.images.size(); ++i) {
      fs::path target = fs::path(aug_outdir) / (set.ids[i] + ".pgm");
      fs::create_directories(target.parent_path());
      save_image(set.images[i], target);
      out.entries.push_back({target, set.classes[i]});
    }
    save_manifest(out, fs::path(aug_outdir) / "manifest.txt");
    std::cout << "wrote " << set.images.size() << " images\n";
  });

  // --- features: per-block descriptors as CSV ---------------------------------
  auto* features = app.add_subcommand("features", "Compute 3x3 grid texture descriptors");
  std::string feat_manifest, feat_out, feat_offset, feat_kinds, feat_steps;
  int feat_levels = 8, feat_grid = 1;
  bool feat_augment = false;
  features->add_option("--manifest", feat_manifest, "Dataset manifest")->required();
  features->add_option("--out", feat_out, "Output CSV path")->required();
  features->add_option("--glcm-levels", feat_levels, "Gray levels for the co-occurrence matrix");
  features->add_option("--glcm-offset", feat_offset, "Offset 'dx,dy'");
  features->add_flag("--augment", feat_augment, "Include tangent variants");
  features->add_option("--transforms", feat_kinds, "Comma list of tx,ty,rot,scale");
  features->add_option("--steps", feat_steps, "Comma list of step sizes");
  features->add_option("--grid", feat_grid, "Augmentation magnitudes (max 3)");
  features->callback([&] {
    DatasetManifest manifest = load_manifest(feat_manifest);
    fs::path base = fs::absolute(feat_manifest).parent_path();
    ImageSet set = load_image_set(manifest, base);
    if (feat_augment) set = augment_set(set, make_transforms(feat_kinds, feat_steps), feat_grid);
    save_features_csv(compute_features(set, make_glcm(feat_levels, feat_offset)), feat_out);
    std::cout << "wrote " << set.images.size() * 9 << " descriptor rows\n";
  });

  // --- codebook: fit k-means or apply an existing codebook --------------------
  auto* codebook = app.add_subcommand("codebook", "Fit or apply the k-means label codebook");
  auto* fit = codebook->add_subcommand("fit", "Cluster training descriptors");
  std::string fit_features, fit_out;
  KMeansConfig fit_cfg;
  fit->add_option("--features", fit_features, "Feature CSV")->required();
  fit->add_option("--out", fit_out, "Codebook output path")->required();
  fit->add_option("--k", fit_cfg.k, "Cluster count");
  fit->add_option("--seed", fit_cfg.seed, "Seeding RNG seed");
  fit->add_option("--max-iter", fit_cfg.max_iter, "Iteration cap");
  fit->add_option("--tol", fit_cfg.tol, "Centroid movement tolerance");
  fit->callback([&] {
    KMeansDiagnostics diag;
    Codebook cb = kmeans_fit(feature_points(load_features_csv(fit_features)), fit_cfg, &diag);
    save_codebook(cb, fit_out);
    std::cout << "iterations " << diag.iterations << "\ninertia "
              << format_double(diag.inertia_per_iteration.back()) << "\n";
  });

  auto* apply = codebook->add_subcommand("apply", "Quantize descriptors into label vectors");
  std::string apply_features, apply_codebook, apply_manifest, apply_out;
  apply->add_option("--features", apply_features, "Feature CSV")->required();
  apply->add_option("--codebook", apply_codebook, "Codebook file")->required();
  apply->add_option("--manifest", apply_manifest, "Manifest supplying class ids")->required();
  apply->add_option("--out", apply_out, "Label file output path")->required();
  apply->callback([&] {
    FeatureTable table = load_features_csv(apply_features);
    DatasetManifest manifest = load_manifest(apply_manifest);
    attach_classes(table, manifest, fs::absolute(apply_manifest).parent_path());
    save_labels(labelize_table(table, load_codebook(apply_codebook), manifest.class_count),
                apply_out);
    std::cout << "wrote " << table.ids.size() << " label vectors\n";
  });
  codebook->require_subcommand(1);

  // --- train -------------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train a Bayesian network classifier");
  std::string train_labels, train_out, train_kind = "nb", train_threshold;
  train_cmd->add_option("--labels", train_labels, "Training label file")->required();
  train_cmd->add_option("--out", train_out, "Model output path")->required();
  train_cmd->add_option("--kind", train_kind, "nb|gtan|gfan|tan|fan");
  train_cmd->add_option("--threshold", train_threshold, "FAN threshold: avg or a number");
  train_cmd->callback([&] {
    LabeledSet set = load_labels(train_labels);
    TrainedClassifier clf =
        train(make_kind(train_kind, train_threshold), set.data, label_space(set));
    save_classifier(clf, train_out);
    for (const auto& line : structure_summary(clf)) std::cout << line << "\n";
  });

  // --- evaluate ------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a model on train/test label files");
  std::string eval_model, eval_train, eval_test, eval_json, eval_text;
  bool eval_timings = false;
  eval_cmd->add_option("--model", eval_model, "Model file")->required();
  eval_cmd->add_option("--train-labels", eval_train, "Training label file")->required();
  eval_cmd->add_option("--test-labels", eval_test, "Test label file")->required();
  eval_cmd->add_option("--out-json", eval_json, "JSON report path");
  eval_cmd->add_option("--out-text", eval_text, "Text report path");
  eval_cmd->add_flag("--report-timings", eval_timings, "Include wall times in report files");
  eval_cmd->callback([&] {
    TrainedClassifier clf = load_classifier(eval_model);
    EvaluationReport report =
        evaluate(clf, load_labels(eval_train).data, load_labels(eval_test).data);
    if (!eval_json.empty()) write_text_file(eval_json, render_json(report, eval_timings));
    if (!eval_text.empty()) write_text_file(eval_text, render_text(report, eval_timings));
    std::cout << render_text(report, true);
  });

  // --- classify: one image through codebook + model -------------------------------
  auto* classify_cmd = app.add_subcommand("classify", "Classify a single PGM image");
  std::string cls_model, cls_codebook, cls_image, cls_offset;
  int cls_levels = 8;
  classify_cmd->add_option("--model", cls_model, "Model file")->required();
  classify_cmd->add_option("--codebook", cls_codebook, "Codebook file")->required();
  classify_cmd->add_option("--image", cls_image, "PGM image path")->required();
  classify_cmd->add_option("--glcm-levels", cls_levels, "Gray levels");
  classify_cmd->add_option("--glcm-offset", cls_offset, "Offset 'dx,dy'");
  classify_cmd->callback([&] {
    TrainedClassifier clf = load_classifier(cls_model);
    Codebook cb = load_codebook(cls_codebook);
    LabelVector lv =
        labelize(cb, describe_image(load_image(cls_image), make_glcm(cls_levels, cls_offset)));
    auto [decision, post] = classify(clf, std::vector<int>(lv.begin(), lv.end()));
    std::cout << "labels";
    for (int v : lv) std::cout << ' ' << v;
    std::cout << "\nclass " << decision << "\nposterior";
    for (double p : post) std::cout << ' ' << format_double(p);
    std::cout << "\n";
  });

  // --- dag-count --------------------------------------------------------------------
  auto* dag = app.add_subcommand("dag-count", "Count labeled DAGs on n nodes");
  int dag_n = 0;
  dag->add_option("n", dag_n, "Node count, 0..25")->required();
  dag->callback([&] {
    if (dag_n < 0 || dag_n > 25)
      throw RangeError("n = " + std::to_string(dag_n) + " outside [0, 25]");
    std::cout << robinson_dag_count(dag_n).str() << "\n";
  });

  // --- pipeline ---------------------------------------------------------------------
  auto* pipe = app.add_subcommand("pipeline", "Run ingest through evaluate in one process");
  std::string pipe_config;
  std::vector<std::string> pipe_sets;
  pipe->add_option("--config", pipe_config, "key=value config file");
  pipe->add_option("--set", pipe_sets, "Override: key=value (repeatable)");
  for (const char* key : {"manifest", "outdir", "kind", "threshold"}) {
    // Common keys get first-class flags; anything else goes through --set.
    auto* opt = pipe->add_option_function<std::string>(
        std::string("--") + key,
        [&pipe_sets, key](const std::string& v) { pipe_sets.push_back(std::string(key) + "=" + v); },
        std::string("Config key '") + key + "'");
    opt->ignore_case(false);
  }
  pipe->callback([&] {
    PipelineConfig cfg;
    if (!pipe_config.empty()) cfg = load_config(pipe_config);
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& entry : pipe_sets) {
      auto eq = entry.find('=');
      if (eq == std::string::npos)
        throw ConfigError("override '" + entry + "' is not key=value");
      overrides.emplace_back(trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
    }
    for (const auto& [key, value] : overrides)
      if (key == "kind") apply_config_entry(cfg, key, value);
    for (const auto& [key, value] : overrides)
      if (key != "kind") apply_config_entry(cfg, key, value);

    PipelineResult result = run_pipeline(cfg);
    for (const auto& [name, seconds] : result.stage_seconds)
      std::cout << "stage " << name << ": " << format_double(seconds) << " s\n";
    std::cout << "\n" << render_text(result.report, true);
    std::cout << "artifacts in " << result.outdir.string() << "\n";
  });

  app.require_subcommand(1);
  app.parse(argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Face texture classification with Bayesian networks"};
  try {
    return run(app, argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad usage is a configuration error
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
