#include "facebn/evaluation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "facebn/errors.hpp"
#include "facebn/textio.hpp"

namespace facebn {

namespace {

std::size_t su(int v) { return static_cast<std::size_t>(v); }

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

double pcc(const std::vector<int>& predictions, const std::vector<int>& truth) {
  if (predictions.empty()) throw EmptyDataError("classification rate over zero instances");
  if (predictions.size() != truth.size())
    throw DataError("got " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(truth.size()) + " instances");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truth[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::vector<std::int64_t> confusion(const std::vector<int>& predictions,
                                    const std::vector<int>& truth, int class_count) {
  if (predictions.size() != truth.size())
    throw DataError("got " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(truth.size()) + " instances");
  if (class_count < 1) throw RangeError("confusion matrix needs a positive class count");
  std::vector<std::int64_t> m(su(class_count) * su(class_count), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= class_count || predictions[i] < 0 ||
        predictions[i] >= class_count)
      throw RangeError("instance " + std::to_string(i) + " has class outside [0, " +
                       std::to_string(class_count) + ")");
    m[su(truth[i]) * su(class_count) + su(predictions[i])]++;
  }
  return m;
}

namespace {

struct SetScores {
  std::vector<std::int64_t> per_class;
  std::vector<double> rate;  // diagonal / row sum, 0 for absent classes
  double overall = 0.0;
  std::vector<std::int64_t> matrix;
};

SetScores score_set(const TrainedClassifier& clf, const Dataset& set) {
  const int C = clf.space.class_count;
  std::vector<int> predictions, truth;
  predictions.reserve(set.size());
  truth.reserve(set.size());
  for (const auto& [values, cls] : set) {
    predictions.push_back(classify(clf, values).first);
    truth.push_back(cls);
  }

  SetScores s;
  s.overall = pcc(predictions, truth);
  s.matrix = confusion(predictions, truth, C);
  s.per_class.assign(su(C), 0);
  s.rate.assign(su(C), 0.0);
  for (int t = 0; t < C; ++t) {
    std::int64_t row = 0;
    for (int p = 0; p < C; ++p) row += s.matrix[su(t) * su(C) + su(p)];
    s.per_class[su(t)] = row;
    if (row > 0)
      s.rate[su(t)] =
          static_cast<double>(s.matrix[su(t) * su(C) + su(t)]) / static_cast<double>(row);
  }
  return s;
}

}  // namespace

EvaluationReport evaluate(const TrainedClassifier& clf, const Dataset& train_set,
                          const Dataset& test_set) {
  auto start = std::chrono::steady_clock::now();

  EvaluationReport r;
  r.network = network_label(clf.kind);
  r.structure = structure_label(clf.kind);
  r.class_count = clf.space.class_count;
  r.cluster_count = clf.space.cardinalities.front();
  for (int v : clf.space.cardinalities)
    if (v != r.cluster_count) r.cluster_count = 0;

  SetScores train_scores = score_set(clf, train_set);
  SetScores test_scores = score_set(clf, test_set);
  r.train_per_class = std::move(train_scores.per_class);
  r.test_per_class = std::move(test_scores.per_class);
  r.train_rate = std::move(train_scores.rate);
  r.test_rate = std::move(test_scores.rate);
  r.pcc_train = train_scores.overall;
  r.pcc_test = test_scores.overall;
  r.confusion_test = std::move(test_scores.matrix);
  r.structure_desc = structure_summary(clf);
  r.train_seconds = clf.info.wall_seconds;
  r.eval_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string render_text(const EvaluationReport& report, bool include_timings) {
  std::vector<std::array<std::string, 6>> rows;
  rows.push_back({"Network", "Structure", "class", "k", "Train rate", "Test rate"});
  const std::string k_text =
      report.cluster_count > 0 ? std::to_string(report.cluster_count) : "-";
  for (int c = 0; c < report.class_count; ++c) {
    rows.push_back({c == 0 ? report.network : "", c == 0 ? report.structure : "",
                    std::to_string(c), k_text, two_decimals(report.train_rate[su(c)]),
                    two_decimals(report.test_rate[su(c)])});
  }
  rows.push_back({"", "", "all", k_text, two_decimals(report.pcc_train),
                  two_decimals(report.pcc_test)});

  std::array<std::size_t, 6> width{};
  for (const auto& row : rows)
    for (std::size_t f = 0; f < row.size(); ++f) width[f] = std::max(width[f], row[f].size());

  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (f > 0) out << "  ";
      out << row[f] << std::string(width[f] - row[f].size(), ' ');
    }
    out << '\n';
  }

  out << "\nConfusion matrix, test set (rows true class, columns predicted):\n";
  std::size_t cell_width = 1;
  for (std::int64_t v : report.confusion_test)
    cell_width = std::max(cell_width, std::to_string(v).size());
  for (int t = 0; t < report.class_count; ++t) {
    out << " ";
    for (int p = 0; p < report.class_count; ++p) {
      std::string v = std::to_string(report.confusion_test[su(t) * su(report.class_count) + su(p)]);
      out << ' ' << std::string(cell_width - v.size(), ' ') << v;
    }
    out << '\n';
  }

  out << "\nStructure:\n";
  for (const auto& line : report.structure_desc) out << "  " << line << '\n';

  if (include_timings)
    out << "\nTimings: train " << format_double(report.train_seconds) << " s, evaluate "
        << format_double(report.eval_seconds) << " s\n";
  return out.str();
}

std::string render_json(const EvaluationReport& report, bool include_timings) {
  nlohmann::ordered_json j;
  j["network"] = report.network;
  j["structure"] = report.structure;
  j["classes"] = report.class_count;
  j["clusters"] = report.cluster_count;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
  for (int c = 0; c < report.class_count; ++c) {
    per_class.push_back({{"class", c},
                         {"train_count", report.train_per_class[su(c)]},
                         {"test_count", report.test_per_class[su(c)]},
                         {"train_rate", report.train_rate[su(c)]},
                         {"test_rate", report.test_rate[su(c)]}});
  }
  j["per_class"] = std::move(per_class);
  j["pcc_train"] = report.pcc_train;
  j["pcc_test"] = report.pcc_test;
  nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
  for (int t = 0; t < report.class_count; ++t) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int p = 0; p < report.class_count; ++p)
      row.push_back(report.confusion_test[su(t) * su(report.class_count) + su(p)]);
    matrix.push_back(std::move(row));
  }
  j["confusion_test"] = std::move(matrix);
  j["arcs"] = report.structure_desc;
  if (include_timings) {
    j["train_seconds"] = report.train_seconds;
    j["eval_seconds"] = report.eval_seconds;
  }
  return j.dump(2) + "\n";
}

}  // namespace facebn
