#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "facebn/classifier.hpp"

namespace facebn {

double pcc(const std::vector<int>& predictions, const std::vector<int>& truth);  // EmptyDataError

// Row-major class_count x class_count counts; cell (t, p) counts instances of
// true class t predicted as p.
std::vector<std::int64_t> confusion(const std::vector<int>& predictions,
                                    const std::vector<int>& truth, int class_count);  // RangeError

struct EvaluationReport {
  std::string network;    // NB / TAN / FAN
  std::string structure;  // naive / global / per-class
  int class_count = 0;
  int cluster_count = 0;  // shared attribute cardinality; 0 when mixed
  std::vector<std::int64_t> train_per_class;
  std::vector<std::int64_t> test_per_class;
  std::vector<double> train_rate;  // per class; 0 when the class is absent
  std::vector<double> test_rate;
  double pcc_train = 0.0;
  double pcc_test = 0.0;
  std::vector<std::int64_t> confusion_test;  // class_count x class_count
  std::vector<std::string> structure_desc;
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
};

EvaluationReport evaluate(const TrainedClassifier& clf, const Dataset& train_set,
                          const Dataset& test_set);  // EmptyDataError

// Aligned table (Network, Structure, class, k, train rate, test rate; rates
// to 2 decimals with a '.' separator) plus confusion matrix and arc listing.
// Timings are appended only on request so rendered reports stay byte-stable.
std::string render_text(const EvaluationReport& report, bool include_timings = false);
std::string render_json(const EvaluationReport& report, bool include_timings = false);

}  // namespace facebn
