#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chatter/errors.hpp"
#include "chatter/featurize.hpp"
#include "chatter/kernel.hpp"

namespace chatter {

struct SingleClassTrainingSet : DataError {
  using DataError::DataError;
};
struct AsymmetricGram : DataError {
  using DataError::DataError;
};
struct DimensionMismatch : DataError {
  using DataError::DataError;
};
struct EmptyClassAfterSplit : DataError {
  using DataError::DataError;
};

// Column-wise standardization fitted on training rows; zero-variance
// columns keep scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean, scale;

  void fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
};

struct SvmParams {
  double C = 1.0;
  double gamma = 0.0;  // rbf scale; <= 0 means 1 / (n_features * mean variance)
  double tol = 1e-3;   // KKT stopping tolerance of the SMO solver
  bool class_weights = true;  // C_k = C * n / (2 n_k)
  long max_steps = 10'000'000;
};

// Binary SVM, either RBF over feature rows or precomputed kernel. The dual
// is solved by sequential minimal optimization with maximal-violating-pair
// selection, which is deterministic for fixed inputs. Decision values are
// sum_i coef_i K(sv_i, x) - rho; label 1 wherever the decision is >= 0.
struct SvmModel {
  enum class KernelType { Rbf, Precomputed };
  KernelType kernel = KernelType::Rbf;
  double gamma = 1.0;
  double rho = 0.0;
  Eigen::VectorXd coef;             // alpha_i * y_i on support vectors
  Eigen::MatrixXd support_vectors;  // rbf mode
  std::vector<int> support_idx;     // precomputed mode: training indices
  Eigen::Index n_features = 0;      // rbf mode
  int n_train = 0;                  // precomputed mode

  // solver diagnostics, kept for the KKT invariants
  Eigen::VectorXd alpha;  // full dual vector in training order
  Eigen::VectorXd y;      // +-1 labels in training order
  Eigen::VectorXd c_box;  // per-example box constraint
  double kkt_gap = 0.0;
  long steps = 0;
};

SvmModel train_svm(const FeatureMatrix& features, const SvmParams& params = {});
SvmModel train_svm(const FeatureMatrix& features, double C, double gamma);

// Precomputed-kernel training. `gram` must be square and symmetric within
// 1e-10 and match labels in size.
SvmModel train_svm_precomputed(const Eigen::MatrixXd& gram,
                               const Eigen::VectorXi& labels,
                               const SvmParams& params = {});

Eigen::VectorXd decision_function(const SvmModel& model,
                                  const Eigen::MatrixXd& X);
// Rows of `test_gram` are kernel evaluations of one test example against the
// full training set (in training order).
Eigen::VectorXd decision_function_precomputed(const SvmModel& model,
                                              const Eigen::MatrixXd& test_gram);

Eigen::VectorXi predict(const SvmModel& model, const Eigen::MatrixXd& X);
Eigen::VectorXi predict_precomputed(const SvmModel& model,
                                    const Eigen::MatrixXd& test_gram);

enum class Method { Landscapes, Images, Carlsson, Kernel, Signatures };

Method parse_method(const std::string& s);
std::string method_name(Method m);

struct MethodParams {
  std::vector<int> k_set{1, 2, 3, 4, 5};  // landscapes and signatures
  double image_pixel_size = 0.1;
  double image_sigma = 1.0;
  double kernel_sigma = 0.25;
};

struct EvalConfig {
  Method method = Method::Carlsson;
  double split = 0.67;  // training fraction, record-level
  int iterations = 10;
  std::uint64_t seed = 0;
  bool standardize = true;  // feature-space methods only
  MethodParams params;
  SvmParams svm;
  int jobs = 1;
  // Optional Gram cache for the kernel method; must match kernel_sigma and
  // the dataset's diagram order. Not owned.
  const KernelMatrix* precomputed_gram = nullptr;
};

// One diagram per chunk plus the record structure needed for leakage-free
// splitting: chunks of one record never straddle train and test.
struct DiagramDataset {
  std::vector<PersistenceDiagram> diagrams;
  std::vector<int> chunk_labels;         // 0/1
  std::vector<int> chunk_record;         // chunk -> record index
  std::vector<int> record_labels;        // 0/1 per record
  std::vector<std::string> chunk_ids;

  int n_chunks() const { return int(diagrams.size()); }
  int n_records() const { return int(record_labels.size()); }
};

struct EvalReport {
  std::string method;
  double split = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> train_accuracy, test_accuracy;  // per iteration
  double mean_train = 0, std_train = 0;
  double mean_test = 0, std_test = 0;
  int resamples = 0;  // splits redrawn because a class went missing
  std::map<std::string, double> stage_seconds;
};

// Repeated random split-train-test at the record level. Training-derived
// artifacts (landscape meshes, image bounds and weight cutoff, feature
// standardization) are fitted on each iteration's training portion and
// reused on its test portion. Mean and standard deviation are over
// iterations (population std). A split that leaves either side without both
// classes is redrawn, up to 100 times per iteration.
EvalReport evaluate(const DiagramDataset& ds, const EvalConfig& cfg);

struct SubsetReport {
  std::vector<int> subset;
  EvalReport report;
};

struct SubsetSearchResult {
  std::vector<SubsetReport> reports;  // all 31 subsets
  int best_index = 0;                 // argmax mean test accuracy
};

// Runs the evaluate protocol for every nonempty subset of the five Carlsson
// coordinates, with identical splits across subsets (same seed).
SubsetSearchResult carlsson_subset_search(const DiagramDataset& ds,
                                          const EvalConfig& cfg);

nlohmann::json report_to_json(const EvalReport& r, bool include_timings = false);
std::string report_table(const std::vector<EvalReport>& reports);

}  // namespace chatter
