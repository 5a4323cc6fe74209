#include "chatter/learn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "chatter/parallel.hpp"
#include "chatter/rng.hpp"
#include "chatter/signatures.hpp"

namespace chatter {

void Standardizer::fit(const Eigen::MatrixXd& X) {
  const double n = double(X.rows());
  mean = X.colwise().mean();
  Eigen::RowVectorXd var =
      ((X.rowwise() - mean).array().square().colwise().sum() / n).matrix();
  scale = var.array().sqrt();
  for (Eigen::Index c = 0; c < scale.size(); ++c)
    if (!(scale[c] > 0.0)) scale[c] = 1.0;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& X) const {
  return (X.rowwise() - mean).array().rowwise() / scale.array();
}

namespace {

constexpr double kTau = 1e-12;

struct SmoResult {
  Eigen::VectorXd alpha;
  double rho = 0.0;
  double gap = 0.0;
  long steps = 0;
};

// Sequential minimal optimization on the dual with maximal-violating-pair
// selection. K is the full kernel matrix, y in {-1,+1}, c the per-example
// box. Stops when the KKT gap m(alpha) - M(alpha) drops below tol.
SmoResult smo_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& c, double tol, long max_steps) {
  const Eigen::Index n = K.rows();
  SmoResult res;
  res.alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd G = Eigen::VectorXd::Constant(n, -1.0);  // gradient of the dual

  auto in_up = [&](Eigen::Index t) {
    return (y[t] > 0 && res.alpha[t] < c[t]) || (y[t] < 0 && res.alpha[t] > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (y[t] > 0 && res.alpha[t] > 0) || (y[t] < 0 && res.alpha[t] < c[t]);
  };

  long steps = 0;
  for (;;) {
    Eigen::Index i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    res.gap = gmax - gmin;
    if (i < 0 || j < 0 || res.gap < tol) break;
    if (++steps > max_steps)
      throw NumericError("smo_solve: no convergence within step budget");

    const double old_ai = res.alpha[i], old_aj = res.alpha[j];
    const double ci = c[i], cj = c[j];
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 0.0) quad = kTau;

    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = old_ai - old_aj;
      res.alpha[i] += delta;
      res.alpha[j] += delta;
      if (diff > 0) {
        if (res.alpha[j] < 0) { res.alpha[j] = 0; res.alpha[i] = diff; }
      } else {
        if (res.alpha[i] < 0) { res.alpha[i] = 0; res.alpha[j] = -diff; }
      }
      if (diff > ci - cj) {
        if (res.alpha[i] > ci) { res.alpha[i] = ci; res.alpha[j] = ci - diff; }
      } else {
        if (res.alpha[j] > cj) { res.alpha[j] = cj; res.alpha[i] = cj + diff; }
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = old_ai + old_aj;
      res.alpha[i] -= delta;
      res.alpha[j] += delta;
      if (sum > ci) {
        if (res.alpha[i] > ci) { res.alpha[i] = ci; res.alpha[j] = sum - ci; }
      } else {
        if (res.alpha[j] < 0) { res.alpha[j] = 0; res.alpha[i] = sum; }
      }
      if (sum > cj) {
        if (res.alpha[j] > cj) { res.alpha[j] = cj; res.alpha[i] = sum - cj; }
      } else {
        if (res.alpha[i] < 0) { res.alpha[i] = 0; res.alpha[j] = sum; }
      }
    }

    const double dai = res.alpha[i] - old_ai;
    const double daj = res.alpha[j] - old_aj;
    G.array() += y.array() * (K.col(i).array() * (y[i] * dai) +
                              K.col(j).array() * (y[j] * daj));
  }
  res.steps = steps;

  // Bias from the free support vectors, or the midpoint of the admissible
  // interval when none are free.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (res.alpha[t] >= c[t]) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (res.alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  res.rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
  return res;
}

Eigen::VectorXd signed_labels(const Eigen::VectorXi& labels01) {
  Eigen::VectorXd y(labels01.size());
  for (Eigen::Index i = 0; i < labels01.size(); ++i)
    y[i] = labels01[i] == 1 ? 1.0 : -1.0;
  return y;
}

Eigen::VectorXd class_boxes(const Eigen::VectorXd& y, const SvmParams& p) {
  const Eigen::Index n = y.size();
  const double n_pos = (y.array() > 0).count();
  const double n_neg = double(n) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw SingleClassTrainingSet("training set has a single class");
  Eigen::VectorXd c(n);
  if (p.class_weights) {
    const double c_pos = p.C * double(n) / (2.0 * n_pos);
    const double c_neg = p.C * double(n) / (2.0 * n_neg);
    for (Eigen::Index i = 0; i < n; ++i) c[i] = y[i] > 0 ? c_pos : c_neg;
  } else {
    c.setConstant(p.C);
  }
  return c;
}

double resolve_gamma(const Eigen::MatrixXd& X, double gamma) {
  if (gamma > 0.0) return gamma;
  const double n = double(X.rows());
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const double mean_var =
      ((X.rowwise() - mean).array().square().sum() / n) / double(X.cols());
  if (!(mean_var > 0.0)) return 1.0 / double(X.cols());
  return 1.0 / (double(X.cols()) * mean_var);
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double gamma) {
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd D = -2.0 * A * B.transpose();
  D.colwise() += a2;
  D.rowwise() += b2.transpose();
  return (-gamma * D.array().max(0.0)).exp();
}

}  // namespace

SvmModel train_svm(const FeatureMatrix& features, const SvmParams& params) {
  const Eigen::MatrixXd& X = features.features;
  if (X.rows() < 2) throw DataError("train_svm: need at least two examples");
  if (!X.allFinite()) throw DataError("train_svm: non-finite feature values");
  const Eigen::VectorXd y = signed_labels(features.labels);
  const Eigen::VectorXd c = class_boxes(y, params);
  const double gamma = resolve_gamma(X, params.gamma);
  const Eigen::MatrixXd K = rbf_gram(X, X, gamma);
  SmoResult r = smo_solve(K, y, c, params.tol, params.max_steps);

  SvmModel m;
  m.kernel = SvmModel::KernelType::Rbf;
  m.gamma = gamma;
  m.rho = r.rho;
  m.n_features = X.cols();
  m.alpha = r.alpha;
  m.y = y;
  m.c_box = c;
  m.kkt_gap = r.gap;
  m.steps = r.steps;
  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < r.alpha.size(); ++i)
    if (r.alpha[i] > 0.0) sv.push_back(i);
  m.coef.resize(Eigen::Index(sv.size()));
  m.support_vectors.resize(Eigen::Index(sv.size()), X.cols());
  for (Eigen::Index s = 0; s < Eigen::Index(sv.size()); ++s) {
    m.coef[s] = r.alpha[sv[std::size_t(s)]] * y[sv[std::size_t(s)]];
    m.support_vectors.row(s) = X.row(sv[std::size_t(s)]);
  }
  return m;
}

SvmModel train_svm(const FeatureMatrix& features, double C, double gamma) {
  SvmParams p;
  p.C = C;
  p.gamma = gamma;
  return train_svm(features, p);
}

SvmModel train_svm_precomputed(const Eigen::MatrixXd& gram,
                               const Eigen::VectorXi& labels,
                               const SvmParams& params) {
  if (gram.rows() != gram.cols())
    throw AsymmetricGram("train_svm_precomputed: Gram matrix is not square");
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw AsymmetricGram("train_svm_precomputed: Gram matrix is not symmetric");
  if (labels.size() != gram.rows())
    throw DimensionMismatch("train_svm_precomputed: label count mismatch");
  const Eigen::VectorXd y = signed_labels(labels);
  const Eigen::VectorXd c = class_boxes(y, params);
  SmoResult r = smo_solve(gram, y, c, params.tol, params.max_steps);

  SvmModel m;
  m.kernel = SvmModel::KernelType::Precomputed;
  m.rho = r.rho;
  m.n_train = int(gram.rows());
  m.alpha = r.alpha;
  m.y = y;
  m.c_box = c;
  m.kkt_gap = r.gap;
  m.steps = r.steps;
  for (Eigen::Index i = 0; i < r.alpha.size(); ++i)
    if (r.alpha[i] > 0.0) m.support_idx.push_back(int(i));
  m.coef.resize(Eigen::Index(m.support_idx.size()));
  for (Eigen::Index s = 0; s < m.coef.size(); ++s) {
    const int t = m.support_idx[std::size_t(s)];
    m.coef[s] = r.alpha[t] * y[t];
  }
  return m;
}

Eigen::VectorXd decision_function(const SvmModel& model, const Eigen::MatrixXd& X) {
  if (model.kernel != SvmModel::KernelType::Rbf)
    throw ConfigError("decision_function: model expects a precomputed kernel");
  if (X.cols() != model.n_features)
    throw DimensionMismatch("decision_function: feature count mismatch: got " +
                            std::to_string(X.cols()) + ", trained on " +
                            std::to_string(model.n_features));
  if (model.coef.size() == 0)
    return Eigen::VectorXd::Constant(X.rows(), -model.rho);
  const Eigen::MatrixXd K = rbf_gram(X, model.support_vectors, model.gamma);
  return (K * model.coef).array() - model.rho;
}

Eigen::VectorXd decision_function_precomputed(const SvmModel& model,
                                              const Eigen::MatrixXd& test_gram) {
  if (model.kernel != SvmModel::KernelType::Precomputed)
    throw ConfigError("decision_function_precomputed: model expects feature rows");
  if (test_gram.cols() != model.n_train)
    throw DimensionMismatch("decision_function_precomputed: need one column per training example");
  Eigen::VectorXd dec = Eigen::VectorXd::Constant(test_gram.rows(), -model.rho);
  for (Eigen::Index s = 0; s < model.coef.size(); ++s)
    dec += model.coef[s] * test_gram.col(model.support_idx[std::size_t(s)]);
  return dec;
}

namespace {

Eigen::VectorXi decisions_to_labels(const Eigen::VectorXd& dec) {
  Eigen::VectorXi out(dec.size());
  for (Eigen::Index i = 0; i < dec.size(); ++i) out[i] = dec[i] >= 0.0 ? 1 : 0;
  return out;
}

}  // namespace

Eigen::VectorXi predict(const SvmModel& model, const Eigen::MatrixXd& X) {
  return decisions_to_labels(decision_function(model, X));
}

Eigen::VectorXi predict_precomputed(const SvmModel& model,
                                    const Eigen::MatrixXd& test_gram) {
  return decisions_to_labels(decision_function_precomputed(model, test_gram));
}

Method parse_method(const std::string& s) {
  if (s == "landscapes") return Method::Landscapes;
  if (s == "images") return Method::Images;
  if (s == "carlsson") return Method::Carlsson;
  if (s == "kernel") return Method::Kernel;
  if (s == "signatures") return Method::Signatures;
  throw ConfigError("unknown method: \"" + s +
                    "\" (expected landscapes|images|carlsson|kernel|signatures)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Landscapes: return "landscapes";
    case Method::Images: return "images";
    case Method::Carlsson: return "carlsson";
    case Method::Kernel: return "kernel";
    case Method::Signatures: return "signatures";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Split {
  std::vector<int> train_chunks, test_chunks;
};

// Record-level split so chunks of one cut never straddle train and test.
// Redrawn while either side misses a class, up to 100 times.
Split draw_split(const DiagramDataset& ds, double split, Rng& rng,
                 int* resamples) {
  const int n_rec = ds.n_records();
  std::vector<int> order(static_cast<std::size_t>(n_rec), 0);
  std::iota(order.begin(), order.end(), 0);
  int n_train = int(std::llround(split * n_rec));
  n_train = std::clamp(n_train, 1, n_rec - 1);

  for (int attempt = 0; attempt < 100; ++attempt) {
    rng.shuffle(order);
    std::vector<char> in_train(std::size_t(n_rec), 0);
    for (int r = 0; r < n_train; ++r) in_train[std::size_t(order[std::size_t(r)])] = 1;
    bool tr0 = false, tr1 = false, te0 = false, te1 = false;
    for (int r = 0; r < n_rec; ++r) {
      const bool pos = ds.record_labels[std::size_t(r)] == 1;
      if (in_train[std::size_t(r)]) (pos ? tr1 : tr0) = true;
      else (pos ? te1 : te0) = true;
    }
    if (!(tr0 && tr1 && te0 && te1)) {
      if (resamples) ++*resamples;
      continue;
    }
    Split s;
    for (int c = 0; c < ds.n_chunks(); ++c) {
      if (in_train[std::size_t(ds.chunk_record[std::size_t(c)])])
        s.train_chunks.push_back(c);
      else
        s.test_chunks.push_back(c);
    }
    return s;
  }
  throw EmptyClassAfterSplit("no split with both classes on both sides after 100 draws");
}

Eigen::VectorXi take_labels(const DiagramDataset& ds, const std::vector<int>& idx) {
  Eigen::VectorXi out(Eigen::Index(idx.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = ds.chunk_labels[std::size_t(idx[std::size_t(i)])];
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
  Eigen::MatrixXd out(Eigen::Index(idx.size()), X.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    out.row(i) = X.row(idx[std::size_t(i)]);
  return out;
}

double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
  return double((pred.array() == truth.array()).count()) / double(truth.size());
}

void finalize_stats(EvalReport& r) {
  auto mean_std = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    sd = std::sqrt(acc / double(v.size()));  // population, over iterations
  };
  mean_std(r.train_accuracy, r.mean_train, r.std_train);
  mean_std(r.test_accuracy, r.mean_test, r.std_test);
}

// Train on standardized train rows, score both sides.
void run_feature_iteration(const Eigen::MatrixXd& train_X,
                           const Eigen::VectorXi& train_y,
                           const Eigen::MatrixXd& test_X,
                           const Eigen::VectorXi& test_y, const EvalConfig& cfg,
                           EvalReport& report) {
  Eigen::MatrixXd tr = train_X, te = test_X;
  if (cfg.standardize) {
    Standardizer st;
    st.fit(train_X);
    tr = st.transform(train_X);
    te = st.transform(test_X);
  }
  const auto t0 = Clock::now();
  FeatureMatrix fm;
  fm.features = std::move(tr);
  fm.labels = train_y;
  const SvmModel model = train_svm(fm, cfg.svm);
  report.stage_seconds["train"] += seconds_since(t0);

  const auto t1 = Clock::now();
  report.train_accuracy.push_back(accuracy(predict(model, fm.features), train_y));
  report.test_accuracy.push_back(accuracy(predict(model, te), test_y));
  report.stage_seconds["predict"] += seconds_since(t1);
}

EvalReport make_report(const EvalConfig& cfg) {
  EvalReport r;
  r.method = method_name(cfg.method);
  r.split = cfg.split;
  r.iterations = cfg.iterations;
  r.seed = cfg.seed;
  return r;
}

void validate_eval_inputs(const DiagramDataset& ds, const EvalConfig& cfg) {
  if (cfg.iterations < 1) throw ConfigError("evaluate: iterations must be >= 1");
  if (!(cfg.split > 0.0) || !(cfg.split < 1.0))
    throw ConfigError("evaluate: split must lie in (0, 1)");
  if (ds.n_chunks() == 0) throw DataError("evaluate: empty dataset");
  if (ds.chunk_labels.size() != ds.diagrams.size() ||
      ds.chunk_record.size() != ds.diagrams.size())
    throw DataError("evaluate: inconsistent dataset arrays");
  bool has0 = false, has1 = false;
  for (int l : ds.record_labels) (l == 1 ? has1 : has0) = true;
  if (!has0 || !has1)
    throw SingleClassTrainingSet("evaluate: dataset does not contain both classes");
}

// Protocol over a fixed per-chunk feature matrix (Carlsson coordinates,
// signatures, or any column slice of them).
EvalReport fixed_feature_protocol(const Eigen::MatrixXd& X,
                                  const DiagramDataset& ds,
                                  const EvalConfig& cfg) {
  EvalReport report = make_report(cfg);
  for (int it = 0; it < cfg.iterations; ++it) {
    Rng rng = Rng::derived(cfg.seed, std::uint64_t(it));
    Split sp = draw_split(ds, cfg.split, rng, &report.resamples);
    run_feature_iteration(take_rows(X, sp.train_chunks), take_labels(ds, sp.train_chunks),
                          take_rows(X, sp.test_chunks), take_labels(ds, sp.test_chunks),
                          cfg, report);
  }
  finalize_stats(report);
  return report;
}

}  // namespace

EvalReport evaluate(const DiagramDataset& ds, const EvalConfig& cfg) {
  validate_eval_inputs(ds, cfg);
  const auto t_feat = Clock::now();

  switch (cfg.method) {
    case Method::Carlsson: {
      Eigen::MatrixXd coords(ds.n_chunks(), 5);
      for (int c = 0; c < ds.n_chunks(); ++c)
        coords.row(c) = carlsson_coordinates(ds.diagrams[std::size_t(c)]).transpose();
      EvalReport r = fixed_feature_protocol(coords, ds, cfg);
      r.stage_seconds["featurize"] +=
          seconds_since(t_feat) - r.stage_seconds["train"] - r.stage_seconds["predict"];
      return r;
    }

    case Method::Signatures: {
      int k_max = 1;
      for (int k : cfg.params.k_set) k_max = std::max(k_max, k);
      std::vector<Landscape> landscapes(static_cast<std::size_t>(ds.n_chunks()));
      parallel_for(std::size_t(ds.n_chunks()), cfg.jobs, [&](std::size_t i) {
        landscapes[i] = compute_landscapes(ds.diagrams[i], k_max);
      });
      const FeatureMatrix fm = signature_features_from_landscapes(
          landscapes, ds.chunk_labels, cfg.params.k_set);
      EvalReport r = fixed_feature_protocol(fm.features, ds, cfg);
      r.method = method_name(cfg.method);
      r.stage_seconds["featurize"] +=
          seconds_since(t_feat) - r.stage_seconds["train"] - r.stage_seconds["predict"];
      return r;
    }

    case Method::Landscapes: {
      int k_max = 1;
      for (int k : cfg.params.k_set) k_max = std::max(k_max, k);
      std::vector<Landscape> landscapes(static_cast<std::size_t>(ds.n_chunks()));
      parallel_for(std::size_t(ds.n_chunks()), cfg.jobs, [&](std::size_t i) {
        landscapes[i] = compute_landscapes(ds.diagrams[i], k_max);
      });

      EvalReport report = make_report(cfg);
      for (int it = 0; it < cfg.iterations; ++it) {
        Rng rng = Rng::derived(cfg.seed, std::uint64_t(it));
        Split sp = draw_split(ds, cfg.split, rng, &report.resamples);
        // new meshes from this iteration's training set only
        std::vector<Landscape> train_ls;
        train_ls.reserve(sp.train_chunks.size());
        for (int c : sp.train_chunks) train_ls.push_back(landscapes[std::size_t(c)]);
        const LandscapeMesh mesh = build_meshes(train_ls, cfg.params.k_set);

        auto featurize_side = [&](const std::vector<int>& idx) {
          Eigen::MatrixXd X;
          for (std::size_t i = 0; i < idx.size(); ++i) {
            const Eigen::VectorXd f = landscape_features(
                landscapes[std::size_t(idx[i])], mesh, cfg.params.k_set);
            if (X.size() == 0) X.resize(Eigen::Index(idx.size()), f.size());
            X.row(Eigen::Index(i)) = f.transpose();
          }
          return X;
        };
        run_feature_iteration(featurize_side(sp.train_chunks),
                              take_labels(ds, sp.train_chunks),
                              featurize_side(sp.test_chunks),
                              take_labels(ds, sp.test_chunks), cfg, report);
      }
      finalize_stats(report);
      report.stage_seconds["featurize"] += seconds_since(t_feat) -
                                           report.stage_seconds["train"] -
                                           report.stage_seconds["predict"];
      return report;
    }

    case Method::Images: {
      EvalReport report = make_report(cfg);
      for (int it = 0; it < cfg.iterations; ++it) {
        Rng rng = Rng::derived(cfg.seed, std::uint64_t(it));
        Split sp = draw_split(ds, cfg.split, rng, &report.resamples);
        std::vector<PersistenceDiagram> train_diags;
        train_diags.reserve(sp.train_chunks.size());
        for (int c : sp.train_chunks) train_diags.push_back(ds.diagrams[std::size_t(c)]);
        const ImageBounds bounds =
            training_image_bounds(train_diags, cfg.params.image_sigma);

        auto featurize_side = [&](const std::vector<int>& idx) {
          Eigen::MatrixXd X;
          std::vector<Eigen::VectorXd> feats(idx.size());
          parallel_for(idx.size(), cfg.jobs, [&](std::size_t i) {
            feats[i] = image_features(
                persistence_image(ds.diagrams[std::size_t(idx[i])],
                                  cfg.params.image_pixel_size,
                                  cfg.params.image_sigma, bounds));
          });
          for (std::size_t i = 0; i < idx.size(); ++i) {
            if (X.size() == 0) X.resize(Eigen::Index(idx.size()), feats[i].size());
            X.row(Eigen::Index(i)) = feats[i].transpose();
          }
          return X;
        };
        run_feature_iteration(featurize_side(sp.train_chunks),
                              take_labels(ds, sp.train_chunks),
                              featurize_side(sp.test_chunks),
                              take_labels(ds, sp.test_chunks), cfg, report);
      }
      finalize_stats(report);
      report.stage_seconds["featurize"] += seconds_since(t_feat) -
                                           report.stage_seconds["train"] -
                                           report.stage_seconds["predict"];
      return report;
    }

    case Method::Kernel: {
      KernelMatrix computed;
      if (!cfg.precomputed_gram) {
        computed = kernel_matrix(ds.diagrams, cfg.params.kernel_sigma, cfg.jobs);
      } else if (cfg.precomputed_gram->sigma != cfg.params.kernel_sigma ||
                 cfg.precomputed_gram->values.rows() != ds.n_chunks()) {
        throw ConfigError("evaluate: precomputed Gram does not match dataset/sigma");
      }
      const KernelMatrix& gram =
          cfg.precomputed_gram ? *cfg.precomputed_gram : computed;
      EvalReport report = make_report(cfg);
      for (int it = 0; it < cfg.iterations; ++it) {
        Rng rng = Rng::derived(cfg.seed, std::uint64_t(it));
        Split sp = draw_split(ds, cfg.split, rng, &report.resamples);
        const auto n_tr = Eigen::Index(sp.train_chunks.size());
        const auto n_te = Eigen::Index(sp.test_chunks.size());
        Eigen::MatrixXd train_gram(n_tr, n_tr), test_gram(n_te, n_tr);
        for (Eigen::Index a = 0; a < n_tr; ++a)
          for (Eigen::Index b = 0; b < n_tr; ++b)
            train_gram(a, b) = gram.values(sp.train_chunks[std::size_t(a)],
                                           sp.train_chunks[std::size_t(b)]);
        for (Eigen::Index a = 0; a < n_te; ++a)
          for (Eigen::Index b = 0; b < n_tr; ++b)
            test_gram(a, b) = gram.values(sp.test_chunks[std::size_t(a)],
                                          sp.train_chunks[std::size_t(b)]);

        const auto t0 = Clock::now();
        const SvmModel model = train_svm_precomputed(
            train_gram, take_labels(ds, sp.train_chunks), cfg.svm);
        report.stage_seconds["train"] += seconds_since(t0);

        const auto t1 = Clock::now();
        report.train_accuracy.push_back(accuracy(
            predict_precomputed(model, train_gram), take_labels(ds, sp.train_chunks)));
        report.test_accuracy.push_back(accuracy(
            predict_precomputed(model, test_gram), take_labels(ds, sp.test_chunks)));
        report.stage_seconds["predict"] += seconds_since(t1);
      }
      finalize_stats(report);
      report.stage_seconds["featurize"] += seconds_since(t_feat) -
                                           report.stage_seconds["train"] -
                                           report.stage_seconds["predict"];
      return report;
    }
  }
  throw ConfigError("evaluate: unhandled method");
}

SubsetSearchResult carlsson_subset_search(const DiagramDataset& ds,
                                          const EvalConfig& cfg) {
  validate_eval_inputs(ds, cfg);
  Eigen::MatrixXd coords(ds.n_chunks(), 5);
  for (int c = 0; c < ds.n_chunks(); ++c)
    coords.row(c) = carlsson_coordinates(ds.diagrams[std::size_t(c)]).transpose();

  SubsetSearchResult result;
  const auto subsets = coordinate_subsets();
  for (const auto& subset : subsets) {
    Eigen::MatrixXd X(coords.rows(), Eigen::Index(subset.size()));
    for (Eigen::Index c = 0; c < X.cols(); ++c)
      X.col(c) = coords.col(subset[std::size_t(c)] - 1);
    SubsetReport sr;
    sr.subset = subset;
    sr.report = fixed_feature_protocol(X, ds, cfg);
    std::string tag = "carlsson:";
    for (std::size_t i = 0; i < subset.size(); ++i)
      tag += (i ? "-" : "") + std::to_string(subset[i]);
    sr.report.method = tag;
    result.reports.push_back(std::move(sr));
  }
  for (std::size_t i = 0; i < result.reports.size(); ++i)
    if (result.reports[i].report.mean_test >
        result.reports[std::size_t(result.best_index)].report.mean_test)
      result.best_index = int(i);
  return result;
}

nlohmann::json report_to_json(const EvalReport& r, bool include_timings) {
  nlohmann::json j;
  j["method"] = r.method;
  j["split"] = r.split;
  j["iterations"] = r.iterations;
  j["seed"] = r.seed;
  j["train_accuracy"] = r.train_accuracy;
  j["test_accuracy"] = r.test_accuracy;
  j["mean_train"] = r.mean_train;
  j["std_train"] = r.std_train;
  j["mean_test"] = r.mean_test;
  j["std_test"] = r.std_test;
  j["resamples"] = r.resamples;
  if (include_timings) j["stage_seconds"] = r.stage_seconds;
  return j;
}

std::string report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-18s %-22s %-22s\n", "method",
                "test accuracy", "train accuracy");
  out << line;
  out << std::string(62, '-') << "\n";
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-18s %5.1f%% +- %4.1f%%       %5.1f%% +- %4.1f%%\n",
                  r.method.c_str(), 100.0 * r.mean_test, 100.0 * r.std_test,
                  100.0 * r.mean_train, 100.0 * r.std_train);
    out << line;
  }
  return out.str();
}

}  // namespace chatter
