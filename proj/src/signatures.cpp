#include "chatter/signatures.hpp"

#include <string>

namespace chatter {

Eigen::Matrix<double, Eigen::Dynamic, 2> landscape_path(
    const PiecewiseLinear& ls_k) {
  if (ls_k.nodes.rows() < 2) return Eigen::Matrix<double, Eigen::Dynamic, 2>(0, 2);
  return ls_k.nodes;
}

SignatureTuple signature_level1(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& path) {
  SignatureTuple s;
  const Eigen::Index n = path.rows();
  if (n < 2) {
    s.degenerate = true;
    return s;
  }
  s.s1 = path(n - 1, 0) - path(0, 0);
  // The per-piece slope integrals sum(slope_i * dx_i) telescope to the
  // endpoint difference.
  double s2 = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) s2 += path(i + 1, 1) - path(i, 1);
  s.s2 = s2;
  return s;
}

SignatureTuple signature_level2(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& path) {
  SignatureTuple s = signature_level1(path);
  if (s.degenerate) return s;
  const Eigen::Index n = path.rows();
  const double x1 = path(0, 0), y1 = path(0, 1);

  // Iterated integrals over a < t1 < t2 < b of the path (t, f(t)), one
  // linear piece of slope m_i at a time:
  //   S11 = int (t2 - x1) dt2                 = (xn - x1)^2 / 2
  //   S12 = sum_i m_i int (t2 - x1) dt2       over [x_i, x_{i+1}]
  //   S21 = sum_i int (f(t2) - y1) dt2        over [x_i, x_{i+1}]
  //   S22 = sum_i m_i int (f(t2) - y1) dt2    over [x_i, x_{i+1}]
  double s12 = 0.0, s21 = 0.0, s22 = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double xa = path(i, 0), ya = path(i, 1);
    const double xb = path(i + 1, 0), yb = path(i + 1, 1);
    const double dx = xb - xa;
    if (dx == 0.0) continue;
    const double slope = (yb - ya) / dx;
    const double a_rel = xa - x1, b_rel = xb - x1;
    const double int_t = (b_rel * b_rel - a_rel * a_rel) / 2.0;   // int (t - x1) dt
    const double int_f = (ya - y1) * dx + slope * dx * dx / 2.0;  // int (f - y1) dt
    s12 += slope * int_t;
    s21 += int_f;
    s22 += slope * int_f;
  }
  s.s11 = s.s1 * s.s1 / 2.0;
  s.s12 = s12;
  s.s21 = s21;
  s.s22 = s22;
  return s;
}

FeatureMatrix signature_features_from_landscapes(
    const std::vector<Landscape>& landscapes, const std::vector<int>& labels,
    const std::vector<int>& k_set) {
  if (landscapes.size() != labels.size())
    throw DataError("signature_features: landscape/label count mismatch");
  FeatureMatrix fm;
  const Eigen::Index cols = Eigen::Index(k_set.size()) * 6;
  fm.features.resize(Eigen::Index(landscapes.size()), cols);
  fm.labels.resize(Eigen::Index(labels.size()));
  static const char* kNames[6] = {"S1", "S2", "S11", "S12", "S21", "S22"};
  for (int k : k_set)
    for (const char* name : kNames)
      fm.column_names.push_back("lambda" + std::to_string(k) + "_" + name);
  for (std::size_t r = 0; r < landscapes.size(); ++r) {
    fm.labels[Eigen::Index(r)] = labels[r];
    Eigen::Index at = 0;
    for (int k : k_set) {
      const auto path = landscape_path(landscapes[r].level(k));
      const SignatureTuple sig = signature_level2(path);
      fm.features.row(Eigen::Index(r)).segment(at, 6) = sig.vector().transpose();
      at += 6;
    }
  }
  return fm;
}

FeatureMatrix signature_features(const std::vector<PersistenceDiagram>& diags,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& k_set) {
  int k_max = 1;
  for (int k : k_set) k_max = std::max(k_max, k);
  std::vector<Landscape> landscapes;
  landscapes.reserve(diags.size());
  for (const auto& d : diags) landscapes.push_back(compute_landscapes(d, k_max));
  return signature_features_from_landscapes(landscapes, labels, k_set);
}

}  // namespace chatter
