#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chatter/featurize.hpp"

namespace chatter {

// First and second level path signatures of the planar path t -> (t, f(t))
// traced by one landscape function. For a path that starts and ends at
// height zero, S2 = S22 = 0 and S12 = -S21.
struct SignatureTuple {
  double s1 = 0, s2 = 0;
  double s11 = 0, s12 = 0, s21 = 0, s22 = 0;
  bool degenerate = false;  // fewer than two nodes; all components zero

  Eigen::Matrix<double, 6, 1> vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << s1, s2, s11, s12, s21, s22;
    return v;
  }
};

// The landscape's node list viewed as a path. Fewer than two nodes gives an
// empty path whose signature is zero.
Eigen::Matrix<double, Eigen::Dynamic, 2> landscape_path(
    const PiecewiseLinear& ls_k);

// S1 = x_n - x_1, S2 = y_n - y_1 (the per-piece slope integrals telescope).
SignatureTuple signature_level1(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& path);

// Closed forms of the four second-level iterated integrals, evaluated piece
// by piece; exact for piecewise-linear paths. Fills the level-1 entries too.
SignatureTuple signature_level2(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& path);

// Per diagram: concatenation over k in k_set of the 6-tuple
// (S1, S2, S11, S12, S21, S22) of lambda_k. 6 * |k_set| columns.
FeatureMatrix signature_features(const std::vector<PersistenceDiagram>& diags,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& k_set);

// Same from precomputed landscapes (avoids recomputing them per call).
FeatureMatrix signature_features_from_landscapes(
    const std::vector<Landscape>& landscapes, const std::vector<int>& labels,
    const std::vector<int>& k_set);

}  // namespace chatter
