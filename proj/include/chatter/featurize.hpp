#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "chatter/errors.hpp"
#include "chatter/persistence.hpp"

namespace chatter {

struct DegenerateBounds : NumericError {
  using NumericError::NumericError;
};
struct MeshMissingForK : ConfigError {
  using ConfigError::ConfigError;
};

// Piecewise-linear function stored as ordered breakpoint nodes (x, y),
// strictly increasing in x, zero outside [x_front, x_back]. An empty node
// list is the zero function.
struct PiecewiseLinear {
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;

  bool empty() const { return nodes.rows() < 2; }
  double operator()(double x) const;
};

// Persistence landscape: levels[k-1] is the k-th landscape function, the
// pointwise k-th largest of the tent functions g_(b,d). Levels satisfy
// lambda_k >= lambda_{k+1} pointwise and every piece has slope in {-1,0,+1}.
struct Landscape {
  std::vector<PiecewiseLinear> levels;

  const PiecewiseLinear& level(int k) const;  // 1-based; empty beyond levels
  double value(int k, double x) const;
};

// Exact landscape construction: nodes are placed at every tent endpoint and
// every pairwise tent crossing, so each lambda_k is captured with no
// sampling error. Empty diagram gives k_max zero functions.
Landscape compute_landscapes(const PersistenceDiagram& diag, int k_max = 5);

// Per-landscape-index evaluation mesh (strictly increasing, deduplicated).
struct LandscapeMesh {
  std::map<int, Eigen::VectorXd> grid;  // k -> birth-axis values

  bool has(int k) const { return grid.count(k) != 0; }
};

// Mesh for landscape index k: the sorted, deduplicated union of node
// x-coordinates of lambda_k over the training set. When every training
// lambda_k is identically zero the mesh degenerates to the single point 0
// so feature lengths stay stable.
Eigen::VectorXd build_mesh(const std::vector<Landscape>& training, int k);

LandscapeMesh build_meshes(const std::vector<Landscape>& training,
                           const std::vector<int>& k_set);

// Concatenation over k in k_set of lambda_k interpolated at every mesh
// point (zero outside support). Length = sum of mesh sizes.
Eigen::VectorXd landscape_features(const Landscape& ls,
                                   const LandscapeMesh& mesh,
                                   const std::vector<int>& k_set);

// Birth/persistence window of a persistence image plus the weight cutoff.
// The window is what the pixel grid covers; w_cutoff is the observed max
// persistence of the training set and sets where the linear weight ramp
// saturates at 1.
struct ImageBounds {
  double birth_min = 0.0, birth_max = 0.0;
  double pers_min = 0.0, pers_max = 0.0;
  double w_cutoff = 0.0;
};

// Training bounds: [0, max birth] x [0, max persistence] padded by pad_sigmas
// standard deviations on every side; w_cutoff = max persistence (unpadded).
ImageBounds training_image_bounds(const std::vector<PersistenceDiagram>& train,
                                  double sigma, double pad_sigmas = 3.0);

struct PersistenceImage {
  Eigen::MatrixXd grid;  // rows: persistence axis ascending, cols: birth axis
  ImageBounds bounds;
  double pixel_size = 0.1;
  double sigma = 1.0;
};

// Weight for a point with persistence p: 0 for p <= 0, p / cutoff on
// (0, cutoff), 1 beyond. A non-positive cutoff degenerates to the step
// weight (1 for any p > 0).
double image_point_weight(double persistence, double cutoff);

// Exact pixel integrals of the weighted Gaussian surface: diagram points are
// mapped to (birth, persistence), each contributes weight * Gaussian(sigma),
// and every pixel receives the closed-form integral of the surface over the
// pixel (a separable product of normal CDF differences). Mass falling
// outside the window is lost; the window is fixed by the training bounds.
PersistenceImage persistence_image(const PersistenceDiagram& diag,
                                   double pixel_size, double sigma,
                                   const ImageBounds& bounds);

// Row-major flattening of the pixel grid.
Eigen::VectorXd image_features(const PersistenceImage& img);

// The five polynomial coordinates
//   f1 = sum b(d-b),  f2 = sum (dmax-d)(d-b),  f3 = sum b^2 (d-b)^4,
//   f4 = sum (dmax-d)^2 (d-b)^4,  f5 = max(d-b)
// with dmax the maximum death in this diagram. Empty diagram -> zeros.
Eigen::Matrix<double, 5, 1> carlsson_coordinates(const PersistenceDiagram& diag);

// All 31 nonempty subsets of {1..5}, ordered by size then lexicographically.
std::vector<std::vector<int>> coordinate_subsets();

// Labeled feature rows consumed by the SVM layer.
struct FeatureMatrix {
  Eigen::MatrixXd features;            // one row per example
  Eigen::VectorXi labels;              // 0/1
  std::vector<std::string> column_names;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
};

// CSV with header "label,<column_names...>"; lines starting with '#' are
// treated as comments (used for provenance).
void write_feature_csv(const std::string& path, const FeatureMatrix& fm,
                       const std::string& comment = "");
FeatureMatrix read_feature_csv(const std::string& path);

}  // namespace chatter
