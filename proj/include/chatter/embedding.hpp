#pragma once

#include <Eigen/Dense>

#include "chatter/errors.hpp"

namespace chatter {

// Delay-embedded points, one per row.
using PointCloud = Eigen::MatrixXd;

struct EmbeddingParams {
  int tau = 1;  // delay in samples
  int dim = 2;  // embedding dimension
};

struct NoSignificantFrequency : NumericError {
  using NumericError::NumericError;
};
struct NoMinimumFound : NumericError {
  using NumericError::NumericError;
};
struct TooShort : DataError {
  using DataError::DataError;
};
struct SignalTooShort : DataError {
  using DataError::DataError;
};

// Delay from the FFT spectrum: fit a constant noise floor to the one-sided
// log-magnitude spectrum by least median of squares, call a bin significant
// when it exceeds the floor by `margin_db`, take f_max as the largest
// significant frequency and return tau = max(1, floor(fs / (4 f_max))),
// i.e. an effective resampling at four times f_max. Requires >= 64 samples.
int estimate_delay_fft_lms(const Eigen::VectorXd& samples, double fs_hz,
                           double margin_db = 10.0);

// Alternative delay estimate: smallest tau in [1, max_tau) that is a strict
// local minimum of the binned mutual information I(x_t; x_{t+tau}) with 16
// equal-width bins. Throws NoMinimumFound when the curve has no interior
// minimum over the scanned range.
int estimate_delay_mutual_info(const Eigen::VectorXd& samples, int max_tau,
                               int bins = 16);

struct FnnResult {
  int dim = 1;
  bool saturated = false;  // dim_cap reached without passing the threshold
};

// False-nearest-neighbor embedding dimension: for each d, embed at d and
// d+1, find each point's nearest neighbor at d (brute force, exact), and
// call the pair false when the extra-coordinate separation exceeds r_tol
// times the distance at d. Returns the smallest d whose false-neighbor
// fraction is below pct_threshold; pairs at zero distance are never false.
FnnResult estimate_dim_fnn(const Eigen::VectorXd& samples, int tau,
                           int dim_cap = 10, double r_tol = 10.0,
                           double pct_threshold = 0.1);

// Point i = (x_i, x_{i+tau}, ..., x_{i+(dim-1)tau}); n - (dim-1)*tau rows.
PointCloud delay_embed(const Eigen::VectorXd& samples,
                       const EmbeddingParams& params);

}  // namespace chatter
