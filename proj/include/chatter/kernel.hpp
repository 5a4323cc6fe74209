#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "chatter/errors.hpp"
#include "chatter/persistence.hpp"

namespace chatter {

struct NonPositiveSigma : ConfigError {
  using ConfigError::ConfigError;
};

// Persistence scale-space kernel between two diagrams,
//   k(X, Y) = 1/(8 pi sigma) * sum over z1 in X, z2 in Y of
//             exp(-|z1 - z2|^2 / (8 sigma)) - exp(-|z1 - zbar2|^2 / (8 sigma))
// where zbar = (y, x) is the mirror across the diagonal. Only finite pairs
// enter the sum; an empty diagram on either side gives 0. Cost is one
// exponential pair per (z1, z2), i.e. O(|X| |Y|).
double scale_space_kernel(const PersistenceDiagram& X,
                          const PersistenceDiagram& Y, double sigma);

// Same, reporting the number of point pairs evaluated (for complexity
// checks and instrumentation).
double scale_space_kernel_counted(const PersistenceDiagram& X,
                                  const PersistenceDiagram& Y, double sigma,
                                  std::size_t* pair_evals);

struct KernelMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_ids, col_ids;
  double sigma = 0.0;
};

// Entry (i, j) = scale_space_kernel(rows[i], cols[j], sigma). When both
// sides are the same sequence the matrix is filled from the upper triangle
// and mirrored, so it is symmetric to the last bit.
KernelMatrix kernel_matrix(const std::vector<PersistenceDiagram>& rows,
                           const std::vector<PersistenceDiagram>& cols,
                           double sigma, int jobs = 1);

// Square symmetric Gram over one diagram list.
KernelMatrix kernel_matrix(const std::vector<PersistenceDiagram>& diagrams,
                           double sigma, int jobs = 1);

// Gram cache: CSV whose first row/column carry the diagram ids.
void write_kernel_csv(const std::string& path, const KernelMatrix& km,
                      const std::string& comment = "");
KernelMatrix read_kernel_csv(const std::string& path);

}  // namespace chatter
