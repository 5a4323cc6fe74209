#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chatter/embedding.hpp"
#include "chatter/errors.hpp"

namespace chatter {

struct EmptyCloud : DataError {
  using DataError::DataError;
};
struct EmptyInput : DataError {
  using DataError::DataError;
};

struct DiagramProvenance {
  std::string chunk_id;
  int tau = 0;
  int dim = 0;
  bool subsampled = false;
};

// Multiset of (birth, death) pairs for one homology dimension. Only
// off-diagonal points are stored (birth < death); classes alive at the end
// of the filtration are recorded by birth value in `essential`.
struct PersistenceDiagram {
  int hom_dim = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> pairs;  // sorted by (birth, death)
  Eigen::VectorXd essential;                       // sorted births
  DiagramProvenance provenance;

  Eigen::Index size() const { return pairs.rows(); }  // |X|, off-diagonal count
  auto births() const { return pairs.col(0); }
  auto deaths() const { return pairs.col(1); }
};

// Symmetric, zero-diagonal. The triangle inequality is not assumed.
using DistanceMatrix = Eigen::MatrixXd;

// Euclidean pairwise distances between cloud rows.
DistanceMatrix distance_matrix(const PointCloud& cloud);

// min over vertices v of max over u of d(v, u). Beyond this radius the Rips
// complex is a cone over the minimizing vertex and H1 is trivial, so
// truncating the filtration there loses nothing in dimension <= 1.
double enclosing_radius(const DistanceMatrix& dist);

// Sentinel for rips_persistence: use the enclosing radius.
inline constexpr double kEnclosingRadius = -1.0;

// Vietoris-Rips persistence in dimensions 0..max_hom_dim (max 1) by column
// reduction of the boundary matrix over Z2. The filtration value of a
// simplex is the max pairwise distance among its vertices; simplices are
// ordered by (value, dimension, lexicographic vertex tuple) and boundary
// columns are generated on demand from the vertex tuples.
std::map<int, PersistenceDiagram> rips_persistence(
    const DistanceMatrix& dist, int max_hom_dim = 1,
    double max_radius = kEnclosingRadius);

// Greedy max-min (farthest point) selection of up to max_points row indices,
// seeded at row `start`; ties broken by lowest index. Returned indices are
// in selection order.
std::vector<int> maxmin_subsample_indices(const PointCloud& cloud,
                                          int max_points, int start = 0);

// Applies the subsample only when the cloud exceeds max_points; sets
// *subsampled accordingly.
PointCloud cap_cloud(const PointCloud& cloud, int max_points,
                     bool* subsampled = nullptr);

// JSON schema: {hom_dim, pairs:[[b,d],...], essential:[b,...],
//               provenance:{chunk_id, tau, dim, subsampled}}
nlohmann::json diagram_to_json(const PersistenceDiagram& d);
PersistenceDiagram diagram_from_json(const nlohmann::json& j);

}  // namespace chatter
