#include "chatter/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chatter/parallel.hpp"

namespace chatter {

double scale_space_kernel_counted(const PersistenceDiagram& X,
                                  const PersistenceDiagram& Y, double sigma,
                                  std::size_t* pair_evals) {
  if (!(sigma > 0.0)) throw NonPositiveSigma("scale_space_kernel: sigma must be positive");
  const Eigen::Index nx = X.pairs.rows(), ny = Y.pairs.rows();
  if (pair_evals) *pair_evals = std::size_t(nx) * std::size_t(ny);
  if (nx == 0 || ny == 0) return 0.0;
  const double inv = 1.0 / (8.0 * sigma);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double bx = X.pairs(i, 0), dx = X.pairs(i, 1);
    for (Eigen::Index j = 0; j < ny; ++j) {
      const double by = Y.pairs(j, 0), dy = Y.pairs(j, 1);
      const double d2 = (bx - by) * (bx - by) + (dx - dy) * (dx - dy);
      const double m2 = (bx - dy) * (bx - dy) + (dx - by) * (dx - by);  // mirrored
      sum += std::exp(-d2 * inv) - std::exp(-m2 * inv);
    }
  }
  return sum / (8.0 * 3.14159265358979323846 * sigma);
}

double scale_space_kernel(const PersistenceDiagram& X,
                          const PersistenceDiagram& Y, double sigma) {
  return scale_space_kernel_counted(X, Y, sigma, nullptr);
}

KernelMatrix kernel_matrix(const std::vector<PersistenceDiagram>& rows,
                           const std::vector<PersistenceDiagram>& cols,
                           double sigma, int jobs) {
  if (!(sigma > 0.0)) throw NonPositiveSigma("kernel_matrix: sigma must be positive");
  KernelMatrix km;
  km.sigma = sigma;
  km.values.resize(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
  km.row_ids.reserve(rows.size());
  for (const auto& d : rows) km.row_ids.push_back(d.provenance.chunk_id);
  km.col_ids.reserve(cols.size());
  for (const auto& d : cols) km.col_ids.push_back(d.provenance.chunk_id);
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      km.values(Eigen::Index(i), Eigen::Index(j)) =
          scale_space_kernel(rows[i], cols[j], sigma);
  });
  return km;
}

KernelMatrix kernel_matrix(const std::vector<PersistenceDiagram>& diagrams,
                           double sigma, int jobs) {
  if (!(sigma > 0.0)) throw NonPositiveSigma("kernel_matrix: sigma must be positive");
  KernelMatrix km;
  km.sigma = sigma;
  const auto n = Eigen::Index(diagrams.size());
  km.values.resize(n, n);
  km.row_ids.reserve(diagrams.size());
  for (const auto& d : diagrams) km.row_ids.push_back(d.provenance.chunk_id);
  km.col_ids = km.row_ids;
  // Upper triangle only, mirrored, so the Gram is exactly symmetric.
  parallel_for(std::size_t(n), jobs, [&](std::size_t i) {
    for (std::size_t j = i; j < std::size_t(n); ++j) {
      const double v = scale_space_kernel(diagrams[i], diagrams[j], sigma);
      km.values(Eigen::Index(i), Eigen::Index(j)) = v;
      km.values(Eigen::Index(j), Eigen::Index(i)) = v;
    }
  });
  return km;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_kernel_csv(const std::string& path, const KernelMatrix& km,
                      const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "sigma=" << format_double(km.sigma);
  for (const auto& id : km.col_ids) out << "," << id;
  out << "\n";
  for (Eigen::Index r = 0; r < km.values.rows(); ++r) {
    out << km.row_ids[std::size_t(r)];
    for (Eigen::Index c = 0; c < km.values.cols(); ++c)
      out << "," << format_double(km.values(r, c));
    out << "\n";
  }
}

KernelMatrix read_kernel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  KernelMatrix km;
  std::string line;
  bool header_done = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!header_done) {
      bool first = true;
      while (std::getline(ss, cell, ',')) {
        if (first) {
          const auto eq = cell.find('=');
          km.sigma = (eq == std::string::npos) ? 0.0 : std::stod(cell.substr(eq + 1));
          first = false;
        } else {
          km.col_ids.push_back(cell);
        }
      }
      header_done = true;
      continue;
    }
    bool first = true;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        km.row_ids.push_back(cell);
        first = false;
      } else {
        row.push_back(std::stod(cell));
      }
    }
    rows.push_back(std::move(row));
  }
  km.values.resize(Eigen::Index(rows.size()), Eigen::Index(km.col_ids.size()));
  for (Eigen::Index r = 0; r < km.values.rows(); ++r)
    for (Eigen::Index c = 0; c < km.values.cols(); ++c)
      km.values(r, c) = rows[std::size_t(r)][std::size_t(c)];
  return km;
}

}  // namespace chatter
