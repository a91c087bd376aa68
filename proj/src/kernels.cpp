#include "vset/kernels.hpp"

#include <omp.h>

namespace vset::kernels {

void correlations(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
                  Eigen::VectorXd& out) {
  const Eigen::Index N = A.cols();
  out.resize(N);
#pragma omp parallel for schedule(static) if (!omp_in_parallel())
  for (Eigen::Index j = 0; j < N; ++j) {
    out[j] = A.col(j).dot(r);
  }
}

void correlations_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
                         Eigen::VectorXd& out) {
  const Eigen::Index N = A.cols();
  out.resize(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    out[j] = A.col(j).dot(r);
  }
}

void correlations_subset(const Eigen::MatrixXd& A, const std::vector<int>& cols,
                         const Eigen::VectorXd& r, Eigen::VectorXd& out) {
  const Eigen::Index m = static_cast<Eigen::Index>(cols.size());
  out.resize(m);
#pragma omp parallel for schedule(static) if (!omp_in_parallel())
  for (Eigen::Index i = 0; i < m; ++i) {
    out[i] = A.col(cols[i]).dot(r);
  }
}

void correlations_subset_serial(const Eigen::MatrixXd& A,
                                const std::vector<int>& cols,
                                const Eigen::VectorXd& r,
                                Eigen::VectorXd& out) {
  const Eigen::Index m = static_cast<Eigen::Index>(cols.size());
  out.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out[i] = A.col(cols[i]).dot(r);
  }
}

void accumulate_columns(const Eigen::MatrixXd& A, const std::vector<int>& cols,
                        const Eigen::VectorXd& weights, Eigen::VectorXd& y) {
  y.setZero(A.rows());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    y += weights[static_cast<Eigen::Index>(i)] * A.col(cols[i]);
  }
}

}  // namespace vset::kernels
