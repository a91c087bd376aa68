#ifndef VSET_KERNELS_HPP
#define VSET_KERNELS_HPP

#include <Eigen/Dense>
#include <vector>

namespace vset::kernels {

// Column-gather correlations out = A^T r. This is the hot loop of
// screening, KKT checks, and nearest-neighbor scans: one dense pass over
// the dictionary per call. Parallel version splits the column range over
// OpenMP threads; the serial version is the reference kept for testing.
void correlations(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
                  Eigen::VectorXd& out);
void correlations_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
                         Eigen::VectorXd& out);

// Correlations restricted to a subset of columns; out is indexed like cols.
void correlations_subset(const Eigen::MatrixXd& A,
                         const std::vector<int>& cols,
                         const Eigen::VectorXd& r, Eigen::VectorXd& out);
void correlations_subset_serial(const Eigen::MatrixXd& A,
                                const std::vector<int>& cols,
                                const Eigen::VectorXd& r,
                                Eigen::VectorXd& out);

// y = sum_i weights[i] * A.col(cols[i])
void accumulate_columns(const Eigen::MatrixXd& A, const std::vector<int>& cols,
                        const Eigen::VectorXd& weights, Eigen::VectorXd& y);

}  // namespace vset::kernels

#endif
