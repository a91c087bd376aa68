#ifndef VSET_LASSO_HPP
#define VSET_LASSO_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vset/dictionary.hpp"
#include "vset/json_fwd.hpp"

namespace vset {

// The decomposition basis: columns, their L2 norms, and labels. Word
// dictionaries have unit norms; fact bases keep their raw magnitudes.
struct Design {
  const Eigen::MatrixXd& matrix;
  const Eigen::VectorXd& norms;
  const std::vector<std::string>& labels;
};

struct LassoConfig {
  // empty => geometric grid, grid_size points from lambda_max down to
  // lambda_max * 1e-3
  std::vector<double> lambda_grid;
  int grid_size = 100;
  double cd_tolerance = 1e-8;   // on max coefficient change
  int max_cd_iters = 10000;     // coordinate sweeps per lambda
  int candidate_cap = 0;        // 0 => n (vector dimensionality)
  double solve_residual_tol = 1e-6;
  double weight_zero_tol = 1e-8;

  void validate() const;
};

struct Decomposition {
  std::vector<std::pair<std::string, double>> support;  // token, signed weight
  double residual_norm = 0.0;
  bool exact = false;
  int candidates_considered = 0;
  std::vector<double> lambda_grid_used;
  double normalization_scale = 1.0;
  bool rank_deficient = false;

  double weight_of(const std::string& token) const;
  nlohmann::json to_json() const;
};

// Largest lambda with a non-trivial LASSO solution: max_j |a_j^T y|.
double lasso_lambda_max(const Design& d, const Eigen::VectorXd& y);

// Coordinate-descent solve of (1/2)||y - A b||^2 + lambda ||b||_1 over the
// full column set. Satisfies the KKT conditions to cd_tolerance on return.
Eigen::VectorXd lasso_at(const Design& d, const Eigen::VectorXd& y,
                         double lambda, const Eigen::VectorXd* warm_start,
                         const LassoConfig& cfg, int* sweeps_used = nullptr);

// Sequential DPP safe rule: the returned set is a superset of the LASSO
// support at lambda_to, given the exact solution beta_from at lambda_from.
std::vector<int> dpp_screen(const Design& d, const Eigen::VectorXd& y,
                            double lambda_from,
                            const Eigen::VectorXd& beta_from, double lambda_to);

// Unrestricted least squares on a candidate column set. Rank-deficient
// systems fall back to the minimum-norm solution and set *rank_deficient.
std::pair<Eigen::VectorXd, double> exact_solve_support(
    const Design& d, const Eigen::VectorXd& y, const std::vector<int>& candidates,
    bool* rank_deficient = nullptr);

// Full pipeline: normalize, sweep the lambda path with warm starts and
// sequential DPP screening, rank the ever-active columns by max |beta|,
// cap at candidate_cap, solve exactly, rescale.
Decomposition decompose(const Design& d, const Eigen::VectorXd& y,
                        const LassoConfig& cfg = {});
Decomposition decompose(const Dictionary& d, const Eigen::VectorXd& y,
                        const LassoConfig& cfg = {});

// Greedy baseline: nearest neighbor of the residual, 1-D fit, subtract.
Decomposition baseline_nn_decompose(const Dictionary& d,
                                    const Eigen::VectorXd& y, int max_steps,
                                    const LassoConfig& cfg = {});

// Single fixed-lambda LASSO, then exact solve on its active set.
Decomposition baseline_lasso_fixed(const Dictionary& d,
                                   const Eigen::VectorXd& y, double lambda,
                                   const LassoConfig& cfg = {});

}  // namespace vset

#endif
