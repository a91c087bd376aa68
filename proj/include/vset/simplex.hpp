#ifndef VSET_SIMPLEX_HPP
#define VSET_SIMPLEX_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vset/dictionary.hpp"
#include "vset/set_algebra.hpp"

namespace vset {

// A class as the simplex spanned by its member vectors. Immutable;
// projections are pure and safe to run concurrently.
struct ClassSimplex {
  std::string label;
  std::vector<std::string> vertex_tokens;
  Eigen::MatrixXd vertices;  // n x k
  Eigen::VectorXd centroid;

  static ClassSimplex from_tokens(const Dictionary& d, std::string label,
                                  const std::vector<std::string>& tokens);
  static ClassSimplex from_matrix(std::string label,
                                  std::vector<std::string> tokens,
                                  Eigen::MatrixXd vertices);

  int dim() const { return static_cast<int>(vertices.rows()); }
  int order() const { return static_cast<int>(vertices.cols()); }
};

struct Barycentric {
  Eigen::VectorXd weights;  // affine coordinates, may be negative outside
  bool rank_deficient = false;
};

// Least-squares solution of V w = x subject to sum(w) = 1.
Barycentric barycentric_coordinates(const ClassSimplex& s,
                                    const Eigen::VectorXd& x);

struct Projection {
  Eigen::VectorXd point;
  Eigen::VectorXd weights;  // w >= 0, sum(w) = 1
  double kkt_gap = 0.0;     // max complementarity/stationarity violation
  bool rank_deficient = false;
  int iterations = 0;
};

// min ||V w - x||^2 over the probability simplex, active-set over faces
// with an NNLS-style inner loop.
Projection project_onto_simplex(const ClassSimplex& s, const Eigen::VectorXd& x);

double distance_to_simplex(const ClassSimplex& s, const Eigen::VectorXd& x);

struct Membership {
  double dist_simplex = 0.0;
  double dist_centroid = 0.0;
  WeightMap nearest_face_weights;  // projection weights on their support
};

Membership membership_score(const ClassSimplex& s, const Eigen::VectorXd& x);

}  // namespace vset

#endif
