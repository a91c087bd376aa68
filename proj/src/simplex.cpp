#include "vset/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "vset/errors.hpp"

namespace vset {

namespace {

constexpr double kFeasTol = 1e-12;
constexpr double kDualTol = 1e-10;

}  // namespace

ClassSimplex ClassSimplex::from_tokens(const Dictionary& d, std::string label,
                                       const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw ValidationError("simplex needs at least one vertex");
  Eigen::MatrixXd v(d.dim(), static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    int j = d.index_of(tokens[i]);
    if (j < 0) throw ValidationError("unknown token: " + tokens[i]);
    v.col(static_cast<Eigen::Index>(i)) = d.column(j);
  }
  return from_matrix(std::move(label), tokens, std::move(v));
}

ClassSimplex ClassSimplex::from_matrix(std::string label,
                                       std::vector<std::string> tokens,
                                       Eigen::MatrixXd vertices) {
  if (vertices.cols() < 1)
    throw ValidationError("simplex needs at least one vertex");
  if (tokens.empty()) {
    tokens.resize(static_cast<std::size_t>(vertices.cols()));
    for (std::size_t i = 0; i < tokens.size(); ++i)
      tokens[i] = "v" + std::to_string(i);
  }
  if (static_cast<Eigen::Index>(tokens.size()) != vertices.cols())
    throw ValidationError("vertex token count does not match matrix");
  ClassSimplex s;
  s.label = std::move(label);
  s.vertex_tokens = std::move(tokens);
  s.centroid = vertices.rowwise().mean();
  s.vertices = std::move(vertices);
  return s;
}

Barycentric barycentric_coordinates(const ClassSimplex& s,
                                    const Eigen::VectorXd& x) {
  if (x.size() != s.dim())
    throw ValidationError("point dimension does not match simplex");
  const int k = s.order();
  Barycentric out;
  if (k == 1) {
    out.weights = Eigen::VectorXd::Ones(1);
    return out;
  }
  // affine parametrization around the last vertex: w = e_k + [u; -sum(u)]
  Eigen::MatrixXd D(s.dim(), k - 1);
  for (int i = 0; i < k - 1; ++i)
    D.col(i) = s.vertices.col(i) - s.vertices.col(k - 1);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(D);
  out.rank_deficient = cod.rank() < std::min<Eigen::Index>(D.rows(), D.cols());
  Eigen::VectorXd u = cod.solve(x - s.vertices.col(k - 1));
  out.weights.resize(k);
  out.weights.head(k - 1) = u;
  out.weights[k - 1] = 1.0 - u.sum();
  return out;
}

namespace {

// Equality-constrained LS on the free set:
// [G_FF 1; 1^T 0] [w; mu] = [b_F; 1]
bool solve_face(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                const std::vector<int>& free, Eigen::VectorXd& w_free,
                double& mu, bool& deficient) {
  const int m = static_cast<int>(free.size());
  Eigen::MatrixXd K(m + 1, m + 1);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) K(a, c) = G(free[a], free[c]);
  K.row(m).setOnes();
  K.col(m).setOnes();
  K(m, m) = 0.0;
  Eigen::VectorXd rhs(m + 1);
  for (int a = 0; a < m; ++a) rhs[a] = b[free[a]];
  rhs[m] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd sol;
  if (lu.isInvertible()) {
    sol = lu.solve(rhs);
  } else {
    // affinely dependent vertices: minimizer is non-unique, report the
    // minimum-norm one and flag it
    deficient = true;
    sol = K.completeOrthogonalDecomposition().solve(rhs);
  }
  w_free = sol.head(m);
  mu = sol[m];
  return true;
}

}  // namespace

Projection project_onto_simplex(const ClassSimplex& s,
                                const Eigen::VectorXd& x) {
  if (x.size() != s.dim())
    throw ValidationError("point dimension does not match simplex");
  const int k = s.order();
  Projection out;
  if (k == 1) {
    out.point = s.vertices.col(0);
    out.weights = Eigen::VectorXd::Ones(1);
    return out;
  }
  Eigen::MatrixXd G = s.vertices.transpose() * s.vertices;
  Eigen::VectorXd b = s.vertices.transpose() * x;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
  int start;
  (G.diagonal() - 2.0 * b).minCoeff(&start);  // nearest vertex
  w[start] = 1.0;
  std::vector<char> in_free(static_cast<std::size_t>(k), 0);
  std::vector<int> free = {start};
  in_free[static_cast<std::size_t>(start)] = 1;

  const int max_iter = 50 * k + 100;
  Eigen::VectorXd w_free;
  double mu = 0.0;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    bool deficient = false;
    solve_face(G, b, free, w_free, mu, deficient);
    out.rank_deficient = out.rank_deficient || deficient;
    double mn = w_free.minCoeff();
    if (mn >= -kFeasTol) {
      for (int a = 0; a < static_cast<int>(free.size()); ++a)
        w[free[static_cast<std::size_t>(a)]] = std::max(0.0, w_free[a]);
      // dual feasibility on the clamped coordinates
      Eigen::VectorXd g = G * w - b;
      int worst = -1;
      double worst_s = -kDualTol;
      for (int j = 0; j < k; ++j) {
        if (in_free[static_cast<std::size_t>(j)]) continue;
        double sj = g[j] + mu;
        if (sj < worst_s) {
          worst_s = sj;
          worst = j;
        }
      }
      if (worst < 0) break;
      free.push_back(worst);
      in_free[static_cast<std::size_t>(worst)] = 1;
    } else {
      // step toward the face solution until the first coordinate hits zero
      double alpha = 1.0;
      for (int a = 0; a < static_cast<int>(free.size()); ++a) {
        int j = free[static_cast<std::size_t>(a)];
        if (w_free[a] < 0.0 && w[j] > 0.0)
          alpha = std::min(alpha, w[j] / (w[j] - w_free[a]));
      }
      for (int a = 0; a < static_cast<int>(free.size()); ++a) {
        int j = free[static_cast<std::size_t>(a)];
        w[j] += alpha * (w_free[a] - w[j]);
      }
      std::vector<int> next;
      for (int j : free) {
        if (w[j] <= kFeasTol) {
          w[j] = 0.0;
          in_free[static_cast<std::size_t>(j)] = 0;
        } else {
          next.push_back(j);
        }
      }
      if (next.empty()) {
        // numerical corner: fall back to the best single vertex
        int j;
        (G.diagonal() - 2.0 * b).minCoeff(&j);
        next.push_back(j);
        in_free[static_cast<std::size_t>(j)] = 1;
        w.setZero();
        w[j] = 1.0;
      }
      free = std::move(next);
    }
  }

  // renormalize away accumulated drift, then certify
  double sum = w.sum();
  if (sum > 0.0) w /= sum;
  Eigen::VectorXd g = G * w - b;
  double mu_hat = 0.0;
  int nfree = 0;
  for (int j = 0; j < k; ++j)
    if (w[j] > 0.0) {
      mu_hat -= g[j];
      ++nfree;
    }
  if (nfree > 0) mu_hat /= nfree;
  double gap = std::abs(w.sum() - 1.0);
  for (int j = 0; j < k; ++j) {
    if (w[j] > 0.0)
      gap = std::max(gap, std::abs(g[j] + mu_hat));
    else
      gap = std::max(gap, std::max(0.0, -(g[j] + mu_hat)));
    gap = std::max(gap, -std::min(0.0, w[j]));
  }
  out.kkt_gap = gap;
  if (out.iterations >= max_iter)
    throw NumericalError("simplex projection hit the iteration limit (KKT gap " +
                         std::to_string(gap) + ")");
  out.weights = std::move(w);
  out.point = s.vertices * out.weights;
  return out;
}

double distance_to_simplex(const ClassSimplex& s, const Eigen::VectorXd& x) {
  return (x - project_onto_simplex(s, x).point).norm();
}

Membership membership_score(const ClassSimplex& s, const Eigen::VectorXd& x) {
  Projection p = project_onto_simplex(s, x);
  Membership out;
  out.dist_simplex = (x - p.point).norm();
  out.dist_centroid = (x - s.centroid).norm();
  out.nearest_face_weights.interp = Interp::raw;
  for (int j = 0; j < s.order(); ++j)
    if (p.weights[j] > 0.0)
      out.nearest_face_weights.entries[s.vertex_tokens[static_cast<std::size_t>(j)]] =
          p.weights[j];
  return out;
}

}  // namespace vset
