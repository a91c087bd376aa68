#include "vset/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "vset/errors.hpp"
#include "vset/kernels.hpp"

namespace vset {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double max_abs(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Coordinate descent restricted to a working set. beta and the residual
// r = y - A beta are maintained in place. Updates run over the currently
// active coordinates; a vectorized correlation pass over the working set
// pulls in KKT violators until none remain.
// slack is the acceptable KKT violation: cd_tolerance for certified
// solves, a lambda-relative value for the path sweep inside decompose
// (where beta only ranks candidates and flat directions can stall CD).
// strict solves throw on non-convergence; best-effort ones return the
// current iterate, since a poor candidate ranking surfaces later as an
// honest inexact decomposition rather than a crash.
void cd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& norms2,
              double lambda, const std::vector<int>& workset,
              Eigen::VectorXd& beta, Eigen::VectorXd& r,
              const LassoConfig& cfg, double slack, bool strict, int& sweeps) {
  std::vector<char> in_active(static_cast<std::size_t>(beta.size()), 0);
  std::vector<int> active;
  for (int j : workset) {
    if (beta[j] != 0.0) {
      active.push_back(j);
      in_active[j] = 1;
    }
  }
  Eigen::VectorXd corr;
  auto kkt_violation = [&]() {
    kernels::correlations_subset(A, workset, r, corr);
    double viol = 0.0;
    for (std::size_t i = 0; i < workset.size(); ++i) {
      int j = workset[i];
      double c = corr[static_cast<Eigen::Index>(i)];
      double v = beta[j] != 0.0 ? std::abs(c - std::copysign(lambda, beta[j]))
                                : std::max(0.0, std::abs(c) - lambda);
      if (v > viol) viol = v;
    }
    return viol;
  };
  for (;;) {
    double maxd;
    int since_check = 0;
    double prev_viol = std::numeric_limits<double>::infinity();
    do {
      maxd = 0.0;
      for (int j : active) {
        double z = A.col(j).dot(r) + norms2[j] * beta[j];
        double bnew = soft_threshold(z, lambda) / norms2[j];
        double d = bnew - beta[j];
        if (d != 0.0) {
          r -= d * A.col(j);
          beta[j] = bnew;
          double ad = std::abs(d);
          if (ad > maxd) maxd = ad;
        }
      }
      if (++sweeps > cfg.max_cd_iters) {
        double viol = kkt_violation();
        if (!strict || viol <= 10.0 * slack) return;
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "coordinate descent did not converge in %d sweeps "
                      "(KKT violation %.3e at lambda %.3e)",
                      cfg.max_cd_iters, viol, lambda);
        throw NumericalError(msg);
      }
      // correlated or overcomplete active sets shrink the step size (or
      // cycle along flat directions) long before they violate optimality;
      // check the conditions directly instead of grinding the step down
      if (maxd > cfg.cd_tolerance && ++since_check >= 100) {
        since_check = 0;
        double viol = kkt_violation();
        if (viol <= slack) break;
        // best-effort solves bail once progress stagnates
        if (!strict && viol >= 0.9 * prev_viol) break;
        prev_viol = viol;
      }
    } while (maxd > cfg.cd_tolerance);

    kernels::correlations_subset(A, workset, r, corr);
    bool added = false;
    for (std::size_t i = 0; i < workset.size(); ++i) {
      int j = workset[i];
      if (!in_active[j] &&
          std::abs(corr[static_cast<Eigen::Index>(i)]) > lambda + slack) {
        active.push_back(j);
        in_active[j] = 1;
        added = true;
      }
    }
    if (!added) return;
  }
}

std::vector<double> geometric_grid(double lmax, int size) {
  std::vector<double> g(static_cast<std::size_t>(size));
  double ratio = std::pow(1e-3, 1.0 / (size - 1));
  double v = lmax;
  for (int i = 0; i < size; ++i, v *= ratio) g[static_cast<std::size_t>(i)] = v;
  return g;
}

std::vector<int> screen_from_theta(const Eigen::VectorXd& corr_theta,
                                   const Eigen::VectorXd& norms, double ynorm,
                                   double lambda_from, double lambda_to,
                                   const Eigen::VectorXd& beta_from) {
  double radius = ynorm * (1.0 / lambda_to - 1.0 / lambda_from);
  std::vector<int> survivors;
  for (Eigen::Index j = 0; j < corr_theta.size(); ++j) {
    bool keep = std::abs(corr_theta[j]) + norms[j] * radius >= 1.0 - 1e-12;
    if (keep || beta_from[j] != 0.0) survivors.push_back(static_cast<int>(j));
  }
  return survivors;
}

}  // namespace

void LassoConfig::validate() const {
  if (!lambda_grid.empty()) {
    double prev = std::numeric_limits<double>::infinity();
    for (double l : lambda_grid) {
      if (!(l > 0.0) || !(l < prev))
        throw ValidationError("lambda grid must be strictly descending and positive");
      prev = l;
    }
  }
  if (grid_size < 2) throw ValidationError("grid_size must be >= 2");
  if (!(cd_tolerance > 0.0) || !(solve_residual_tol > 0.0) ||
      !(weight_zero_tol > 0.0))
    throw ValidationError("tolerances must be positive");
  if (max_cd_iters < 1) throw ValidationError("max_cd_iters must be >= 1");
  if (candidate_cap < 0) throw ValidationError("candidate_cap must be >= 1 (or 0 for n)");
}

double Decomposition::weight_of(const std::string& token) const {
  for (const auto& [tok, w] : support)
    if (tok == token) return w;
  return 0.0;
}

nlohmann::json Decomposition::to_json() const {
  nlohmann::json sup = nlohmann::json::array();
  for (const auto& [tok, w] : support)
    sup.push_back({{"token", tok}, {"weight", w}});
  return nlohmann::json{
      {"support", sup},
      {"residual", residual_norm},
      {"exact", exact},
      {"diagnostics",
       {{"candidates_considered", candidates_considered},
        {"lambda_grid", lambda_grid_used},
        {"normalization_scale", normalization_scale},
        {"rank_deficient", rank_deficient}}}};
}

double lasso_lambda_max(const Design& d, const Eigen::VectorXd& y) {
  if (y.size() != d.matrix.rows())
    throw ValidationError("vector dimension does not match design");
  Eigen::VectorXd corr;
  kernels::correlations(d.matrix, y, corr);
  return max_abs(corr);
}

Eigen::VectorXd lasso_at(const Design& d, const Eigen::VectorXd& y,
                         double lambda, const Eigen::VectorXd* warm_start,
                         const LassoConfig& cfg, int* sweeps_used) {
  if (y.size() != d.matrix.rows())
    throw ValidationError("vector dimension does not match design");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  const Eigen::Index N = d.matrix.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(N);
  if (warm_start) {
    if (warm_start->size() != N)
      throw ValidationError("warm start has wrong length");
    beta = *warm_start;
  }
  Eigen::VectorXd r = y;
  std::vector<int> nz;
  for (Eigen::Index j = 0; j < N; ++j)
    if (beta[j] != 0.0) nz.push_back(static_cast<int>(j));
  if (!nz.empty()) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(nz.size()));
    for (std::size_t i = 0; i < nz.size(); ++i)
      w[static_cast<Eigen::Index>(i)] = beta[nz[i]];
    Eigen::VectorXd ab;
    kernels::accumulate_columns(d.matrix, nz, w, ab);
    r -= ab;
  }
  std::vector<int> workset(static_cast<std::size_t>(N));
  for (Eigen::Index j = 0; j < N; ++j) workset[static_cast<std::size_t>(j)] = static_cast<int>(j);
  Eigen::VectorXd norms2 = d.norms.cwiseProduct(d.norms);
  int sweeps = 0;
  cd_solve(d.matrix, norms2, lambda, workset, beta, r, cfg, cfg.cd_tolerance,
           true, sweeps);
  if (sweeps_used) *sweeps_used = sweeps;
  return beta;
}

std::vector<int> dpp_screen(const Design& d, const Eigen::VectorXd& y,
                            double lambda_from,
                            const Eigen::VectorXd& beta_from,
                            double lambda_to) {
  if (!(lambda_to > 0.0) || lambda_to > lambda_from)
    throw ValidationError("screening requires 0 < lambda_to <= lambda_from");
  if (y.size() != d.matrix.rows() || beta_from.size() != d.matrix.cols())
    throw ValidationError("dimension mismatch in dpp_screen");
  Eigen::VectorXd r = y;
  std::vector<int> nz;
  for (Eigen::Index j = 0; j < beta_from.size(); ++j)
    if (beta_from[j] != 0.0) nz.push_back(static_cast<int>(j));
  if (!nz.empty()) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(nz.size()));
    for (std::size_t i = 0; i < nz.size(); ++i)
      w[static_cast<Eigen::Index>(i)] = beta_from[nz[i]];
    Eigen::VectorXd ab;
    kernels::accumulate_columns(d.matrix, nz, w, ab);
    r -= ab;
  }
  Eigen::VectorXd corr_theta;
  kernels::correlations(d.matrix, r, corr_theta);
  corr_theta /= lambda_from;
  return screen_from_theta(corr_theta, d.norms, y.norm(), lambda_from,
                           lambda_to, beta_from);
}

std::pair<Eigen::VectorXd, double> exact_solve_support(
    const Design& d, const Eigen::VectorXd& y,
    const std::vector<int>& candidates, bool* rank_deficient) {
  if (candidates.empty())
    throw ValidationError("exact solve needs a non-empty candidate set");
  if (y.size() != d.matrix.rows())
    throw ValidationError("vector dimension does not match design");
  const Eigen::Index m = static_cast<Eigen::Index>(candidates.size());
  Eigen::MatrixXd sub(d.matrix.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i)
    sub.col(i) = d.matrix.col(candidates[static_cast<std::size_t>(i)]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  bool deficient = qr.rank() < std::min(sub.rows(), sub.cols());
  Eigen::VectorXd w;
  if (deficient) {
    // minimum-norm least squares via rank-revealing complete orthogonal
    // decomposition
    w = sub.completeOrthogonalDecomposition().solve(y);
  } else {
    w = qr.solve(y);
  }
  if (rank_deficient) *rank_deficient = deficient;
  double resid = (sub * w - y).norm();
  return {std::move(w), resid};
}

namespace {

Decomposition finish_decomposition(const Design& d, const Eigen::VectorXd& yn,
                                   double scale,
                                   const std::vector<int>& candidates,
                                   const LassoConfig& cfg, Decomposition dec) {
  dec.candidates_considered = static_cast<int>(candidates.size());
  if (candidates.empty()) {
    dec.residual_norm = yn.norm() * scale;
    dec.exact = yn.norm() <= cfg.solve_residual_tol;
    return dec;
  }
  bool deficient = false;
  auto [w, resid] = exact_solve_support(d, yn, candidates, &deficient);
  dec.rank_deficient = deficient;
  std::vector<int> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(w[a]) > std::abs(w[b]);
  });
  for (int i : order) {
    double wi = w[i];
    if (std::abs(wi) < cfg.weight_zero_tol) continue;
    dec.support.emplace_back(d.labels[static_cast<std::size_t>(candidates[static_cast<std::size_t>(i)])],
                             wi * scale);
  }
  dec.residual_norm = resid * scale;
  dec.exact = resid <= cfg.solve_residual_tol;
  return dec;
}

}  // namespace

Decomposition decompose(const Design& d, const Eigen::VectorXd& y,
                        const LassoConfig& cfg) {
  cfg.validate();
  if (y.size() != d.matrix.rows())
    throw ValidationError("vector dimension does not match design");
  const Eigen::Index n = d.matrix.rows();
  const Eigen::Index N = d.matrix.cols();

  Decomposition dec;
  double scale = y.norm();
  dec.normalization_scale = scale;
  if (scale == 0.0) {
    dec.exact = true;
    return dec;
  }
  Eigen::VectorXd yn = y / scale;

  Eigen::VectorXd corr;
  kernels::correlations(d.matrix, yn, corr);
  double lmax = max_abs(corr);
  if (lmax <= 0.0) {
    dec.residual_norm = scale;
    return dec;
  }
  std::vector<double> grid = cfg.lambda_grid.empty()
                                 ? geometric_grid(lmax, cfg.grid_size)
                                 : cfg.lambda_grid;
  dec.lambda_grid_used = grid;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd r = yn;
  Eigen::VectorXd maxabs = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd norms2 = d.norms.cwiseProduct(d.norms);
  double prev_lambda = lmax;
  // at lambda_max the all-zero solution is exact, so theta = yn / lmax
  Eigen::VectorXd corr_theta = corr / lmax;
  int sweeps = 0;
  for (double lambda : grid) {
    if (lambda >= prev_lambda && beta.isZero(0.0)) {
      // null solution persists above lambda_max; keep screening anchored there
      continue;
    }
    double target = std::min(lambda, prev_lambda);
    std::vector<int> survivors = screen_from_theta(
        corr_theta, d.norms, 1.0, prev_lambda, target, beta);
    sweeps = 0;
    double slack = std::max(10.0 * cfg.cd_tolerance, 1e-2 * target);
    cd_solve(d.matrix, norms2, target, survivors, beta, r, cfg, slack, false,
             sweeps);
    for (int j : survivors) {
      double a = std::abs(beta[j]);
      if (a > maxabs[j]) maxabs[j] = a;
    }
    prev_lambda = target;
    kernels::correlations(d.matrix, r, corr_theta);
    corr_theta /= target;
    // the path solve carries a small KKT slack, so project the dual point
    // back into the feasible set before screening with it
    double feas = max_abs(corr_theta);
    if (feas > 1.0) corr_theta /= feas;
  }

  int cap = cfg.candidate_cap > 0 ? cfg.candidate_cap : static_cast<int>(n);
  std::vector<int> candidates;
  for (Eigen::Index j = 0; j < N; ++j)
    if (maxabs[j] > 0.0) candidates.push_back(static_cast<int>(j));
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return maxabs[a] > maxabs[b];  // ties keep ascending index order
  });
  if (static_cast<int>(candidates.size()) > cap) candidates.resize(cap);
  return finish_decomposition(d, yn, scale, candidates, cfg, std::move(dec));
}

Decomposition decompose(const Dictionary& d, const Eigen::VectorXd& y,
                        const LassoConfig& cfg) {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.size());
  Design dd{d.matrix(), ones, d.tokens()};
  return decompose(dd, y, cfg);
}

Decomposition baseline_nn_decompose(const Dictionary& d,
                                    const Eigen::VectorXd& y, int max_steps,
                                    const LassoConfig& cfg) {
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (y.size() != d.dim())
    throw ValidationError("vector dimension does not match dictionary");
  Decomposition dec;
  double scale = y.norm();
  dec.normalization_scale = scale;
  if (scale == 0.0) {
    dec.exact = true;
    return dec;
  }
  Eigen::VectorXd r = y / scale;
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(d.size());
  double prev_resid = r.norm();
  Eigen::VectorXd corr;
  for (int step = 0; step < max_steps; ++step) {
    kernels::correlations(d.matrix(), r, corr);
    Eigen::Index j;
    corr.maxCoeff(&j);
    double c = corr[j];  // unit-norm column: 1-D least-squares coefficient
    if (c == 0.0) break;
    weights[j] += c;
    r -= c * d.matrix().col(j);
    double resid = r.norm();
    if (prev_resid - resid <= cfg.solve_residual_tol) break;
    prev_resid = resid;
  }
  std::vector<int> order;
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    if (std::abs(weights[j]) >= cfg.weight_zero_tol)
      order.push_back(static_cast<int>(j));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(weights[a]) > std::abs(weights[b]);
  });
  for (int j : order) dec.support.emplace_back(d.token(j), weights[j] * scale);
  dec.candidates_considered = static_cast<int>(order.size());
  dec.residual_norm = r.norm() * scale;
  dec.exact = r.norm() <= cfg.solve_residual_tol;
  return dec;
}

Decomposition baseline_lasso_fixed(const Dictionary& d,
                                   const Eigen::VectorXd& y, double lambda,
                                   const LassoConfig& cfg) {
  if (y.size() != d.dim())
    throw ValidationError("vector dimension does not match dictionary");
  Decomposition dec;
  double scale = y.norm();
  dec.normalization_scale = scale;
  dec.lambda_grid_used = {lambda};
  if (scale == 0.0) {
    dec.exact = true;
    return dec;
  }
  Eigen::VectorXd yn = y / scale;
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.size());
  Design dd{d.matrix(), ones, d.tokens()};
  Eigen::VectorXd beta = lasso_at(dd, yn, lambda, nullptr, cfg);
  std::vector<int> active;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) active.push_back(static_cast<int>(j));
  return finish_decomposition(dd, yn, scale, active, cfg, std::move(dec));
}

}  // namespace vset
