#ifndef VSET_EXPERIMENT_HPP
#define VSET_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vset/dictionary.hpp"
#include "vset/json_fwd.hpp"
#include "vset/lasso.hpp"

namespace vset {

enum class ExperimentKind {
  recovery_curve,
  clustered_curve,
  noise_sweep,
  baseline_table,
  phase_probe
};

std::string experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::recovery_curve;
  DictionarySpec dict;          // template; n, N, seed set per cell
  std::vector<int> dims;        // n values
  std::vector<int> sizes;       // N values
  std::vector<int> ks;          // planted support sizes
  int trials = 20;
  std::uint64_t seed = 0;
  std::vector<double> sigmas;   // noise_sweep only
  bool equal_weights = false;   // else U[0.5, 1.5]
  // success: exact support and weights to weight_tol; support_only relaxes
  // to "planted tokens are the top-k recovered weights" (noise regime)
  bool support_only = false;
  double weight_tol = 1e-6;
  double lambda_fixed = 0.02;   // baseline_table
  int nn_max_steps = 50;        // baseline_table
  LassoConfig lasso;

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

struct CellResult {
  std::string method;  // screened | nn | lasso_fixed | clustered | random
  int n = 0;
  int N = 0;
  int k = 0;
  double sigma = 0.0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  double mean_weight_err = 0.0;
  double mean_seconds = 0.0;  // excluded from CSV so reruns are bit-identical
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<CellResult> cells;

  // largest tested k whose success rate meets min_rate; 0 when none does
  int max_recoverable_k(const std::string& method, int n, int N,
                        double min_rate, double sigma = 0.0) const;

  nlohmann::json to_json() const;
};

// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(int successes, int trials);

// Pure function of the spec (including seed); trials use streams derived
// from (seed, cell index, trial index).
ExperimentReport run_experiment(const ExperimentSpec& spec);

std::string render_csv(const ExperimentReport& r);
std::string render_svg(const ExperimentReport& r);
void emit_report(const ExperimentReport& r, const std::string& format,
                 const std::string& path);

}  // namespace vset

#endif
