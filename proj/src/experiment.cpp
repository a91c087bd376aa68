#include "vset/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_map>

#include "vset/errors.hpp"
#include "vset/rng.hpp"

namespace vset {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::recovery_curve: return "recovery_curve";
    case ExperimentKind::clustered_curve: return "clustered_curve";
    case ExperimentKind::noise_sweep: return "noise_sweep";
    case ExperimentKind::baseline_table: return "baseline_table";
    case ExperimentKind::phase_probe: return "phase_probe";
  }
  return "recovery_curve";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::recovery_curve, ExperimentKind::clustered_curve,
        ExperimentKind::noise_sweep, ExperimentKind::baseline_table,
        ExperimentKind::phase_probe})
    if (experiment_kind_name(k) == name) return k;
  throw ValidationError("unknown experiment kind: " + name);
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (ks.empty()) throw ValidationError("k range must be non-empty");
  if (dims.empty() || sizes.empty())
    throw ValidationError("dims and sizes must be non-empty");
  for (int k : ks) {
    if (k < 1) throw ValidationError("k must be >= 1");
    for (int n : dims)
      if (k > n)
        throw ValidationError("k exceeds dimension " + std::to_string(n));
    for (int N : sizes)
      if (k >= N)
        throw ValidationError("k exceeds dictionary size " + std::to_string(N));
  }
  if (kind == ExperimentKind::noise_sweep && sigmas.empty())
    throw ValidationError("noise sweep needs a sigma list");
  lasso.validate();
}

nlohmann::json ExperimentSpec::to_json() const {
  return nlohmann::json{
      {"kind", experiment_kind_name(kind)},
      {"dictionary",
       {{"kind", dict.kind},
        {"path", dict.path},
        {"clusters", dict.clusters},
        {"spread", dict.spread},
        {"meta", dict.meta}}},
      {"dims", dims},
      {"sizes", sizes},
      {"ks", ks},
      {"trials", trials},
      {"seed", seed},
      {"sigmas", sigmas},
      {"equal_weights", equal_weights},
      {"support_only", support_only},
      {"weight_tol", weight_tol},
      {"lambda_fixed", lambda_fixed},
      {"nn_max_steps", nn_max_steps},
      {"lasso",
       {{"grid_size", lasso.grid_size},
        {"cd_tolerance", lasso.cd_tolerance},
        {"max_cd_iters", lasso.max_cd_iters},
        {"candidate_cap", lasso.candidate_cap},
        {"solve_residual_tol", lasso.solve_residual_tol},
        {"weight_zero_tol", lasso.weight_zero_tol}}}};
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  s.kind = experiment_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("dictionary")) {
    const auto& dj = j.at("dictionary");
    s.dict.kind = dj.value("kind", std::string("synthetic-gaussian"));
    s.dict.path = dj.value("path", std::string());
    s.dict.clusters = dj.value("clusters", 0);
    s.dict.spread = dj.value("spread", 0.4);
    s.dict.meta = dj.value("meta", std::string());
  }
  s.dims = j.at("dims").get<std::vector<int>>();
  s.sizes = j.at("sizes").get<std::vector<int>>();
  s.ks = j.at("ks").get<std::vector<int>>();
  s.trials = j.value("trials", 20);
  s.seed = j.value("seed", std::uint64_t{0});
  s.sigmas = j.value("sigmas", std::vector<double>{});
  s.equal_weights = j.value("equal_weights", false);
  s.support_only = j.value("support_only", false);
  s.weight_tol = j.value("weight_tol", 1e-6);
  s.lambda_fixed = j.value("lambda_fixed", 0.02);
  s.nn_max_steps = j.value("nn_max_steps", 50);
  if (j.contains("lasso")) {
    const auto& lj = j.at("lasso");
    s.lasso.grid_size = lj.value("grid_size", 100);
    s.lasso.cd_tolerance = lj.value("cd_tolerance", 1e-8);
    s.lasso.max_cd_iters = lj.value("max_cd_iters", 10000);
    s.lasso.candidate_cap = lj.value("candidate_cap", 0);
    s.lasso.solve_residual_tol = lj.value("solve_residual_tol", 1e-6);
    s.lasso.weight_zero_tol = lj.value("weight_zero_tol", 1e-8);
  }
  s.validate();
  return s;
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials < 1) throw ValidationError("wilson interval needs trials >= 1");
  if (successes < 0 || successes > trials)
    throw ValidationError("successes must lie in [0, trials]");
  const double z = 1.959963984540054;
  double n = trials;
  double p = successes / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

struct TrialOutcome {
  bool success = false;
  double weight_err = 0.0;
  double seconds = 0.0;
};

struct PlantedSum {
  std::vector<std::size_t> members;
  Eigen::VectorXd weights;  // aligned with members
  Eigen::VectorXd y;
};

PlantedSum plant_random(const Dictionary& dict, int k, bool equal, Rng& rng) {
  PlantedSum p;
  p.members = rng.sample_without_replacement(static_cast<std::size_t>(dict.size()),
                                             static_cast<std::size_t>(k));
  p.weights.resize(k);
  for (int i = 0; i < k; ++i)
    p.weights[i] = equal ? 1.0 / k : rng.uniform(0.5, 1.5);
  p.y = Eigen::VectorXd::Zero(dict.dim());
  for (int i = 0; i < k; ++i)
    p.y += p.weights[i] * dict.column(static_cast<int>(p.members[static_cast<std::size_t>(i)]));
  return p;
}

// paper-style clustered draw: one seed word, then a random half of its
// 2k nearest neighbors
PlantedSum plant_clustered(const Dictionary& dict, int k, bool equal, Rng& rng) {
  if (2 * k + 1 > dict.size())
    throw ValidationError("k exceeds available neighbors for clustered draw");
  std::size_t anchor = rng.index(static_cast<std::size_t>(dict.size()));
  auto nn = nearest_neighbors(dict, dict.column(static_cast<int>(anchor)),
                              2 * k + 1);
  std::vector<std::size_t> pool;
  for (const auto& [tok, cos] : nn) {
    auto j = static_cast<std::size_t>(dict.index_of(tok));
    if (j != anchor) pool.push_back(j);
  }
  pool.resize(static_cast<std::size_t>(2 * k));
  auto picks = rng.sample_without_replacement(pool.size(),
                                              static_cast<std::size_t>(k));
  PlantedSum p;
  for (std::size_t i : picks) p.members.push_back(pool[i]);
  p.weights.resize(k);
  for (int i = 0; i < k; ++i)
    p.weights[i] = equal ? 1.0 / k : rng.uniform(0.5, 1.5);
  p.y = Eigen::VectorXd::Zero(dict.dim());
  for (int i = 0; i < k; ++i)
    p.y += p.weights[i] * dict.column(static_cast<int>(p.members[static_cast<std::size_t>(i)]));
  return p;
}

TrialOutcome score_trial(const Dictionary& dict, const PlantedSum& planted,
                         const Decomposition& dec, const ExperimentSpec& spec,
                         double scale) {
  TrialOutcome out;
  const int k = static_cast<int>(planted.members.size());
  std::unordered_map<std::string, double> truth;
  for (int i = 0; i < k; ++i)
    truth[dict.token(static_cast<int>(planted.members[static_cast<std::size_t>(i)]))] =
        planted.weights[i] * scale;

  double err = 0.0;
  std::size_t matched = 0;
  for (const auto& [tok, w] : dec.support) {
    auto it = truth.find(tok);
    if (it == truth.end()) {
      err = std::max(err, std::abs(w));
    } else {
      err = std::max(err, std::abs(w - it->second));
      ++matched;
    }
  }
  for (const auto& [tok, w] : truth)
    if (dec.weight_of(tok) == 0.0) err = std::max(err, std::abs(w));
  out.weight_err = err;

  if (spec.support_only) {
    // planted tokens must be exactly the k largest recovered weights
    if (static_cast<int>(dec.support.size()) >= k) {
      bool ok = true;
      for (int i = 0; i < k && ok; ++i)
        ok = truth.count(dec.support[static_cast<std::size_t>(i)].first) > 0;
      out.success = ok;
    }
  } else {
    out.success = dec.exact && matched == truth.size() &&
                  dec.support.size() == truth.size() &&
                  err <= spec.weight_tol;
  }
  return out;
}

TrialOutcome run_trial(const Dictionary& dict, int k, double sigma,
                       const std::string& method, const ExperimentSpec& spec,
                       std::uint64_t trial_seed, bool clustered) {
  Rng rng(trial_seed);
  PlantedSum planted = clustered ? plant_clustered(dict, k, spec.equal_weights, rng)
                                 : plant_random(dict, k, spec.equal_weights, rng);
  Eigen::VectorXd y = planted.y;
  double scale = 1.0;
  if (sigma > 0.0) {
    double nrm = y.norm();
    y /= nrm;
    scale = 1.0 / nrm;  // planted weights shrink with the normalization
    Eigen::VectorXd noise(dict.dim());
    for (int i = 0; i < dict.dim(); ++i) noise[i] = rng.normal();
    y += sigma * noise / noise.norm();
  }
  auto t0 = Clock::now();
  Decomposition dec;
  if (method == "nn") {
    dec = baseline_nn_decompose(dict, y, spec.nn_max_steps, spec.lasso);
  } else if (method == "lasso_fixed") {
    dec = baseline_lasso_fixed(dict, y, spec.lambda_fixed, spec.lasso);
  } else {
    dec = decompose(dict, y, spec.lasso);
  }
  TrialOutcome out = score_trial(dict, planted, dec, spec, scale);
  out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

CellResult run_cell(const Dictionary& dict, const ExperimentSpec& spec,
                    const std::string& method, int n, int N, int k,
                    double sigma, std::uint64_t cell_index, bool clustered) {
  CellResult cell;
  cell.method = method;
  cell.n = n;
  cell.N = N;
  cell.k = k;
  cell.sigma = sigma;
  cell.trials = spec.trials;
  double err_sum = 0.0;
  double sec_sum = 0.0;
  int successes = 0;
  // exceptions may not cross the omp region; carry the first one out by hand
  std::string failure;
  bool numerical = false;
#pragma omp parallel for schedule(dynamic) reduction(+ : successes, err_sum, sec_sum)
  for (int t = 0; t < spec.trials; ++t) {
    try {
      TrialOutcome o = run_trial(dict, k, sigma, method, spec,
                                 mix64(spec.seed, cell_index, static_cast<std::uint64_t>(t)),
                                 clustered);
      successes += o.success ? 1 : 0;
      err_sum += o.weight_err;
      sec_sum += o.seconds;
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty()) {
        failure = e.what();
        numerical = dynamic_cast<const NumericalError*>(&e) != nullptr;
      }
    }
  }
  if (!failure.empty()) {
    if (numerical) throw NumericalError(failure);
    throw ValidationError(failure);
  }
  cell.successes = successes;
  cell.success_rate = static_cast<double>(successes) / spec.trials;
  auto [lo, hi] = wilson_interval(successes, spec.trials);
  cell.wilson_lo = lo;
  cell.wilson_hi = hi;
  cell.mean_weight_err = err_sum / spec.trials;
  cell.mean_seconds = sec_sum / spec.trials;
  return cell;
}

Dictionary build_cell_dictionary(const ExperimentSpec& spec, int n, int N) {
  DictionarySpec ds = spec.dict;
  if (ds.kind == "file-backed") return ds.build();
  ds.n = n;
  ds.N = N;
  ds.seed = mix64(spec.seed, static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(N));
  return ds.build();
}

}  // namespace

int ExperimentReport::max_recoverable_k(const std::string& method, int n, int N,
                                        double min_rate, double sigma) const {
  int best = 0;
  for (const auto& c : cells)
    if (c.method == method && c.n == n && c.N == N && c.sigma == sigma &&
        c.success_rate >= min_rate)
      best = std::max(best, c.k);
  return best;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json cj = nlohmann::json::array();
  for (const auto& c : cells) {
    cj.push_back({{"method", c.method},
                  {"n", c.n},
                  {"N", c.N},
                  {"k", c.k},
                  {"sigma", c.sigma},
                  {"trials", c.trials},
                  {"successes", c.successes},
                  {"success_rate", c.success_rate},
                  {"wilson_lo", c.wilson_lo},
                  {"wilson_hi", c.wilson_hi},
                  {"mean_weight_err", c.mean_weight_err},
                  {"mean_seconds", c.mean_seconds}});
  }
  return nlohmann::json{{"spec", spec.to_json()}, {"cells", cj}};
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentReport report;
  report.spec = spec;
  std::uint64_t cell_index = 0;
  for (int n : spec.dims) {
    for (int N : spec.sizes) {
      Dictionary dict = build_cell_dictionary(spec, n, N);
      for (int k : spec.ks) {
        switch (spec.kind) {
          case ExperimentKind::recovery_curve:
          case ExperimentKind::phase_probe:
            report.cells.push_back(run_cell(dict, spec, "screened", n, N, k,
                                            0.0, cell_index++, false));
            break;
          case ExperimentKind::clustered_curve:
            report.cells.push_back(run_cell(dict, spec, "random", n, N, k, 0.0,
                                            cell_index++, false));
            report.cells.push_back(run_cell(dict, spec, "clustered", n, N, k,
                                            0.0, cell_index++, true));
            break;
          case ExperimentKind::noise_sweep:
            for (double sigma : spec.sigmas)
              report.cells.push_back(run_cell(dict, spec, "screened", n, N, k,
                                              sigma, cell_index++, false));
            break;
          case ExperimentKind::baseline_table:
            for (const char* method : {"nn", "lasso_fixed", "screened"})
              report.cells.push_back(run_cell(dict, spec, method, n, N, k, 0.0,
                                              cell_index++, false));
            break;
        }
      }
    }
  }
  return report;
}

std::string render_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "kind,method,n,N,k,sigma,trials,successes,success_rate,wilson_lo,"
         "wilson_hi,mean_weight_err\n";
  for (const auto& c : r.cells) {
    out << experiment_kind_name(r.spec.kind) << ',' << c.method << ',' << c.n
        << ',' << c.N << ',' << c.k << ',' << fmt(c.sigma) << ',' << c.trials
        << ',' << c.successes << ',' << fmt(c.success_rate) << ','
        << fmt(c.wilson_lo) << ',' << fmt(c.wilson_hi) << ','
        << fmt(c.mean_weight_err) << '\n';
  }
  return out.str();
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_svg(const ExperimentReport& r) {
  // success rate vs k, one polyline per (method, n, N, sigma) series
  std::map<std::string, std::vector<std::pair<int, double>>> series;
  int kmin = INT_MAX, kmax = INT_MIN;
  for (const auto& c : r.cells) {
    std::string key = c.method + " n=" + std::to_string(c.n) +
                      " N=" + std::to_string(c.N);
    if (c.sigma != 0.0) key += " sigma=" + fmt(c.sigma);
    series[key].emplace_back(c.k, c.success_rate);
    kmin = std::min(kmin, c.k);
    kmax = std::max(kmax, c.k);
  }
  if (kmax <= kmin) kmax = kmin + 1;
  const double W = 640, H = 480, ml = 60, mr = 160, mt = 30, mb = 50;
  auto xs = [&](double k) {
    return ml + (k - kmin) / double(kmax - kmin) * (W - ml - mr);
  };
  auto ys = [&](double rate) { return H - mb - rate * (H - mt - mb); };
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">members summed (k)</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
      << (mt + H - mb) / 2 << ")\">success rate</text>\n";
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    out << "<text x=\"" << ml - 8 << "\" y=\"" << ys(tick) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(tick)
        << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << ys(tick) << "\" x2=\""
        << W - mr << "\" y2=\"" << ys(tick)
        << "\" stroke=\"#dddddd\"/>\n";
  }
  for (int tick : {kmin, (kmin + kmax) / 2, kmax}) {
    out << "<text x=\"" << xs(tick) << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick
        << "</text>\n";
  }
  int color = 0;
  double legend_y = mt + 10;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* stroke = kPalette[color % 8];
    out << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& [k, rate] : pts) out << xs(k) << ',' << ys(rate) << ' ';
    out << "\"/>\n";
    out << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << legend_y
        << "\" x2=\"" << W - mr + 30 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - mr + 35 << "\" y=\"" << legend_y + 4
        << "\" font-size=\"11\">" << key << "</text>\n";
    legend_y += 18;
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

void emit_report(const ExperimentReport& r, const std::string& format,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open report output: " + path);
  if (format == "csv") {
    out << render_csv(r);
  } else if (format == "svg") {
    out << render_svg(r);
  } else if (format == "json") {
    out << r.to_json().dump(2) << '\n';
  } else {
    throw ValidationError("unknown report format: " + format);
  }
  if (!out) throw ValidationError("report write failed: " + path);
}

}  // namespace vset
