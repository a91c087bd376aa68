#ifndef VSET_SET_ALGEBRA_HPP
#define VSET_SET_ALGEBRA_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "vset/dictionary.hpp"
#include "vset/json_fwd.hpp"
#include "vset/lasso.hpp"

namespace vset {

enum class Interp {
  average,      // positive weights summing to one
  multiset,     // positive integer weights
  set,          // weights exactly one
  fuzzy,        // weights in (0, 1]
  probability,  // positive weights summing to one
  ordered,      // distinct positive integers 1..k
  raw           // any signed reals
};

std::string interp_name(Interp i);
Interp interp_from_name(const std::string& name);

// The logical form of a decoded sum: tokens with weights under a declared
// interpretation. Immutable value type; operations return new maps.
struct WeightMap {
  Interp interp = Interp::raw;
  std::map<std::string, double> entries;

  // throws ValidationError when the entries violate the interpretation
  void validate() const;

  bool operator==(const WeightMap& other) const = default;

  nlohmann::json to_json() const;
  static WeightMap from_json(const nlohmann::json& j);
};

struct SummedVector {
  Eigen::VectorXd data;
  bool normalized = false;
  double scale = 1.0;  // norm removed when normalized
};

enum class CombineMode {
  union_,
  intersect,
  minus,
  fuzzy_union,
  fuzzy_intersect,
  prob_or,
  prob_and
};

CombineMode combine_mode_from_name(const std::string& name);

// Sum of weighted dictionary columns.
SummedVector encode(const Dictionary& d, const WeightMap& m, bool normalize);

// Sparse decomposition followed by interpretation validation/coercion.
// When diagnostics is given it receives the raw decomposition, including
// the exact flag and residual.
WeightMap decode(const Dictionary& d, const Eigen::VectorXd& y, Interp expected,
                 const LassoConfig& cfg = {}, Decomposition* diagnostics = nullptr);
WeightMap decode(const Dictionary& d, const SummedVector& y, Interp expected,
                 const LassoConfig& cfg = {}, Decomposition* diagnostics = nullptr);

WeightMap combine(CombineMode mode, const std::vector<WeightMap>& ms);

// Crisp complement against the dictionary's token universe; symbolic on
// token sets, never materialized as a vector sum.
WeightMap negate(const Dictionary& d, const WeightMap& m);

// Venn scheme: each set encoded at its tag weight; decoded weights place
// tokens in the region whose tag-subset sum they match.
SummedVector venn_encode(const Dictionary& d, const std::vector<WeightMap>& sets,
                         const std::vector<double>& tags);
// region key: sorted 1-based set indices joined with '&', e.g. "1&2&3"
std::map<std::string, std::vector<std::string>> venn_decode(
    const Dictionary& d, const Eigen::VectorXd& y,
    const std::vector<double>& tags, const LassoConfig& cfg = {});

// Word order carried in the weights: position i gets weight i.
SummedVector order_encode(const Dictionary& d,
                          const std::vector<std::string>& sentence);
std::vector<std::string> order_decode(const Dictionary& d,
                                      const Eigen::VectorXd& y,
                                      const LassoConfig& cfg = {});

WeightMap multiset_update(const WeightMap& m, const std::string& token,
                          int delta);

}  // namespace vset

#endif
