#ifndef VSET_REASONING_HPP
#define VSET_REASONING_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "vset/dictionary.hpp"
#include "vset/json_fwd.hpp"
#include "vset/lasso.hpp"
#include "vset/set_algebra.hpp"

namespace vset {

// An instruction to rewrite premise into conclusion: conclusion - premise.
Eigen::VectorXd implication_vector(const Eigen::VectorXd& premise,
                                   const Eigen::VectorXd& conclusion);

struct Fact {
  std::string id;
  std::vector<std::string> premise;
  std::vector<std::string> conclusion;
  Eigen::VectorXd vector;
};

// A dictionary whose entries are implication vectors. Queries decompose
// over it into chains of facts. Immutable after construction.
class FactBase {
public:
  FactBase(const Dictionary& d, std::vector<Fact> facts);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  int size() const { return static_cast<int>(facts_.size()); }
  const std::vector<Fact>& facts() const { return facts_; }
  const Fact& fact(int i) const { return facts_[static_cast<std::size_t>(i)]; }

  // fact vectors keep their raw magnitudes; only the query is normalized
  Design design() const { return Design{matrix_, norms_, ids_}; }

  static FactBase from_json(const Dictionary& d, const nlohmann::json& j);

private:
  std::vector<Fact> facts_;
  std::vector<std::string> ids_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd norms_;
};

struct ChainResult {
  std::vector<std::pair<std::string, double>> facts;  // fact id, weight
  double residual_norm = 0.0;
  bool exact = false;
  nlohmann::json to_json() const;
};

ChainResult chain_decompose(const FactBase& kb, const Eigen::VectorXd& query,
                            const LassoConfig& cfg = {});

// Decode (base - subtract + add); fall back to a nearest-neighbor scan
// when the decomposition residual is large.
std::vector<std::pair<std::string, double>> analogy(
    const Eigen::VectorXd& base, const Eigen::VectorXd& subtract,
    const Eigen::VectorXd& add, const Dictionary& d, int k,
    const LassoConfig& cfg = {});

struct RelationVector {
  std::string name;
  Eigen::VectorXd vector;  // mean of (target - source) differences
  std::vector<std::pair<std::string, std::string>> pairs;
};

RelationVector relation_vector(
    const std::string& name,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const Dictionary& d);

// Recipe expression over existing tokens and relations:
//   {"op":"token","name":t} {"op":"relation","name":r}
//   {"op":"add"|"avg","args":[...]} {"op":"sub","args":[a,b]}
//   {"op":"scale","factor":f,"arg":e} {"op":"encode","weights":{tok:w,...}}
Eigen::VectorXd eval_recipe(const nlohmann::json& recipe, const Dictionary& d,
                            const std::vector<RelationVector>& relations);

// Evaluates the recipe, normalizes, and returns a new dictionary with the
// result appended; the input dictionary is unchanged.
Dictionary define_term(const std::string& name, const nlohmann::json& recipe,
                       const Dictionary& d,
                       const std::vector<RelationVector>& relations = {});

}  // namespace vset

#endif
