#include "vset/reasoning.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "vset/errors.hpp"

namespace vset {

Eigen::VectorXd implication_vector(const Eigen::VectorXd& premise,
                                   const Eigen::VectorXd& conclusion) {
  if (premise.size() != conclusion.size())
    throw ValidationError("implication endpoints differ in dimension");
  return conclusion - premise;
}

namespace {

Eigen::VectorXd sum_tokens(const Dictionary& d,
                           const std::vector<std::string>& tokens) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d.dim());
  for (const auto& tok : tokens) {
    int j = d.index_of(tok);
    if (j < 0) throw ValidationError("unknown token: " + tok);
    v += d.column(j);
  }
  return v;
}

}  // namespace

FactBase::FactBase(const Dictionary& d, std::vector<Fact> facts)
    : facts_(std::move(facts)) {
  if (facts_.empty()) throw ValidationError("fact base must not be empty");
  std::unordered_set<std::string> seen;
  matrix_.resize(d.dim(), static_cast<Eigen::Index>(facts_.size()));
  norms_.resize(static_cast<Eigen::Index>(facts_.size()));
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    Fact& f = facts_[i];
    if (!seen.insert(f.id).second)
      throw ValidationError("duplicate fact id: " + f.id);
    if (f.vector.size() == 0)
      f.vector = implication_vector(sum_tokens(d, f.premise),
                                    sum_tokens(d, f.conclusion));
    if (f.vector.size() != d.dim())
      throw ValidationError("fact vector dimension mismatch: " + f.id);
    matrix_.col(static_cast<Eigen::Index>(i)) = f.vector;
    norms_[static_cast<Eigen::Index>(i)] = f.vector.norm();
    if (norms_[static_cast<Eigen::Index>(i)] == 0.0)
      throw ValidationError("fact has zero implication vector: " + f.id);
    ids_.push_back(f.id);
  }
}

FactBase FactBase::from_json(const Dictionary& d, const nlohmann::json& j) {
  std::vector<Fact> facts;
  for (const auto& fj : j) {
    Fact f;
    f.id = fj.at("id").get<std::string>();
    f.premise = fj.at("premise").get<std::vector<std::string>>();
    f.conclusion = fj.at("conclusion").get<std::vector<std::string>>();
    facts.push_back(std::move(f));
  }
  return FactBase(d, std::move(facts));
}

nlohmann::json ChainResult::to_json() const {
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& [id, w] : facts) fs.push_back({{"fact", id}, {"weight", w}});
  return nlohmann::json{
      {"facts", fs}, {"residual", residual_norm}, {"exact", exact}};
}

ChainResult chain_decompose(const FactBase& kb, const Eigen::VectorXd& query,
                            const LassoConfig& cfg) {
  if (query.size() != kb.dim())
    throw ValidationError("query dimension does not match fact base");
  Decomposition dec = decompose(kb.design(), query, cfg);
  ChainResult out;
  out.facts = dec.support;
  out.residual_norm = dec.residual_norm;
  out.exact = dec.exact;
  return out;
}

std::vector<std::pair<std::string, double>> analogy(
    const Eigen::VectorXd& base, const Eigen::VectorXd& subtract,
    const Eigen::VectorXd& add, const Dictionary& d, int k,
    const LassoConfig& cfg) {
  if (base.size() != d.dim() || subtract.size() != d.dim() ||
      add.size() != d.dim())
    throw ValidationError("analogy vectors must match dictionary dimension");
  Eigen::VectorXd q = base - subtract + add;
  Decomposition dec = decompose(d, q, cfg);
  // analogy targets carry an unknown noise component; when the sparse
  // decomposition cannot explain the vector, rank by cosine instead
  double rel_resid =
      dec.normalization_scale > 0.0
          ? dec.residual_norm / dec.normalization_scale
          : 0.0;
  if (!dec.exact && rel_resid > 0.5) return nearest_neighbors(d, q, k);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& entry : dec.support) {
    out.push_back(entry);
    if (static_cast<int>(out.size()) == k) break;
  }
  if (out.empty()) return nearest_neighbors(d, q, k);
  return out;
}

RelationVector relation_vector(
    const std::string& name,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const Dictionary& d) {
  if (pairs.empty())
    throw ValidationError("relation vector needs at least one example pair");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d.dim());
  for (const auto& [source, target] : pairs) {
    int s = d.index_of(source);
    int t = d.index_of(target);
    if (s < 0) throw ValidationError("unknown token: " + source);
    if (t < 0) throw ValidationError("unknown token: " + target);
    acc += d.column(t) - d.column(s);
  }
  return RelationVector{name, acc / static_cast<double>(pairs.size()), pairs};
}

Eigen::VectorXd eval_recipe(const nlohmann::json& recipe, const Dictionary& d,
                            const std::vector<RelationVector>& relations) {
  const std::string op = recipe.at("op").get<std::string>();
  if (op == "token") {
    const std::string name = recipe.at("name").get<std::string>();
    int j = d.index_of(name);
    if (j < 0) throw ValidationError("unknown token: " + name);
    return d.column(j);
  }
  if (op == "relation") {
    const std::string name = recipe.at("name").get<std::string>();
    for (const auto& r : relations)
      if (r.name == name) return r.vector;
    throw ValidationError("unknown relation: " + name);
  }
  if (op == "encode") {
    WeightMap m;
    m.interp = Interp::raw;
    for (const auto& [tok, w] : recipe.at("weights").items())
      m.entries[tok] = w.get<double>();
    return encode(d, m, false).data;
  }
  if (op == "scale") {
    return recipe.at("factor").get<double>() *
           eval_recipe(recipe.at("arg"), d, relations);
  }
  if (op == "add" || op == "avg") {
    const auto& args = recipe.at("args");
    if (args.empty()) throw ValidationError(op + " needs arguments");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d.dim());
    for (const auto& a : args) acc += eval_recipe(a, d, relations);
    if (op == "avg") acc /= static_cast<double>(args.size());
    return acc;
  }
  if (op == "sub") {
    const auto& args = recipe.at("args");
    if (args.size() != 2) throw ValidationError("sub takes exactly two arguments");
    return eval_recipe(args[0], d, relations) -
           eval_recipe(args[1], d, relations);
  }
  throw ValidationError("unknown recipe op: " + op);
}

Dictionary define_term(const std::string& name, const nlohmann::json& recipe,
                       const Dictionary& d,
                       const std::vector<RelationVector>& relations) {
  if (d.contains(name))
    throw ValidationError("token already defined: " + name);
  Eigen::VectorXd v = eval_recipe(recipe, d, relations);
  if (v.norm() == 0.0)
    throw ValidationError("definition evaluates to the zero vector: " + name);
  return d.with_column(name, v);
}

}  // namespace vset
