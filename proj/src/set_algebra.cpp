#include "vset/set_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "vset/errors.hpp"

namespace vset {

namespace {

constexpr double kSumTol = 1e-9;
constexpr double kRoundTol = 1e-4;  // integer rounding headroom for decode

bool is_integer(double w, double tol) {
  return std::abs(w - std::round(w)) <= tol;
}

}  // namespace

std::string interp_name(Interp i) {
  switch (i) {
    case Interp::average: return "average";
    case Interp::multiset: return "multiset";
    case Interp::set: return "set";
    case Interp::fuzzy: return "fuzzy";
    case Interp::probability: return "probability";
    case Interp::ordered: return "ordered";
    case Interp::raw: return "raw";
  }
  return "raw";
}

Interp interp_from_name(const std::string& name) {
  for (Interp i : {Interp::average, Interp::multiset, Interp::set, Interp::fuzzy,
                   Interp::probability, Interp::ordered, Interp::raw})
    if (interp_name(i) == name) return i;
  throw ValidationError("unknown interpretation: " + name);
}

CombineMode combine_mode_from_name(const std::string& name) {
  if (name == "union") return CombineMode::union_;
  if (name == "intersect") return CombineMode::intersect;
  if (name == "minus") return CombineMode::minus;
  if (name == "fuzzy_union") return CombineMode::fuzzy_union;
  if (name == "fuzzy_intersect") return CombineMode::fuzzy_intersect;
  if (name == "prob_or") return CombineMode::prob_or;
  if (name == "prob_and") return CombineMode::prob_and;
  throw ValidationError("unknown combine mode: " + name);
}

void WeightMap::validate() const {
  double sum = 0.0;
  std::set<long long> positions;
  for (const auto& [tok, w] : entries) {
    if (!std::isfinite(w))
      throw ValidationError("non-finite weight for token " + tok);
    sum += w;
    switch (interp) {
      case Interp::average:
      case Interp::probability:
        if (w <= 0.0)
          throw ValidationError(interp_name(interp) +
                                " weights must be positive: " + tok);
        break;
      case Interp::multiset:
        if (w < 1.0 || !is_integer(w, 0.0))
          throw ValidationError("multiset weights must be positive integers: " +
                                tok);
        break;
      case Interp::set:
        if (w != 1.0)
          throw ValidationError("set weights must be exactly 1: " + tok);
        break;
      case Interp::fuzzy:
        if (w <= 0.0 || w > 1.0)
          throw ValidationError("fuzzy weights must lie in (0, 1]: " + tok);
        break;
      case Interp::ordered: {
        if (w < 1.0 || !is_integer(w, 0.0))
          throw ValidationError("ordered weights must be positive integers: " +
                                tok);
        if (!positions.insert(static_cast<long long>(std::llround(w))).second)
          throw ValidationError("ordered weights must be distinct: " + tok);
        break;
      }
      case Interp::raw:
        break;
    }
  }
  if ((interp == Interp::average || interp == Interp::probability) &&
      !entries.empty() && std::abs(sum - 1.0) > kSumTol)
    throw ValidationError(interp_name(interp) + " weights must sum to 1, got " +
                          std::to_string(sum));
  if (interp == Interp::ordered) {
    long long k = static_cast<long long>(entries.size());
    for (long long p = 1; p <= k; ++p)
      if (!positions.count(p))
        throw ValidationError("ordered weights must cover positions 1..k");
  }
}

nlohmann::json WeightMap::to_json() const {
  nlohmann::json e = nlohmann::json::object();
  for (const auto& [tok, w] : entries) e[tok] = w;
  return nlohmann::json{{"interpretation", interp_name(interp)}, {"entries", e}};
}

WeightMap WeightMap::from_json(const nlohmann::json& j) {
  WeightMap m;
  m.interp = interp_from_name(j.at("interpretation").get<std::string>());
  for (const auto& [tok, w] : j.at("entries").items())
    m.entries[tok] = w.get<double>();
  m.validate();
  return m;
}

SummedVector encode(const Dictionary& d, const WeightMap& m, bool normalize) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d.dim());
  for (const auto& [tok, w] : m.entries) {
    int j = d.index_of(tok);
    if (j < 0) throw ValidationError("unknown token: " + tok);
    v += w * d.column(j);
  }
  SummedVector out{std::move(v), false, 1.0};
  if (normalize) {
    double nrm = out.data.norm();
    if (nrm == 0.0)
      throw ValidationError("cannot normalize a zero summed vector");
    out.data /= nrm;
    out.scale = nrm;
    out.normalized = true;
  }
  return out;
}

namespace {

WeightMap coerce(const Decomposition& dec, Interp expected) {
  WeightMap m;
  m.interp = expected;
  double sum = 0.0;
  for (const auto& [tok, w] : dec.support) {
    double out = w;
    switch (expected) {
      case Interp::raw:
        break;
      case Interp::set:
        if (std::abs(w - 1.0) > kRoundTol)
          throw ValidationError("decoded weight " + std::to_string(w) +
                                " for token " + tok + " is not a set weight");
        out = 1.0;
        break;
      case Interp::multiset:
      case Interp::ordered: {
        double r = std::round(w);
        if (std::abs(w - r) > kRoundTol || r < 1.0)
          throw ValidationError("decoded weight " + std::to_string(w) +
                                " for token " + tok +
                                " is not a positive integer");
        out = r;
        break;
      }
      case Interp::fuzzy:
        if (w <= 0.0 || w > 1.0 + kRoundTol)
          throw ValidationError("decoded weight " + std::to_string(w) +
                                " for token " + tok + " is not in (0, 1]");
        out = std::min(w, 1.0);
        break;
      case Interp::average:
      case Interp::probability:
        if (w <= 0.0)
          throw ValidationError("decoded weight " + std::to_string(w) +
                                " for token " + tok + " is negative");
        break;
    }
    m.entries[tok] = out;
    sum += out;
  }
  if ((expected == Interp::average || expected == Interp::probability) &&
      !m.entries.empty()) {
    if (std::abs(sum - 1.0) > kRoundTol)
      throw ValidationError("decoded weights sum to " + std::to_string(sum) +
                            ", expected 1");
    for (auto& [tok, w] : m.entries) w /= sum;
  }
  m.validate();
  return m;
}

}  // namespace

WeightMap decode(const Dictionary& d, const Eigen::VectorXd& y, Interp expected,
                 const LassoConfig& cfg, Decomposition* diagnostics) {
  Decomposition dec = decompose(d, y, cfg);
  WeightMap m = coerce(dec, expected);
  if (diagnostics) *diagnostics = std::move(dec);
  return m;
}

WeightMap decode(const Dictionary& d, const SummedVector& y, Interp expected,
                 const LassoConfig& cfg, Decomposition* diagnostics) {
  if (!y.normalized) return decode(d, y.data, expected, cfg, diagnostics);
  return decode(d, Eigen::VectorXd(y.data * y.scale), expected, cfg,
                diagnostics);
}

namespace {

void require_interp(const WeightMap& m, std::initializer_list<Interp> allowed,
                    const char* mode) {
  for (Interp i : allowed)
    if (m.interp == i) return;
  throw ValidationError(std::string("interpretation ") + interp_name(m.interp) +
                        " is incompatible with " + mode);
}

}  // namespace

WeightMap combine(CombineMode mode, const std::vector<WeightMap>& ms) {
  if (ms.empty()) throw ValidationError("combine needs at least one input");
  WeightMap out;
  switch (mode) {
    case CombineMode::union_:
    case CombineMode::intersect:
    case CombineMode::minus: {
      for (const auto& m : ms) require_interp(m, {Interp::set}, "crisp modes");
      out.interp = Interp::set;
      if (mode == CombineMode::union_) {
        for (const auto& m : ms)
          for (const auto& [tok, w] : m.entries) out.entries[tok] = 1.0;
      } else if (mode == CombineMode::intersect) {
        for (const auto& [tok, w] : ms.front().entries) {
          bool in_all = true;
          for (std::size_t i = 1; i < ms.size() && in_all; ++i)
            in_all = ms[i].entries.count(tok) > 0;
          if (in_all) out.entries[tok] = 1.0;
        }
      } else {
        for (const auto& [tok, w] : ms.front().entries) {
          bool in_rest = false;
          for (std::size_t i = 1; i < ms.size() && !in_rest; ++i)
            in_rest = ms[i].entries.count(tok) > 0;
          if (!in_rest) out.entries[tok] = 1.0;
        }
      }
      break;
    }
    case CombineMode::fuzzy_union:
    case CombineMode::fuzzy_intersect: {
      bool all_crisp = true;
      for (const auto& m : ms) {
        require_interp(m, {Interp::fuzzy, Interp::set}, "fuzzy modes");
        all_crisp = all_crisp && m.interp == Interp::set;
      }
      out.interp = all_crisp ? Interp::set : Interp::fuzzy;
      if (mode == CombineMode::fuzzy_union) {
        for (const auto& m : ms)
          for (const auto& [tok, w] : m.entries) {
            auto [it, fresh] = out.entries.emplace(tok, w);
            if (!fresh) it->second = std::max(it->second, w);
          }
      } else {
        // absent token counts as weight 0, and zero entries are dropped
        for (const auto& [tok, w] : ms.front().entries) {
          double mn = w;
          for (std::size_t i = 1; i < ms.size() && mn > 0.0; ++i) {
            auto it = ms[i].entries.find(tok);
            mn = std::min(mn, it == ms[i].entries.end() ? 0.0 : it->second);
          }
          if (mn > 0.0) out.entries[tok] = mn;
        }
      }
      break;
    }
    case CombineMode::prob_or:
    case CombineMode::prob_and: {
      for (const auto& m : ms)
        require_interp(m, {Interp::probability}, "probability modes");
      out.interp = Interp::probability;
      if (mode == CombineMode::prob_or) {
        for (const auto& m : ms)
          for (const auto& [tok, w] : m.entries) out.entries[tok] += w;
      } else {
        for (const auto& [tok, w] : ms.front().entries) {
          double p = w;
          for (std::size_t i = 1; i < ms.size() && p > 0.0; ++i) {
            auto it = ms[i].entries.find(tok);
            p *= it == ms[i].entries.end() ? 0.0 : it->second;
          }
          if (p > 0.0) out.entries[tok] = p;
        }
        if (out.entries.empty())
          throw ValidationError(
              "prob_and of disjoint supports: zero total probability "
              "(contradiction)");
      }
      double total = 0.0;
      for (const auto& [tok, w] : out.entries) total += w;
      for (auto& [tok, w] : out.entries) w /= total;
      break;
    }
  }
  out.validate();
  return out;
}

WeightMap negate(const Dictionary& d, const WeightMap& m) {
  require_interp(m, {Interp::set}, "negation");
  for (const auto& [tok, w] : m.entries)
    if (!d.contains(tok)) throw ValidationError("unknown token: " + tok);
  WeightMap out;
  out.interp = Interp::set;
  for (const auto& tok : d.tokens())
    if (!m.entries.count(tok)) out.entries[tok] = 1.0;
  return out;
}

SummedVector venn_encode(const Dictionary& d,
                         const std::vector<WeightMap>& sets,
                         const std::vector<double>& tags) {
  if (sets.empty() || sets.size() > 3)
    throw ValidationError("venn encoding takes 1 to 3 sets");
  if (tags.size() != sets.size())
    throw ValidationError("one tag per set required");
  for (const auto& s : sets) require_interp(s, {Interp::set}, "venn encoding");
  for (double t : tags)
    if (!(t > 0.0)) throw ValidationError("tags must be positive");
  // all non-empty subset sums must be distinct, e.g. (1,2,3) collides
  std::size_t nsub = std::size_t{1} << sets.size();
  std::vector<double> sums(nsub, 0.0);
  for (std::size_t mask = 1; mask < nsub; ++mask)
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (mask & (std::size_t{1} << i)) sums[mask] += tags[i];
  for (std::size_t a = 1; a < nsub; ++a)
    for (std::size_t b = a + 1; b < nsub; ++b)
      if (std::abs(sums[a] - sums[b]) <= kRoundTol)
        throw ValidationError("ambiguous tags: subset sums collide at " +
                              std::to_string(sums[a]));
  WeightMap combined;
  combined.interp = Interp::raw;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (const auto& [tok, w] : sets[i].entries)
      combined.entries[tok] += tags[i];
  return encode(d, combined, false);
}

std::map<std::string, std::vector<std::string>> venn_decode(
    const Dictionary& d, const Eigen::VectorXd& y,
    const std::vector<double>& tags, const LassoConfig& cfg) {
  if (tags.empty() || tags.size() > 3)
    throw ValidationError("venn decoding takes 1 to 3 tags");
  std::size_t nsub = std::size_t{1} << tags.size();
  std::vector<double> sums(nsub, 0.0);
  std::vector<std::string> keys(nsub);
  for (std::size_t mask = 1; mask < nsub; ++mask) {
    std::string key;
    for (std::size_t i = 0; i < tags.size(); ++i)
      if (mask & (std::size_t{1} << i)) {
        sums[mask] += tags[i];
        if (!key.empty()) key += '&';
        key += std::to_string(i + 1);
      }
    keys[mask] = key;
  }
  Decomposition dec = decompose(d, y, cfg);
  std::map<std::string, std::vector<std::string>> regions;
  for (const auto& [tok, w] : dec.support) {
    std::size_t hit = 0;
    for (std::size_t mask = 1; mask < nsub; ++mask)
      if (std::abs(w - sums[mask]) <= kRoundTol) {
        hit = mask;
        break;
      }
    if (hit == 0)
      regions["unmatched"].push_back(tok + ":" + std::to_string(w));
    else
      regions[keys[hit]].push_back(tok);
  }
  for (auto& [key, toks] : regions) std::sort(toks.begin(), toks.end());
  return regions;
}

SummedVector order_encode(const Dictionary& d,
                          const std::vector<std::string>& sentence) {
  if (sentence.empty()) throw ValidationError("empty sentence");
  WeightMap m;
  m.interp = Interp::ordered;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (m.entries.count(sentence[i]))
      throw ValidationError("repeated word not supported in order encoding: " +
                            sentence[i]);
    m.entries[sentence[i]] = static_cast<double>(i + 1);
  }
  return encode(d, m, false);
}

std::vector<std::string> order_decode(const Dictionary& d,
                                      const Eigen::VectorXd& y,
                                      const LassoConfig& cfg) {
  WeightMap m = decode(d, y, Interp::ordered, cfg);
  std::vector<std::string> sentence(m.entries.size());
  for (const auto& [tok, w] : m.entries)
    sentence[static_cast<std::size_t>(std::llround(w)) - 1] = tok;
  return sentence;
}

WeightMap multiset_update(const WeightMap& m, const std::string& token,
                          int delta) {
  require_interp(m, {Interp::multiset}, "multiset update");
  if (delta != 1 && delta != -1)
    throw ValidationError("multiset delta must be +1 or -1");
  WeightMap out = m;
  auto it = out.entries.find(token);
  if (delta < 0) {
    if (it == out.entries.end())
      throw ValidationError("cannot remove absent token: " + token);
    if (it->second <= 1.0)
      out.entries.erase(it);
    else
      it->second -= 1.0;
  } else {
    if (it == out.entries.end())
      out.entries[token] = 1.0;
    else
      it->second += 1.0;
  }
  out.validate();
  return out;
}

}  // namespace vset
