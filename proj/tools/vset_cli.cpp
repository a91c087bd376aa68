// vset: weighted word sets as summed vectors.
//
// Verbs: dict gen|load|info|cache, encode, decode, setop, venn, order,
// simplex project|score|loo, reason chain|analogy|define,
// experiment run, report render.
//
// Exit codes: 0 ok, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "vset/dictionary.hpp"
#include "vset/errors.hpp"
#include "vset/experiment.hpp"
#include "vset/lasso.hpp"
#include "vset/reasoning.hpp"
#include "vset/set_algebra.hpp"
#include "vset/simplex.hpp"

using nlohmann::json;
using namespace vset;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

// vector files: {"dim": n, "values": [..]}
Eigen::VectorXd read_vector(const std::string& path) {
  json j = read_json(path);
  auto vals = j.at("values").get<std::vector<double>>();
  if (j.contains("dim") &&
      j.at("dim").get<std::size_t>() != vals.size())
    throw ValidationError(path + ": dim does not match values length");
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

void write_vector(const Eigen::VectorXd& v, const std::string& path) {
  json j;
  j["dim"] = v.size();
  j["values"] = std::vector<double>(v.data(), v.data() + v.size());
  write_json(j, path);
}

Dictionary open_dictionary(const std::string& path) {
  DictionarySpec spec;
  spec.kind = "file-backed";
  spec.path = path;
  return spec.build();
}

ClassSimplex load_class(const Dictionary& d, const std::string& path) {
  json j = read_json(path);
  return ClassSimplex::from_tokens(
      d, j.at("label").get<std::string>(),
      j.at("members").get<std::vector<std::string>>());
}

int run(int argc, char** argv) {
  CLI::App app{"weighted word sets as summed vectors"};
  app.require_subcommand(1);

  // ---- dict ----------------------------------------------------------
  auto* dict = app.add_subcommand("dict", "build and inspect dictionaries");
  dict->require_subcommand(1);

  struct {
    int n = 300, N = 10000, clusters = 0;
    double spread = 0.4;
    std::uint64_t seed = 0;
    std::string out, path;
  } dopt;

  auto* dgen = dict->add_subcommand("gen", "generate a synthetic dictionary");
  dgen->add_option("--n", dopt.n, "vector dimension");
  dgen->add_option("--N", dopt.N, "dictionary size");
  dgen->add_option("--seed", dopt.seed, "rng seed");
  dgen->add_option("--clusters", dopt.clusters,
                   "cluster count (0 = plain gaussian)");
  dgen->add_option("--spread", dopt.spread, "within-cluster spread");
  dgen->add_option("--out", dopt.out, "binary cache output path")->required();
  dgen->callback([&] {
    DictionarySpec spec;
    spec.kind = dopt.clusters > 0 ? "synthetic-clustered" : "synthetic-gaussian";
    spec.n = dopt.n;
    spec.N = dopt.N;
    spec.seed = dopt.seed;
    spec.clusters = dopt.clusters;
    spec.spread = dopt.spread;
    save_cache(spec.build(), dopt.out);
  });

  auto* dload = dict->add_subcommand("load", "parse a word2vec text file");
  dload->add_option("--path", dopt.path, "word2vec text file")->required();
  dload->callback([&] {
    Dictionary d = load_dictionary(dopt.path);
    std::cout << "loaded " << d.size() << " tokens, dim " << d.dim() << "\n";
  });

  auto* dinfo = dict->add_subcommand("info", "print dictionary summary");
  dinfo->add_option("--path", dopt.path, "dictionary file")->required();
  dinfo->callback([&] {
    Dictionary d = open_dictionary(dopt.path);
    json j{{"tokens", d.size()}, {"dim", d.dim()}};
    json sample = json::array();
    for (int i = 0; i < std::min(5, d.size()); ++i) sample.push_back(d.token(i));
    j["sample"] = sample;
    std::cout << j.dump(2) << "\n";
  });

  auto* dcache = dict->add_subcommand("cache", "convert text to binary cache");
  dcache->add_option("--path", dopt.path, "word2vec text file")->required();
  dcache->add_option("--out", dopt.out, "binary cache output path")->required();
  dcache->callback(
      [&] { save_cache(load_dictionary(dopt.path), dopt.out); });

  // ---- encode / decode ----------------------------------------------
  struct {
    std::string dict, weights, in, out, interp = "raw", diagnostics;
    bool normalize = false;
  } copt;

  auto* enc = app.add_subcommand("encode", "sum a weight map into a vector");
  enc->add_option("--dict", copt.dict, "dictionary file")->required();
  enc->add_option("--weights", copt.weights, "weight map json")->required();
  enc->add_flag("--normalize", copt.normalize, "normalize the sum");
  enc->add_option("--out", copt.out, "vector output (default stdout)");
  enc->callback([&] {
    Dictionary d = open_dictionary(copt.dict);
    WeightMap m = WeightMap::from_json(read_json(copt.weights));
    SummedVector v = encode(d, m, copt.normalize);
    write_vector(v.data, copt.out);
  });

  auto* dec = app.add_subcommand("decode", "recover the weight map of a sum");
  dec->add_option("--dict", copt.dict, "dictionary file")->required();
  dec->add_option("--in", copt.in, "vector json")->required();
  dec->add_option("--interp", copt.interp, "expected interpretation");
  dec->add_option("--out", copt.out, "weight map output (default stdout)");
  dec->add_option("--diagnostics", copt.diagnostics,
                  "write the raw decomposition here");
  dec->callback([&] {
    Dictionary d = open_dictionary(copt.dict);
    Eigen::VectorXd y = read_vector(copt.in);
    Decomposition diag;
    WeightMap m =
        decode(d, y, interp_from_name(copt.interp), LassoConfig{}, &diag);
    write_json(m.to_json(), copt.out);
    if (!copt.diagnostics.empty()) write_json(diag.to_json(), copt.diagnostics);
  });

  // ---- setop ---------------------------------------------------------
  struct {
    std::string mode, dict, out;
    std::vector<std::string> inputs;
  } sopt;

  auto* setop = app.add_subcommand("setop", "combine or negate weight maps");
  setop->add_option("--mode", sopt.mode,
                    "union|intersect|minus|fuzzy_union|fuzzy_intersect|"
                    "prob_or|prob_and|negate")
      ->required();
  setop->add_option("--in", sopt.inputs, "weight map files")->required();
  setop->add_option("--dict", sopt.dict, "dictionary (negate only)");
  setop->add_option("--out", sopt.out, "output (default stdout)");
  setop->callback([&] {
    std::vector<WeightMap> ms;
    for (const auto& p : sopt.inputs)
      ms.push_back(WeightMap::from_json(read_json(p)));
    WeightMap out;
    if (sopt.mode == "negate") {
      if (sopt.dict.empty())
        throw ValidationError("negate needs --dict for the token universe");
      if (ms.size() != 1)
        throw ValidationError("negate takes exactly one input");
      out = negate(open_dictionary(sopt.dict), ms[0]);
    } else {
      out = combine(combine_mode_from_name(sopt.mode), ms);
    }
    write_json(out.to_json(), sopt.out);
  });

  // ---- venn ----------------------------------------------------------
  struct {
    std::string dict, in, out;
    std::vector<std::string> sets;
    std::vector<double> tags;
  } vopt;

  auto* venn = app.add_subcommand(
      "venn", "tag-weighted encoding of overlapping sets");
  venn->add_option("--dict", vopt.dict, "dictionary file")->required();
  venn->add_option("--tags", vopt.tags, "one positive tag per set")->required();
  venn->add_option("--sets", vopt.sets, "set weight maps (encode)");
  venn->add_option("--in", vopt.in, "summed vector (decode)");
  venn->add_option("--out", vopt.out, "output (default stdout)");
  venn->callback([&] {
    Dictionary d = open_dictionary(vopt.dict);
    if (!vopt.in.empty()) {
      auto regions = venn_decode(d, read_vector(vopt.in), vopt.tags);
      json j = json::object();
      for (const auto& [key, toks] : regions) j[key] = toks;
      write_json(j, vopt.out);
      return;
    }
    if (vopt.sets.empty())
      throw ValidationError("venn needs either --sets or --in");
    std::vector<WeightMap> sets;
    for (const auto& p : vopt.sets)
      sets.push_back(WeightMap::from_json(read_json(p)));
    write_vector(venn_encode(d, sets, vopt.tags).data, vopt.out);
  });

  // ---- order ---------------------------------------------------------
  struct {
    std::string dict, in, out;
    std::vector<std::string> words;
  } oopt;

  auto* order = app.add_subcommand("order", "position-weighted sequences");
  order->add_option("--dict", oopt.dict, "dictionary file")->required();
  order->add_option("--words", oopt.words, "sentence tokens (encode)");
  order->add_option("--in", oopt.in, "summed vector (decode)");
  order->add_option("--out", oopt.out, "output (default stdout)");
  order->callback([&] {
    Dictionary d = open_dictionary(oopt.dict);
    if (!oopt.in.empty()) {
      auto sentence = order_decode(d, read_vector(oopt.in));
      write_json(json(sentence), oopt.out);
      return;
    }
    if (oopt.words.empty())
      throw ValidationError("order needs either --words or --in");
    write_vector(order_encode(d, oopt.words).data, oopt.out);
  });

  // ---- simplex -------------------------------------------------------
  auto* simplex = app.add_subcommand("simplex", "classes as simplices");
  simplex->require_subcommand(1);

  struct {
    std::string dict, klass, in, out, token;
  } xopt;

  auto* sproj = simplex->add_subcommand("project", "project onto a class");
  sproj->add_option("--dict", xopt.dict, "dictionary file")->required();
  sproj->add_option("--class", xopt.klass, "class json")->required();
  sproj->add_option("--in", xopt.in, "point vector json");
  sproj->add_option("--token", xopt.token, "or a dictionary token");
  sproj->add_option("--out", xopt.out, "output (default stdout)");
  auto point_of = [&](const Dictionary& d) -> Eigen::VectorXd {
    if (!xopt.token.empty()) {
      int j = d.index_of(xopt.token);
      if (j < 0) throw ValidationError("unknown token: " + xopt.token);
      return d.column(j);
    }
    if (xopt.in.empty())
      throw ValidationError("need --in or --token for the query point");
    return read_vector(xopt.in);
  };
  sproj->callback([&] {
    Dictionary d = open_dictionary(xopt.dict);
    ClassSimplex s = load_class(d, xopt.klass);
    Projection p = project_onto_simplex(s, point_of(d));
    json j;
    j["point"] = std::vector<double>(p.point.data(),
                                     p.point.data() + p.point.size());
    json w = json::object();
    for (int i = 0; i < s.order(); ++i)
      if (p.weights[i] > 0.0) w[s.vertex_tokens[i]] = p.weights[i];
    j["weights"] = w;
    j["kkt_gap"] = p.kkt_gap;
    j["rank_deficient"] = p.rank_deficient;
    write_json(j, xopt.out);
  });

  auto* sscore = simplex->add_subcommand("score", "membership distances");
  sscore->add_option("--dict", xopt.dict, "dictionary file")->required();
  sscore->add_option("--class", xopt.klass, "class json")->required();
  sscore->add_option("--in", xopt.in, "point vector json");
  sscore->add_option("--token", xopt.token, "or a dictionary token");
  sscore->add_option("--out", xopt.out, "output (default stdout)");
  sscore->callback([&] {
    Dictionary d = open_dictionary(xopt.dict);
    ClassSimplex s = load_class(d, xopt.klass);
    Membership m = membership_score(s, point_of(d));
    json j{{"label", s.label},
           {"dist_simplex", m.dist_simplex},
           {"dist_centroid", m.dist_centroid},
           {"nearest_face", m.nearest_face_weights.to_json()}};
    write_json(j, xopt.out);
  });

  auto* sloo = simplex->add_subcommand("loo", "leave-one-out distance report");
  sloo->add_option("--dict", xopt.dict, "dictionary file")->required();
  sloo->add_option("--class", xopt.klass, "class json")->required();
  sloo->add_option("--out", xopt.out, "csv output (default stdout)");
  sloo->callback([&] {
    Dictionary d = open_dictionary(xopt.dict);
    json cj = read_json(xopt.klass);
    std::string label = cj.at("label").get<std::string>();
    auto members = cj.at("members").get<std::vector<std::string>>();
    if (members.size() < 2)
      throw ValidationError("leave-one-out needs at least two members");
    std::string csv = "label,member,dist_simplex,dist_centroid\n";
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::vector<std::string> rest;
      for (std::size_t j = 0; j < members.size(); ++j)
        if (j != i) rest.push_back(members[j]);
      ClassSimplex s = ClassSimplex::from_tokens(d, label, rest);
      int idx = d.index_of(members[i]);
      if (idx < 0) throw ValidationError("unknown token: " + members[i]);
      Membership m = membership_score(s, d.column(idx));
      char row[256];
      std::snprintf(row, sizeof row, "%s,%s,%.9g,%.9g\n", label.c_str(),
                    members[i].c_str(), m.dist_simplex, m.dist_centroid);
      csv += row;
    }
    if (xopt.out.empty() || xopt.out == "-") {
      std::cout << csv;
    } else {
      std::ofstream outf(xopt.out);
      if (!outf) throw ValidationError("cannot open " + xopt.out);
      outf << csv;
    }
  });

  // ---- reason --------------------------------------------------------
  auto* reason = app.add_subcommand("reason", "deduction and analogy");
  reason->require_subcommand(1);

  struct {
    std::string dict, facts, in, out, base, subtract, add, name, recipe;
    int k = 5;
  } ropt;

  auto* rchain = reason->add_subcommand("chain", "decompose over a fact base");
  rchain->add_option("--dict", ropt.dict, "dictionary file")->required();
  rchain->add_option("--facts", ropt.facts, "fact base json")->required();
  rchain->add_option("--in", ropt.in, "query vector json")->required();
  rchain->add_option("--out", ropt.out, "output (default stdout)");
  rchain->callback([&] {
    Dictionary d = open_dictionary(ropt.dict);
    FactBase kb = FactBase::from_json(d, read_json(ropt.facts));
    ChainResult r = chain_decompose(kb, read_vector(ropt.in));
    write_json(r.to_json(), ropt.out);
  });

  auto* ranal = reason->add_subcommand("analogy", "base - subtract + add");
  ranal->add_option("--dict", ropt.dict, "dictionary file")->required();
  ranal->add_option("--base", ropt.base, "base vector json")->required();
  ranal->add_option("--subtract", ropt.subtract, "vector json")->required();
  ranal->add_option("--add", ropt.add, "vector json")->required();
  ranal->add_option("--k", ropt.k, "results to return");
  ranal->add_option("--out", ropt.out, "output (default stdout)");
  ranal->callback([&] {
    Dictionary d = open_dictionary(ropt.dict);
    auto out = analogy(read_vector(ropt.base), read_vector(ropt.subtract),
                       read_vector(ropt.add), d, ropt.k);
    json j = json::array();
    for (const auto& [tok, w] : out)
      j.push_back({{"token", tok}, {"weight", w}});
    write_json(j, ropt.out);
  });

  auto* rdef = reason->add_subcommand("define", "add a derived token");
  rdef->add_option("--dict", ropt.dict, "dictionary file")->required();
  rdef->add_option("--name", ropt.name, "new token name")->required();
  rdef->add_option("--recipe", ropt.recipe, "recipe json")->required();
  rdef->add_option("--out", ropt.out, "binary cache output")->required();
  rdef->callback([&] {
    Dictionary d = open_dictionary(ropt.dict);
    Dictionary d2 = define_term(ropt.name, read_json(ropt.recipe), d);
    save_cache(d2, ropt.out);
  });

  // ---- experiment / report ------------------------------------------
  struct {
    std::string spec, in, out, format = "json";
  } eopt;

  auto* experiment = app.add_subcommand("experiment", "run experiment sweeps");
  auto* erun = experiment->add_subcommand("run", "run a spec");
  erun->add_option("spec", eopt.spec, "experiment spec json")->required();
  erun->add_option("--format", eopt.format, "csv|svg|json");
  erun->add_option("--out", eopt.out, "output path")->required();
  erun->callback([&] {
    ExperimentSpec spec = ExperimentSpec::from_json(read_json(eopt.spec));
    emit_report(run_experiment(spec), eopt.format, eopt.out);
  });

  auto* report = app.add_subcommand("report", "re-render saved reports");
  auto* rrender = report->add_subcommand("render", "render report json");
  rrender->add_option("--in", eopt.in, "report json (from experiment run)")
      ->required();
  rrender->add_option("--format", eopt.format, "csv|svg")->required();
  rrender->add_option("--out", eopt.out, "output path")->required();
  rrender->callback([&] {
    json j = read_json(eopt.in);
    ExperimentReport r;
    r.spec = ExperimentSpec::from_json(j.at("spec"));
    for (const auto& cj : j.at("cells")) {
      CellResult c;
      c.method = cj.at("method").get<std::string>();
      c.n = cj.at("n").get<int>();
      c.N = cj.at("N").get<int>();
      c.k = cj.at("k").get<int>();
      c.sigma = cj.at("sigma").get<double>();
      c.trials = cj.at("trials").get<int>();
      c.successes = cj.at("successes").get<int>();
      c.success_rate = cj.at("success_rate").get<double>();
      c.wilson_lo = cj.at("wilson_lo").get<double>();
      c.wilson_hi = cj.at("wilson_hi").get<double>();
      c.mean_weight_err = cj.at("mean_weight_err").get<double>();
      c.mean_seconds = cj.at("mean_seconds").get<double>();
      r.cells.push_back(std::move(c));
    }
    emit_report(r, eopt.format, eopt.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
