#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vset/dictionary.hpp"
#include "vset/errors.hpp"
#include "vset/rng.hpp"

using namespace vset;

TEST_CASE("word2vec text parse normalizes rows") {
  std::istringstream in("3 2\na 1 0\nb 0 1\nc 3 4\n");
  Dictionary d = load_dictionary(in);
  CHECK(d.dim() == 2);
  CHECK(d.size() == 3);
  int c = d.index_of("c");
  REQUIRE(c >= 0);
  CHECK(d.column(c)(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(d.column(c)(1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(d.original_norms()[c] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("dimension mismatch") {
    std::istringstream in("2 3\na 1 0\nb 0 1 1\n");
    try {
      load_dictionary(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("malformed header") {
    std::istringstream in("three 2\n");
    CHECK_THROWS_AS(load_dictionary(in), ParseError);
  }
  SUBCASE("duplicate token") {
    std::istringstream in("2 2\na 1 0\na 0 1\n");
    CHECK_THROWS_AS(load_dictionary(in), ValidationError);
  }
  SUBCASE("non-finite value") {
    std::istringstream in("2 2\na 1 0\nb nan 1\n");
    CHECK_THROWS_AS(load_dictionary(in), ParseError);
  }
  SUBCASE("zero-norm row rejected") {
    std::istringstream in("2 2\na 1 0\nb 0 0\n");
    CHECK_THROWS_AS(load_dictionary(in), ParseError);
  }
  SUBCASE("extra values on a row") {
    std::istringstream in("2 2\na 1 0\nb 0 1 7\n");
    CHECK_THROWS_AS(load_dictionary(in), ParseError);
  }
}

TEST_CASE("synthetic generation is deterministic and unit-norm") {
  Dictionary a = generate_synthetic(300, 500, 42);
  Dictionary b = generate_synthetic(300, 500, 42);
  CHECK(a.matrix() == b.matrix());
  CHECK(a.tokens() == b.tokens());
  CHECK(a.token(0) == "w000000");
  for (int j = 0; j < a.size(); ++j)
    CHECK(a.column(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  Dictionary c = generate_synthetic(300, 500, 43);
  CHECK(a.matrix() != c.matrix());
}

TEST_CASE("mean pairwise cosine of synthetic columns is small") {
  Dictionary d = generate_synthetic(300, 10000, 42);
  Rng rng(7);
  double acc = 0.0;
  for (int t = 0; t < 1000; ++t) {
    int a = static_cast<int>(rng.index(10000));
    int b = static_cast<int>(rng.index(10000));
    if (a == b) { --t; continue; }
    acc += std::abs(d.column(a).dot(d.column(b)));
  }
  // expectation is about sqrt(2/(pi*n)) ~ 0.046 at n=300
  CHECK(acc / 1000.0 <= 0.12);
}

TEST_CASE("normalization is idempotent") {
  Dictionary d = generate_synthetic(2, 3, 7);
  for (int j = 0; j < d.size(); ++j) {
    Eigen::VectorXd col = d.column(j);
    Eigen::VectorXd renorm = col / col.norm();
    CHECK((renorm - col).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("nearest neighbors") {
  Dictionary d = generate_synthetic(50, 200, 3);
  SUBCASE("a dictionary column is its own nearest neighbor") {
    auto nn = nearest_neighbors(d, d.column(5), 1);
    REQUIRE(nn.size() == 1);
    CHECK(nn[0].first == "w000005");
    CHECK(nn[0].second == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("mean of two columns ranks those two on top") {
    Eigen::VectorXd q = 0.5 * (d.column(10) + d.column(20));
    q.normalize();
    auto nn = nearest_neighbors(d, q, 2);
    // oracle: exhaustive cosine scan
    std::vector<std::pair<double, int>> scan;
    for (int j = 0; j < d.size(); ++j)
      scan.emplace_back(-q.dot(d.column(j)), j);
    std::sort(scan.begin(), scan.end());
    CHECK(nn[0].first == d.token(scan[0].second));
    CHECK(nn[1].first == d.token(scan[1].second));
    std::vector<std::string> toks = {nn[0].first, nn[1].first};
    CHECK(std::count(toks.begin(), toks.end(), "w000010") == 1);
    CHECK(std::count(toks.begin(), toks.end(), "w000020") == 1);
  }
  SUBCASE("k beyond N is rejected") {
    CHECK_THROWS_AS(nearest_neighbors(d, d.column(0), d.size() + 1),
                    ValidationError);
  }
  SUBCASE("dimension mismatch is rejected") {
    Eigen::VectorXd q = Eigen::VectorXd::Ones(51);
    CHECK_THROWS_AS(nearest_neighbors(d, q, 1), ValidationError);
  }
}

TEST_CASE("binary cache round trip is bit-exact") {
  Dictionary d = generate_synthetic(25, 100, 1);
  const std::string path = "test_cache.bin";
  save_cache(d, path);
  Dictionary back = load_cache(path);
  CHECK(back.tokens() == d.tokens());
  CHECK(back.matrix() == d.matrix());

  SUBCASE("truncated cache is rejected") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream out("test_cache_trunc.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_cache("test_cache_trunc.bin"), ValidationError);
    std::remove("test_cache_trunc.bin");
  }
  SUBCASE("bad magic is rejected") {
    std::ofstream out("test_cache_magic.bin", std::ios::binary);
    out << "NOTADICT general garbage";
    out.close();
    CHECK_THROWS_AS(load_cache("test_cache_magic.bin"), ValidationError);
    std::remove("test_cache_magic.bin");
  }
  std::remove(path.c_str());
}

TEST_CASE("clustered dictionaries have tight neighborhoods") {
  Dictionary d = generate_clustered(50, 400, 8, 0.4, 9);
  CHECK(d.size() == 400);
  // round-robin assignment: neighbors of column 0 should mostly be from
  // cluster 0, i.e. indices congruent to 0 mod 8
  auto nn = nearest_neighbors(d, d.column(0), 10);
  int same_cluster = 0;
  for (const auto& [tok, cos] : nn) {
    int idx = d.index_of(tok);
    if (idx % 8 == 0) ++same_cluster;
  }
  CHECK(same_cluster >= 9);
}

TEST_CASE("dictionary spec builds all kinds") {
  DictionarySpec spec;
  spec.kind = "synthetic-gaussian";
  spec.n = 10;
  spec.N = 20;
  spec.seed = 4;
  CHECK(spec.build().size() == 20);
  spec.kind = "synthetic-clustered";
  spec.clusters = 4;
  CHECK(spec.build().dim() == 10);
  spec.kind = "no-such-kind";
  CHECK_THROWS_AS(spec.build(), ValidationError);
}
