#include "vset/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vset/errors.hpp"
#include "vset/kernels.hpp"
#include "vset/rng.hpp"

namespace vset {

namespace {

constexpr char kCacheMagic[8] = {'V', 'S', 'E', 'T', 'D', 'I', 'C', '1'};
constexpr double kNormTol = 1e-9;

void normalize_columns(Eigen::MatrixXd& m, Eigen::VectorXd& norms,
                       long line_base) {
  norms.resize(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double nrm = m.col(j).norm();
    if (!std::isfinite(nrm) || nrm == 0.0) {
      throw ParseError("zero-norm or non-finite vector cannot be normalized",
                       line_base + j);
    }
    norms[j] = nrm;
    m.col(j) /= nrm;
  }
}

}  // namespace

Dictionary::Dictionary(std::vector<std::string> tokens, Eigen::MatrixXd matrix,
                       Eigen::VectorXd original_norms)
    : tokens_(std::move(tokens)),
      matrix_(std::move(matrix)),
      original_norms_(std::move(original_norms)) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1)
    throw ValidationError("dictionary must have n >= 1, N >= 1");
  if (static_cast<Eigen::Index>(tokens_.size()) != matrix_.cols())
    throw ValidationError("token count does not match column count");
  if (!matrix_.allFinite())
    throw ValidationError("dictionary matrix contains non-finite entries");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate token: " + tokens_[i]);
  }
  for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
    if (std::abs(matrix_.col(j).norm() - 1.0) > kNormTol)
      throw ValidationError("column not unit-norm: " + tokens_[j]);
  }
}

int Dictionary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

Dictionary Dictionary::with_column(const std::string& token,
                                   const Eigen::VectorXd& vec) const {
  if (contains(token)) throw ValidationError("token already defined: " + token);
  if (vec.size() != matrix_.rows())
    throw ValidationError("new column has wrong dimension");
  double nrm = vec.norm();
  if (nrm == 0.0 || !std::isfinite(nrm))
    throw ValidationError("cannot add zero-norm or non-finite vector");
  std::vector<std::string> toks = tokens_;
  toks.push_back(token);
  Eigen::MatrixXd m(matrix_.rows(), matrix_.cols() + 1);
  m.leftCols(matrix_.cols()) = matrix_;
  m.col(matrix_.cols()) = vec / nrm;
  Eigen::VectorXd norms(original_norms_.size() + 1);
  norms.head(original_norms_.size()) = original_norms_;
  norms[original_norms_.size()] = nrm;
  return Dictionary(std::move(toks), std::move(m), std::move(norms));
}

Dictionary DictionarySpec::build() const {
  if (kind == "file-backed") {
    if (path.empty()) throw ValidationError("file-backed spec needs a path");
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
      return load_cache(path);
    return load_dictionary(path);
  }
  if (kind == "synthetic-gaussian") return generate_synthetic(n, N, seed);
  if (kind == "synthetic-clustered") {
    int c = clusters > 0 ? clusters : std::max(1, N / 250);
    return generate_clustered(n, N, c, spread, seed);
  }
  throw ValidationError("unknown dictionary kind: " + kind);
}

Dictionary load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding file: " + path);
  return load_dictionary(in);
}

Dictionary load_dictionary(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty embedding file", 1);
  long long N = 0, n = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> N >> n) || (hs >> extra) || N < 1 || n < 1)
      throw ParseError("malformed header, expected \"N n\"", 1);
  }
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(N));
  Eigen::MatrixXd m(n, N);
  long lineno = 1;
  for (long long j = 0; j < N; ++j) {
    if (!std::getline(in, line))
      throw ParseError("unexpected end of file, expected " +
                           std::to_string(N) + " rows",
                       lineno + 1);
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) throw ParseError("missing token", lineno);
    for (long long i = 0; i < n; ++i) {
      double v;
      if (!(ls >> v))
        throw ParseError("dimension mismatch: expected " + std::to_string(n) +
                             " values for token " + tok,
                         lineno);
      if (!std::isfinite(v))
        throw ParseError("non-finite value for token " + tok, lineno);
      m(i, j) = v;
    }
    double trailing;
    if (ls >> trailing)
      throw ParseError("dimension mismatch: more than " + std::to_string(n) +
                           " values for token " + tok,
                       lineno);
    tokens.push_back(std::move(tok));
  }
  Eigen::VectorXd norms;
  normalize_columns(m, norms, 2);
  return Dictionary(std::move(tokens), std::move(m), std::move(norms));
}

namespace {

std::string synthetic_token(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "w%06d", i);
  return buf;
}

}  // namespace

Dictionary generate_synthetic(int n, int N, std::uint64_t seed) {
  if (n < 1 || N < 1) throw ValidationError("synthetic dictionary needs n >= 1, N >= 1");
  Rng rng(mix64(seed, 0x5EEDu));
  Eigen::MatrixXd m(n, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.normal();
  Eigen::VectorXd norms;
  normalize_columns(m, norms, 0);
  std::vector<std::string> tokens(N);
  for (int i = 0; i < N; ++i) tokens[i] = synthetic_token(i);
  return Dictionary(std::move(tokens), std::move(m), std::move(norms));
}

Dictionary generate_clustered(int n, int N, int clusters, double spread,
                              std::uint64_t seed) {
  if (n < 1 || N < 1 || clusters < 1)
    throw ValidationError("clustered dictionary needs n, N, clusters >= 1");
  if (spread <= 0.0) throw ValidationError("cluster spread must be positive");
  Rng rng(mix64(seed, 0xC1u));
  Eigen::MatrixXd centers(n, clusters);
  for (int c = 0; c < clusters; ++c) {
    for (int i = 0; i < n; ++i) centers(i, c) = rng.normal();
    centers.col(c).normalize();
  }
  Eigen::MatrixXd m(n, N);
  for (int j = 0; j < N; ++j) {
    int c = j % clusters;  // round-robin keeps cluster sizes balanced
    for (int i = 0; i < n; ++i)
      m(i, j) = centers(i, c) + spread * rng.normal() / std::sqrt(double(n));
  }
  Eigen::VectorXd norms;
  normalize_columns(m, norms, 0);
  std::vector<std::string> tokens(N);
  for (int i = 0; i < N; ++i) tokens[i] = synthetic_token(i);
  return Dictionary(std::move(tokens), std::move(m), std::move(norms));
}

std::vector<std::pair<std::string, double>> nearest_neighbors(
    const Dictionary& d, const Eigen::VectorXd& q, int k) {
  if (q.size() != d.dim())
    throw ValidationError("query dimension " + std::to_string(q.size()) +
                          " does not match dictionary dimension " +
                          std::to_string(d.dim()));
  if (k < 1 || k > d.size())
    throw ValidationError("k must be in [1, N]");
  double qn = q.norm();
  if (qn == 0.0) throw ValidationError("cannot rank neighbors of zero vector");
  Eigen::VectorXd corr;
  kernels::correlations(d.matrix(), q, corr);
  std::vector<int> idx(d.size());
  for (int i = 0; i < d.size(); ++i) idx[i] = i;
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](int a, int b) {
                      if (corr[a] != corr[b]) return corr[a] > corr[b];
                      return a < b;
                    });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i)
    out.emplace_back(d.token(idx[i]), corr[idx[i]] / qn);
  return out;
}

namespace {

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw ValidationError("cache truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ValidationError("cache truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_cache(const Dictionary& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open cache for writing: " + path);
  out.write(kCacheMagic, 8);
  write_u64(out, static_cast<std::uint64_t>(d.dim()));
  write_u64(out, static_cast<std::uint64_t>(d.size()));
  for (const auto& tok : d.tokens()) {
    write_u32(out, static_cast<std::uint32_t>(tok.size()));
    out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
  }
  static_assert(sizeof(double) == 8);
  // doubles are written as raw little-endian IEEE-754
  out.write(reinterpret_cast<const char*>(d.matrix().data()),
            static_cast<std::streamsize>(sizeof(double)) * d.dim() * d.size());
  if (!out) throw ValidationError("cache write failed: " + path);
}

Dictionary load_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open cache: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCacheMagic, 8) != 0)
    throw ValidationError("bad cache magic or unsupported version: " + path);
  auto n = static_cast<Eigen::Index>(read_u64(in));
  auto N = static_cast<Eigen::Index>(read_u64(in));
  if (n < 1 || N < 1) throw ValidationError("corrupt cache header: " + path);
  std::vector<std::string> tokens(static_cast<std::size_t>(N));
  for (auto& tok : tokens) {
    std::uint32_t len = read_u32(in);
    tok.resize(len);
    in.read(tok.data(), len);
    if (!in) throw ValidationError("cache truncated in token table: " + path);
  }
  Eigen::MatrixXd m(n, N);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double)) * n * N);
  if (!in) throw ValidationError("cache truncated in matrix payload: " + path);
  return Dictionary(std::move(tokens), std::move(m),
                    Eigen::VectorXd::Ones(N));
}

}  // namespace vset
