#ifndef VSET_DICTIONARY_HPP
#define VSET_DICTIONARY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vset {

// Immutable indexed collection of unit-norm word vectors. Columns of the
// design matrix in the sparse regression; column-major so one word vector
// is contiguous. Safe for unlimited concurrent readers after construction.
class Dictionary {
public:
  Dictionary(std::vector<std::string> tokens, Eigen::MatrixXd matrix,
             Eigen::VectorXd original_norms);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  int size() const { return static_cast<int>(matrix_.cols()); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  // L2 norms of the rows as loaded, before normalization.
  const Eigen::VectorXd& original_norms() const { return original_norms_; }

  const std::string& token(int i) const { return tokens_[i]; }
  Eigen::MatrixXd::ConstColXpr column(int i) const { return matrix_.col(i); }

  // -1 when absent
  int index_of(const std::string& token) const;
  bool contains(const std::string& token) const {
    return index_of(token) >= 0;
  }

  // New dictionary with one extra normalized column; this one is unchanged.
  Dictionary with_column(const std::string& token,
                         const Eigen::VectorXd& vec) const;

private:
  std::vector<std::string> tokens_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd original_norms_;
  std::unordered_map<std::string, int> index_;
};

// How to obtain a dictionary: a file on disk or a synthetic draw.
struct DictionarySpec {
  // "file-backed" | "synthetic-gaussian" | "synthetic-clustered"
  std::string kind = "synthetic-gaussian";
  std::string path;          // file-backed: text or binary cache
  int n = 0;
  int N = 0;
  std::uint64_t seed = 0;
  int clusters = 0;          // synthetic-clustered
  double spread = 0.4;       // synthetic-clustered
  std::string meta;          // informational (embedding window etc.)

  Dictionary build() const;
};

// word2vec text format: header "N n", then one line per token.
Dictionary load_dictionary(const std::string& path);
Dictionary load_dictionary(std::istream& in);

// N unit-norm columns drawn i.i.d. from an n-dimensional standard normal.
// Pure function of (n, N, seed); tokens are "w000000"..zero-padded.
Dictionary generate_synthetic(int n, int N, std::uint64_t seed);

// Mixture-of-clusters variant: normalized points center + spread * noise.
// Gives the dictionary the neighborhood structure real embeddings have,
// which the clustered-recovery experiments rely on.
Dictionary generate_clustered(int n, int N, int clusters, double spread,
                              std::uint64_t seed);

// k tokens sorted by descending cosine to q; ties by ascending index.
std::vector<std::pair<std::string, double>> nearest_neighbors(
    const Dictionary& d, const Eigen::VectorXd& q, int k);

// Versioned little-endian binary cache, bit-exact round trip.
void save_cache(const Dictionary& d, const std::string& path);
Dictionary load_cache(const std::string& path);

}  // namespace vset

#endif
