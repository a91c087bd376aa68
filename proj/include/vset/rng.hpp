#ifndef VSET_RNG_HPP
#define VSET_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace vset {

// splitmix64 finalizer; used to derive independent streams from
// (seed, cell, trial) tuples so parallel and serial sweeps agree.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c);

// mt19937_64 with explicit uniform/normal transforms. The standard
// distributions are implementation-defined, so we roll our own to keep
// streams identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform();
  double uniform(double lo, double hi);
  // standard normal via Box-Muller
  double normal();
  // uniform index in [0, n)
  std::size_t index(std::size_t n);

  // k distinct indices from [0, n), in draw order
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vset

#endif
