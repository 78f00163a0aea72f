#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "nclab/algebra.hpp"

namespace nclab {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Key for an independent random stream: (seed, purpose tag).
std::uint64_t derive_key(std::uint64_t seed, std::string_view tag);

/// Counter-based draw keyed by (key, lattice index); independent of call order.
std::uint64_t hash_index(std::uint64_t key, std::span<const int> k);

/// Uniform in [0, 1) from a 64-bit value.
double to_unit_interval(std::uint64_t bits);

/// Sequential stream for building random elements; one stream per purpose tag.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view tag) : engine_(derive_key(seed, tag)) {}

  double uniform() { return to_unit_interval(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Complex complex_normal() { return {normal(), normal()}; }
  int integer(int lo, int hi);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Entries i.i.d. complex Gaussian.
Element random_general(const AlgebraPtr& algebra, RandomStream& rng);
/// (G + G*)/2 for Gaussian G.
Element random_hermitian(const AlgebraPtr& algebra, RandomStream& rng);
/// G G* / |G G*|_inf, so 0 <= x <= 1 with operator norm 1.
Element random_positive(const AlgebraPtr& algebra, RandomStream& rng);
/// Haar-like unitary (QR of a Gaussian matrix, phases fixed).
Element random_unitary(const AlgebraPtr& algebra, RandomStream& rng);
/// Positive element that is diagonal in every block.
Element random_diagonal_positive(const AlgebraPtr& algebra, RandomStream& rng);

}  // namespace nclab
