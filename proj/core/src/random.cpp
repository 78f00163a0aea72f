#include "nclab/random.hpp"

#include <cmath>
#include <numbers>

namespace nclab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(seed) ^ h);
}

std::uint64_t hash_index(std::uint64_t key, std::span<const int> k) {
  std::uint64_t h = mix64(key);
  for (int v : k) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
  return h;
}

double to_unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Box-Muller on our own uniforms: std::normal_distribution is not specified
// bit-for-bit across standard libraries.
double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

int RandomStream::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

namespace {

Matrix gaussian(int n, RandomStream& rng) {
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = rng.complex_normal();
  }
  return m;
}

}  // namespace

Element random_general(const AlgebraPtr& algebra, RandomStream& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra->block_count(); ++b) blocks.push_back(gaussian(algebra->block_dim(b), rng));
  return Element(algebra, std::move(blocks));
}

Element random_hermitian(const AlgebraPtr& algebra, RandomStream& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra->block_count(); ++b) {
    Matrix g = gaussian(algebra->block_dim(b), rng);
    blocks.push_back(0.5 * (g + g.adjoint()));
  }
  return Element(algebra, std::move(blocks), true);
}

Element random_positive(const AlgebraPtr& algebra, RandomStream& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra->block_count(); ++b) {
    Matrix g = gaussian(algebra->block_dim(b), rng);
    Matrix p = g * g.adjoint();
    blocks.push_back(0.5 * (p + p.adjoint()));
  }
  Element x(algebra, std::move(blocks), true);
  const double n = operator_norm(x);
  return n > 0.0 ? x * (1.0 / n) : x;
}

Element random_unitary(const AlgebraPtr& algebra, RandomStream& rng) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    Eigen::HouseholderQR<Matrix> qr(gaussian(n, rng));
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
      const Complex d = r(i, i);
      const double a = std::abs(d);
      if (a > 0.0) q.col(i) *= d / a;
    }
    blocks.push_back(std::move(q));
  }
  return Element(algebra, std::move(blocks));
}

Element random_diagonal_positive(const AlgebraPtr& algebra, RandomStream& rng) {
  std::vector<std::vector<double>> diag;
  for (int b = 0; b < algebra->block_count(); ++b) {
    std::vector<double> d;
    for (int i = 0; i < algebra->block_dim(b); ++i) d.push_back(rng.uniform());
    diag.push_back(std::move(d));
  }
  return Element::diagonal(algebra, diag);
}

}  // namespace nclab
