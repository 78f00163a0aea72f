#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nclab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Default tolerance for Hermiticity and positivity tests.
inline constexpr double kDefaultTolerance = 1e-10;

/// Finite direct sum of full matrix algebras M_{n_1} + ... + M_{n_B}, with the
/// faithful trace tau(x) = sum_b w_b tr(x_b).
class Algebra {
 public:
  Algebra(std::vector<int> block_dims, std::vector<double> trace_weights);

  static std::shared_ptr<const Algebra> make(std::vector<int> block_dims,
                                             std::vector<double> trace_weights);
  /// M_n with unit trace weight.
  static std::shared_ptr<const Algebra> full(int n);
  /// l_infty on n points: n blocks of size 1 with the given weights (unit by default).
  static std::shared_ptr<const Algebra> diagonal(int n, std::vector<double> weights = {});

  int block_count() const noexcept { return static_cast<int>(dims_.size()); }
  int block_dim(int b) const { return dims_[static_cast<std::size_t>(b)]; }
  double weight(int b) const { return weights_[static_cast<std::size_t>(b)]; }
  std::span<const int> block_dims() const noexcept { return dims_; }
  std::span<const double> trace_weights() const noexcept { return weights_; }

  /// tau(1)
  double total_trace() const noexcept { return total_trace_; }
  /// Sum of n_b, the size of the ambient matrix the blocks sit in.
  int matrix_dim() const noexcept { return matrix_dim_; }
  /// Sum of n_b^2, the complex dimension of the algebra.
  int vector_dim() const noexcept { return vector_dim_; }
  /// Offset of block b inside the vectorized element.
  int vector_offset(int b) const { return offsets_[static_cast<std::size_t>(b)]; }

  friend bool operator==(const Algebra& a, const Algebra& b) {
    return a.dims_ == b.dims_ && a.weights_ == b.weights_;
  }

 private:
  std::vector<int> dims_;
  std::vector<double> weights_;
  std::vector<int> offsets_;
  double total_trace_ = 0.0;
  int matrix_dim_ = 0;
  int vector_dim_ = 0;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

/// An element of an Algebra, stored block by block.
class Element {
 public:
  Element() = default;
  Element(AlgebraPtr algebra, std::vector<Matrix> blocks,
          std::optional<bool> hermitian_hint = std::nullopt);

  static Element zero(AlgebraPtr algebra);
  static Element identity(AlgebraPtr algebra);
  /// Matrix unit e_{ij} (0-based) inside block b.
  static Element unit(AlgebraPtr algebra, int b, int i, int j);
  /// Block-diagonal element from per-block real diagonals.
  static Element diagonal(AlgebraPtr algebra, const std::vector<std::vector<double>>& diag);
  /// Inverse of vectorize().
  static Element from_vector(AlgebraPtr algebra, const Vector& v);

  const Algebra& algebra() const { return *algebra_; }
  const AlgebraPtr& algebra_ptr() const noexcept { return algebra_; }
  bool empty() const noexcept { return algebra_ == nullptr; }

  int block_count() const noexcept { return static_cast<int>(blocks_.size()); }
  const Matrix& block(int b) const { return blocks_[static_cast<std::size_t>(b)]; }
  Matrix& block(int b) { return blocks_[static_cast<std::size_t>(b)]; }
  std::span<const Matrix> blocks() const noexcept { return blocks_; }

  std::optional<bool> hermitian_hint() const noexcept { return hermitian_hint_; }
  void set_hermitian_hint(std::optional<bool> hint) { hermitian_hint_ = hint; }

  /// Blocks concatenated, each in column-major order.
  Vector vectorize() const;

  Element adjoint() const;
  double max_abs_entry() const;
  /// max |(x - x*)_{ij}| <= tol * (1 + max |x_{ij}|)
  bool is_hermitian(double tol = kDefaultTolerance) const;
  bool all_finite() const;

  Element& operator+=(const Element& o);
  Element& operator-=(const Element& o);
  Element& operator*=(Complex s);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator-(Element a) { return a *= Complex(-1.0); }
  friend Element operator*(Element a, Complex s) { return a *= s; }
  friend Element operator*(Complex s, Element a) { return a *= s; }
  friend Element operator*(Element a, double s) { return a *= Complex(s); }
  friend Element operator*(double s, Element a) { return a *= Complex(s); }
  /// Algebra product.
  friend Element operator*(const Element& a, const Element& b);

 private:
  void require_same_algebra(const Element& o) const;

  AlgebraPtr algebra_;
  std::vector<Matrix> blocks_;
  std::optional<bool> hermitian_hint_;
};

bool same_algebra(const Element& a, const Element& b);

/// max |(a - b)_{ij}| over all blocks.
double max_abs_difference(const Element& a, const Element& b);

/// Eigen-decomposition of the Hermitian part (x + x*)/2, block by block.
struct HermitianSpectrum {
  std::vector<Eigen::VectorXd> values;  // ascending per block
  std::vector<Matrix> vectors;
};

HermitianSpectrum hermitian_spectrum(const Element& x);

/// f(x) for Hermitian x through its eigen-decomposition.
Element functional_calculus(const Element& x, const std::function<double(double)>& f);

/// tau(x) = sum_b w_b tr(x_b)
Complex trace(const Element& x);

/// |x| = (x* x)^{1/2}
Element modulus(const Element& x);

/// [tau(|x|^p)]^{1/p}; p = kInfinity gives the operator norm.
double lp_norm(const Element& x, double p);

double operator_norm(const Element& x);

/// (x + x*)/2 and (x - x*)/(2i); x = re + i im.
Element real_part(const Element& x);
Element imag_part(const Element& x);

/// Positive and negative parts of a Hermitian element, h = h+ - h-.
Element positive_part(const Element& h);
Element negative_part(const Element& h);

/// Positives x0..x3 with x = x0 + i x1 - x2 - i x3.
std::array<Element, 4> decompose_four_positives(const Element& x);

/// Inverse of decompose_four_positives.
Element recompose_four_positives(const std::array<Element, 4>& parts);

double min_eigenvalue(const Element& h);
double max_eigenvalue(const Element& h);

/// Hermitian within tol and smallest eigenvalue >= -tol.
bool is_positive(const Element& x, double tol = kDefaultTolerance);

/// An orthogonal projection of the algebra; validated on construction.
class Projection {
 public:
  explicit Projection(Element e);

  static Projection identity(AlgebraPtr algebra);

  const Element& element() const noexcept { return e_; }
  /// e-perp = 1 - e
  Element complement() const;
  /// tau(1 - e)
  double trace_complement() const;
  /// x -> e x e
  Element compress(const Element& x) const;

 private:
  Element e_;
};

struct SpectralProjection {
  Projection projection;
  /// One entry per eigenvalue lying within 1e-10 of an interval endpoint.
  std::vector<std::string> warnings;
};

/// Projection onto eigenvectors of Hermitian x with eigenvalue in [lo, hi].
SpectralProjection spectral_projection(const Element& x, double lo, double hi);

}  // namespace nclab
