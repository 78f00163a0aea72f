#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nclab/algebra.hpp"
#include "nclab/multi_index.hpp"

namespace nclab {

class AbsoluteContraction;

enum class ContractionKind {
  scaled_unitary,
  pinching,
  schur_multiplier,
  kraus,
  convex_combination,
  composition,
  transfer,
};

std::string_view to_string(ContractionKind kind);
ContractionKind contraction_kind_from_string(std::string_view name);

/// x -> s U* x U, 0 < s <= 1.
struct ScaledUnitarySpec {
  Element unitary;
  double scale = 1.0;
};

/// x -> sum_i P_i x P_i with sum_i P_i <= 1.
struct PinchingSpec {
  std::vector<Element> projections;
};

/// x -> H o x (entrywise), H >= 0 with diag(H) <= 1. Single-block algebras only.
struct SchurMultiplierSpec {
  Matrix coefficients;
};

/// x -> sum_j K_j* x K_j with sum K_j* K_j <= 1 and sum K_j K_j* <= 1.
struct KrausSpec {
  std::vector<Element> operators;
};

/// x -> sum_i w_i T_i(x), w_i >= 0, sum w_i <= 1.
struct ConvexCombinationSpec {
  std::vector<double> weights;
  std::vector<AbsoluteContraction> maps;
};

/// maps[0] is applied first.
struct CompositionSpec {
  std::vector<AbsoluteContraction> maps;
};

/// Raw linear map given by its matrix on Element::vectorize() coordinates.
struct TransferSpec {
  Matrix transfer;
};

using ContractionSpec = std::variant<ScaledUnitarySpec, PinchingSpec, SchurMultiplierSpec, KrausSpec,
                                     ConvexCombinationSpec, CompositionSpec, TransferSpec>;

struct VerificationReport {
  /// min eigenvalue of 1 - T(1)
  double subunital_margin = 0.0;
  /// min eigenvalue of 1 - T^dagger(1), T^dagger the tau-adjoint
  double trace_margin = 0.0;
  /// min eigenvalue of the Choi matrix
  double choi_min_eig = 0.0;
  bool hermiticity_preserving = true;
  bool passed = false;
  /// Empty when passed; otherwise names the failing condition.
  std::string failure;
};

/// Linear map with the defining properties of an absolute contraction:
/// T(1) <= 1, positivity (complete positivity for the built-in kinds) and
/// tau o T <= tau. Immutable and cheap to copy.
class AbsoluteContraction {
 public:
  AbsoluteContraction() = default;

  ContractionKind kind() const;
  const AlgebraPtr& algebra() const;
  const ContractionSpec& spec() const;

  Element apply(const Element& x) const;
  /// Applies the map k times.
  Element apply_repeated(const Element& x, int k) const;

  /// Matrix of the map on vectorize() coordinates.
  const Matrix& transfer_matrix() const;
  const VerificationReport& verification() const;
  /// False for raw maps whose Choi matrix is not positive semidefinite.
  bool positivity_verified() const;

  bool valid() const noexcept { return impl_ != nullptr; }

 private:
  struct Impl;
  explicit AbsoluteContraction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend struct ContractionAccess;

  std::shared_ptr<const Impl> impl_;
};

/// Validates the sufficient conditions of the kind and returns the map.
/// Throws ContractionRejected naming the failing inequality, UnsupportedError
/// for Schur multipliers on multi-block algebras and StructuralError for
/// malformed parameters or raw maps that do not preserve Hermiticity.
AbsoluteContraction construct_contraction(const AlgebraPtr& algebra, ContractionSpec spec,
                                          double tol = kDefaultTolerance);

using LinearMapFn = std::function<Element(const Element&)>;

/// Checks T(1) <= 1, T^dagger(1) <= 1 and Choi positivity for any linear map.
VerificationReport verify_linear_map(const AlgebraPtr& algebra, const LinearMapFn& map,
                                     double tol = kDefaultTolerance);
VerificationReport verify_absolute_contraction(const AbsoluteContraction& t, double tol = kDefaultTolerance);
VerificationReport verify_transfer_matrix(const AlgebraPtr& algebra, const Matrix& transfer,
                                          double tol = kDefaultTolerance);

/// Choi matrix sum_{ij} e_ij (x) T(e_ij) over matrix units inside the blocks,
/// as a matrix of size (sum n_b)^2.
Matrix choi_matrix(const AlgebraPtr& algebra, const LinearMapFn& map);

/// Matrix of a linear map on vectorize() coordinates.
Matrix transfer_matrix_of(const AlgebraPtr& algebra, const LinearMapFn& map);

/// T^k = T_d^{k_d} ... T_1^{k_1}; T_1 is applied first.
Element apply_power(std::span<const AbsoluteContraction> maps, const MultiIndex& k, const Element& x);

/// A linear operator on the algebra given by its transfer matrix.
class LinearOperator {
 public:
  LinearOperator() = default;
  LinearOperator(AlgebraPtr algebra, Matrix transfer);

  static LinearOperator identity(const AlgebraPtr& algebra);
  static LinearOperator zero(const AlgebraPtr& algebra);

  const AlgebraPtr& algebra() const noexcept { return algebra_; }
  const Matrix& transfer() const noexcept { return transfer_; }
  Element apply(const Element& x) const;
  /// (this o inner)(x) = this(inner(x))
  LinearOperator after(const LinearOperator& inner) const;
  /// Largest entry of P^2 - P.
  double idempotency_defect() const;
  int rank(double tol = 1e-8) const;

 private:
  AlgebraPtr algebra_;
  Matrix transfer_;
};

struct CesaroLimit {
  LinearOperator projection;
  /// Dimension of the fixed space of lambda T.
  int fixed_dimension = 0;
  /// Set when a near-fixed direction (1e-10 < defect <= 1e-8) was seen.
  std::optional<std::string> warning;
};

/// Norm limit of (1/N) sum_{k=1}^N (lambda T)^k: the projection onto the
/// fixed space of lambda T, orthogonal in L_2(tau).
CesaroLimit cesaro_limit_projection(const AbsoluteContraction& t, Complex lambda);

}  // namespace nclab
