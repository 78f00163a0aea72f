#include "nclab/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nclab/errors.hpp"

namespace nclab {

namespace {

constexpr double kUnitaryTolerance = 1e-10;
constexpr double kFixedSpaceTolerance = 1e-10;
constexpr double kIllConditionedTolerance = 1e-8;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void require_algebra(const AlgebraPtr& algebra, const Element& x, const char* what) {
  if (x.empty() || !(x.algebra() == *algebra)) {
    throw StructuralError(std::string(what) + " is not an element of the contraction's algebra");
  }
}

double hermitian_min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed");
  return es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 0.0;
}

}  // namespace

std::string_view to_string(ContractionKind kind) {
  switch (kind) {
    case ContractionKind::scaled_unitary: return "scaled_unitary";
    case ContractionKind::pinching: return "pinching";
    case ContractionKind::schur_multiplier: return "schur_multiplier";
    case ContractionKind::kraus: return "kraus";
    case ContractionKind::convex_combination: return "convex_combination";
    case ContractionKind::composition: return "composition";
    case ContractionKind::transfer: return "transfer";
  }
  return "unknown";
}

ContractionKind contraction_kind_from_string(std::string_view name) {
  for (auto k : {ContractionKind::scaled_unitary, ContractionKind::pinching, ContractionKind::schur_multiplier,
                 ContractionKind::kraus, ContractionKind::convex_combination, ContractionKind::composition,
                 ContractionKind::transfer}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown contraction kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

struct AbsoluteContraction::Impl {
  AlgebraPtr algebra;
  ContractionSpec spec;
  Matrix transfer;
  VerificationReport report;

  Element apply(const Element& x) const {
    return std::visit([&](const auto& s) { return apply_kind(s, x); }, spec);
  }

  Element apply_kind(const ScaledUnitarySpec& s, const Element& x) const {
    return s.scale * (s.unitary.adjoint() * x * s.unitary);
  }

  Element apply_kind(const PinchingSpec& s, const Element& x) const {
    Element out = Element::zero(algebra);
    for (const auto& p : s.projections) out += p * x * p;
    return out;
  }

  Element apply_kind(const SchurMultiplierSpec& s, const Element& x) const {
    std::vector<Matrix> blocks{s.coefficients.cwiseProduct(x.block(0))};
    return Element(algebra, std::move(blocks));
  }

  Element apply_kind(const KrausSpec& s, const Element& x) const {
    Element out = Element::zero(algebra);
    for (const auto& k : s.operators) out += k.adjoint() * x * k;
    return out;
  }

  Element apply_kind(const ConvexCombinationSpec& s, const Element& x) const {
    Element out = Element::zero(algebra);
    for (std::size_t i = 0; i < s.maps.size(); ++i) out += s.weights[i] * s.maps[i].apply(x);
    return out;
  }

  Element apply_kind(const CompositionSpec& s, const Element& x) const {
    Element y = x;
    for (const auto& m : s.maps) y = m.apply(y);
    return y;
  }

  Element apply_kind(const TransferSpec& s, const Element& x) const {
    return Element::from_vector(algebra, s.transfer * x.vectorize());
  }
};

ContractionKind AbsoluteContraction::kind() const {
  return static_cast<ContractionKind>(impl_->spec.index());
}

const AlgebraPtr& AbsoluteContraction::algebra() const { return impl_->algebra; }
const ContractionSpec& AbsoluteContraction::spec() const { return impl_->spec; }
const Matrix& AbsoluteContraction::transfer_matrix() const { return impl_->transfer; }
const VerificationReport& AbsoluteContraction::verification() const { return impl_->report; }
bool AbsoluteContraction::positivity_verified() const { return impl_->report.choi_min_eig >= -kDefaultTolerance; }

Element AbsoluteContraction::apply(const Element& x) const {
  if (!impl_) throw StructuralError("empty contraction");
  require_algebra(impl_->algebra, x, "argument");
  return impl_->apply(x);
}

Element AbsoluteContraction::apply_repeated(const Element& x, int k) const {
  if (k < 0) throw DomainError("negative power");
  Element y = x;
  for (int i = 0; i < k; ++i) y = apply(y);
  return y;
}

// ---------------------------------------------------------------------------

Matrix transfer_matrix_of(const AlgebraPtr& algebra, const LinearMapFn& map) {
  const int dim = algebra->vector_dim();
  Matrix t(dim, dim);
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int col = algebra->vector_offset(b) + j * n + i;
        t.col(col) = map(Element::unit(algebra, b, i, j)).vectorize();
      }
    }
  }
  return t;
}

Matrix choi_matrix(const AlgebraPtr& algebra, const LinearMapFn& map) {
  const int n = algebra->matrix_dim();
  Matrix c = Matrix::Zero(n * n, n * n);
  int start = 0;
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int nb = algebra->block_dim(b);
    for (int i = 0; i < nb; ++i) {
      for (int j = 0; j < nb; ++j) {
        const Element img = map(Element::unit(algebra, b, i, j));
        // Place T(e_ij) as a full n x n block-diagonal matrix in the (i, j) slot.
        const int gi = start + i;
        const int gj = start + j;
        int off = 0;
        for (int c2 = 0; c2 < algebra->block_count(); ++c2) {
          const int nc = algebra->block_dim(c2);
          c.block(gi * n + off, gj * n + off, nc, nc) = img.block(c2);
          off += nc;
        }
      }
    }
    start += nb;
  }
  return c;
}

VerificationReport verify_linear_map(const AlgebraPtr& algebra, const LinearMapFn& map, double tol) {
  VerificationReport r;
  const Element one = Element::identity(algebra);

  const Matrix choi = choi_matrix(algebra, map);
  const double scale = 1.0 + choi.cwiseAbs().maxCoeff();
  const double herm_dev = (choi - choi.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > tol * scale) {
    r.hermiticity_preserving = false;
    r.passed = false;
    r.failure = "structural: map does not preserve Hermiticity (Choi asymmetry " + describe(herm_dev) + ")";
    r.subunital_margin = r.trace_margin = r.choi_min_eig = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.choi_min_eig = hermitian_min_eig(choi);

  r.subunital_margin = min_eigenvalue(one - map(one));

  // tau(T(e_ij)) = tau(e_ij T^dagger(1)) = w_b T^dagger(1)_{ji}
  std::vector<Matrix> adj;
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(j, i) = trace(map(Element::unit(algebra, b, i, j))) / algebra->weight(b);
    }
    adj.push_back(std::move(m));
  }
  const Element adjoint_one(algebra, std::move(adj));
  r.trace_margin = min_eigenvalue(one - adjoint_one);

  std::vector<std::string> failures;
  if (r.subunital_margin < -tol) failures.push_back("contraction condition T(1) <= 1 (margin " + describe(r.subunital_margin) + ")");
  if (r.trace_margin < -tol) failures.push_back("trace condition tau o T <= tau (margin " + describe(r.trace_margin) + ")");
  if (r.choi_min_eig < -tol) failures.push_back("complete positivity (Choi min eigenvalue " + describe(r.choi_min_eig) + ")");
  r.passed = failures.empty();
  for (std::size_t i = 0; i < failures.size(); ++i) r.failure += (i ? "; " : "") + failures[i];
  return r;
}

VerificationReport verify_absolute_contraction(const AbsoluteContraction& t, double tol) {
  return verify_linear_map(t.algebra(), [&](const Element& x) { return t.apply(x); }, tol);
}

VerificationReport verify_transfer_matrix(const AlgebraPtr& algebra, const Matrix& transfer, double tol) {
  if (transfer.rows() != algebra->vector_dim() || transfer.cols() != algebra->vector_dim()) {
    throw StructuralError("transfer matrix has the wrong size for the algebra");
  }
  return verify_linear_map(
      algebra, [&](const Element& x) { return Element::from_vector(algebra, transfer * x.vectorize()); }, tol);
}

// ---------------------------------------------------------------------------

namespace {

void check_spec(const AlgebraPtr& algebra, const ScaledUnitarySpec& s, double) {
  require_algebra(algebra, s.unitary, "unitary");
  if (!(s.scale > 0.0 && s.scale <= 1.0)) {
    throw ContractionRejected("scale in (0,1]", "scale = " + describe(s.scale));
  }
  const Element one = Element::identity(algebra);
  const double dev = std::max(operator_norm(s.unitary.adjoint() * s.unitary - one),
                              operator_norm(s.unitary * s.unitary.adjoint() - one));
  if (dev > kUnitaryTolerance) throw ContractionRejected("U unitary", "|U*U - 1| = " + describe(dev));
}

void check_spec(const AlgebraPtr& algebra, const PinchingSpec& s, double tol) {
  if (s.projections.empty()) throw StructuralError("pinching needs at least one projection");
  Element sum = Element::zero(algebra);
  for (const auto& p : s.projections) {
    require_algebra(algebra, p, "pinching projection");
    Projection checked(p);
    sum += checked.element();
  }
  const double margin = min_eigenvalue(Element::identity(algebra) - sum);
  if (margin < -tol) throw ContractionRejected("sum P_i <= 1", "min eigenvalue of 1 - sum P_i = " + describe(margin));
}

void check_spec(const AlgebraPtr& algebra, const SchurMultiplierSpec& s, double tol) {
  if (algebra->block_count() != 1) throw UnsupportedError("Schur multipliers need a single-block algebra");
  const int n = algebra->block_dim(0);
  if (s.coefficients.rows() != n || s.coefficients.cols() != n) {
    throw StructuralError("Schur coefficient matrix has the wrong size");
  }
  const double herm = (s.coefficients - s.coefficients.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol * (1.0 + s.coefficients.cwiseAbs().maxCoeff())) {
    throw ContractionRejected("H >= 0", "coefficient matrix is not Hermitian");
  }
  const double m = hermitian_min_eig(s.coefficients);
  if (m < -tol) throw ContractionRejected("H >= 0", "min eigenvalue " + describe(m));
  for (int i = 0; i < n; ++i) {
    if (s.coefficients(i, i).real() > 1.0 + tol) {
      throw ContractionRejected("diag(H) <= 1", "H_" + std::to_string(i) + std::to_string(i) + " = " +
                                                   describe(s.coefficients(i, i).real()));
    }
  }
}

void check_spec(const AlgebraPtr& algebra, const KrausSpec& s, double tol) {
  if (s.operators.empty()) throw StructuralError("Kraus map needs at least one operator");
  Element left = Element::zero(algebra);
  Element right = Element::zero(algebra);
  for (const auto& k : s.operators) {
    require_algebra(algebra, k, "Kraus operator");
    left += k.adjoint() * k;
    right += k * k.adjoint();
  }
  const Element one = Element::identity(algebra);
  const double m1 = min_eigenvalue(one - left);
  if (m1 < -tol) {
    throw ContractionRejected("contraction condition sum K_j* K_j <= 1",
                              "min eigenvalue of 1 - sum K_j* K_j = " + describe(m1));
  }
  const double m2 = min_eigenvalue(one - right);
  if (m2 < -tol) {
    throw ContractionRejected("trace condition sum K_j K_j* <= 1",
                              "min eigenvalue of 1 - sum K_j K_j* = " + describe(m2));
  }
}

void check_spec(const AlgebraPtr& algebra, const ConvexCombinationSpec& s, double tol) {
  if (s.maps.empty() || s.maps.size() != s.weights.size()) {
    throw StructuralError("convex combination needs one weight per map");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < s.maps.size(); ++i) {
    if (!s.maps[i].valid() || !(*s.maps[i].algebra() == *algebra)) {
      throw StructuralError("convex combination member acts on a different algebra");
    }
    if (!(s.weights[i] >= 0.0)) throw ContractionRejected("weights >= 0", "weight " + describe(s.weights[i]));
    total += s.weights[i];
  }
  if (total > 1.0 + tol) throw ContractionRejected("sum of weights <= 1", "sum = " + describe(total));
}

void check_spec(const AlgebraPtr& algebra, const CompositionSpec& s, double) {
  if (s.maps.empty()) throw StructuralError("composition needs at least one map");
  for (const auto& m : s.maps) {
    if (!m.valid() || !(*m.algebra() == *algebra)) {
      throw StructuralError("composition member acts on a different algebra");
    }
  }
}

void check_spec(const AlgebraPtr& algebra, const TransferSpec& s, double) {
  if (s.transfer.rows() != algebra->vector_dim() || s.transfer.cols() != algebra->vector_dim()) {
    throw StructuralError("transfer matrix has the wrong size for the algebra");
  }
  if (!s.transfer.allFinite()) throw NumericError("transfer matrix has non-finite entries");
}

}  // namespace

struct ContractionAccess {
  static AbsoluteContraction build(const AlgebraPtr& algebra, ContractionSpec spec, double tol);
};

AbsoluteContraction ContractionAccess::build(const AlgebraPtr& algebra, ContractionSpec spec, double tol) {
  if (!algebra) throw StructuralError("contraction without algebra");
  std::visit([&](const auto& s) { check_spec(algebra, s, tol); }, spec);

  auto impl = std::make_shared<AbsoluteContraction::Impl>();
  impl->algebra = algebra;
  impl->spec = std::move(spec);
  const auto* raw = impl.get();
  const LinearMapFn fn = [raw](const Element& x) { return raw->apply(x); };
  impl->transfer = transfer_matrix_of(algebra, fn);
  impl->report = verify_linear_map(algebra, fn, tol);

  const auto& r = impl->report;
  if (!r.hermiticity_preserving) throw StructuralError(r.failure);
  if (r.subunital_margin < -tol) {
    throw ContractionRejected("contraction condition T(1) <= 1", "margin " + describe(r.subunital_margin));
  }
  if (r.trace_margin < -tol) {
    throw ContractionRejected("trace condition tau o T <= tau", "margin " + describe(r.trace_margin));
  }
  if (r.choi_min_eig < -tol && !std::holds_alternative<TransferSpec>(impl->spec)) {
    // Built-in kinds are completely positive by construction; reaching here is a numerical failure.
    throw NumericError("constructed map failed the complete positivity check: " + r.failure);
  }
  return AbsoluteContraction(std::move(impl));
}

AbsoluteContraction construct_contraction(const AlgebraPtr& algebra, ContractionSpec spec, double tol) {
  return ContractionAccess::build(algebra, std::move(spec), tol);
}

Element apply_power(std::span<const AbsoluteContraction> maps, const MultiIndex& k, const Element& x) {
  if (static_cast<int>(maps.size()) != k.dimension()) {
    throw StructuralError("multi-index dimension " + std::to_string(k.dimension()) + " does not match " +
                          std::to_string(maps.size()) + " contractions");
  }
  Element y = x;
  for (int i = 0; i < k.dimension(); ++i) {
    if (k[i] < 0) throw DomainError("apply_power: negative exponent");
    y = maps[static_cast<std::size_t>(i)].apply_repeated(y, k[i]);
  }
  return y;
}

// ---------------------------------------------------------------------------

LinearOperator::LinearOperator(AlgebraPtr algebra, Matrix transfer)
    : algebra_(std::move(algebra)), transfer_(std::move(transfer)) {
  if (transfer_.rows() != algebra_->vector_dim() || transfer_.cols() != algebra_->vector_dim()) {
    throw StructuralError("operator matrix has the wrong size for the algebra");
  }
}

LinearOperator LinearOperator::identity(const AlgebraPtr& algebra) {
  return {algebra, Matrix::Identity(algebra->vector_dim(), algebra->vector_dim())};
}

LinearOperator LinearOperator::zero(const AlgebraPtr& algebra) {
  return {algebra, Matrix::Zero(algebra->vector_dim(), algebra->vector_dim())};
}

Element LinearOperator::apply(const Element& x) const {
  require_algebra(algebra_, x, "argument");
  return Element::from_vector(algebra_, transfer_ * x.vectorize());
}

LinearOperator LinearOperator::after(const LinearOperator& inner) const {
  if (!(*algebra_ == *inner.algebra_)) throw StructuralError("operators act on different algebras");
  return {algebra_, transfer_ * inner.transfer_};
}

double LinearOperator::idempotency_defect() const {
  if (transfer_.size() == 0) return 0.0;
  return (transfer_ * transfer_ - transfer_).cwiseAbs().maxCoeff();
}

int LinearOperator::rank(double tol) const {
  Eigen::JacobiSVD<Matrix> svd(transfer_);
  int r = 0;
  for (double s : svd.singularValues()) r += s > tol ? 1 : 0;
  return r;
}

CesaroLimit cesaro_limit_projection(const AbsoluteContraction& t, Complex lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw DomainError("cesaro_limit_projection needs |lambda| = 1");
  const auto& algebra = t.algebra();
  const int dim = algebra->vector_dim();

  // Coordinates in which the L_2(tau) inner product is Euclidean.
  Eigen::VectorXd w(dim);
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    w.segment(algebra->vector_offset(b), n * n).setConstant(std::sqrt(algebra->weight(b)));
  }
  const Matrix scaled = w.cast<Complex>().asDiagonal() * (lambda * t.transfer_matrix()) *
                        w.cwiseInverse().cast<Complex>().asDiagonal();
  const Matrix defect = scaled - Matrix::Identity(dim, dim);
  Eigen::JacobiSVD<Matrix> svd(defect, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();

  CesaroLimit out;
  Matrix basis(dim, 0);
  std::vector<Eigen::Index> kept;
  double worst_near = -1.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] <= kFixedSpaceTolerance) {
      kept.push_back(i);
    } else if (sv[i] <= kIllConditionedTolerance) {
      worst_near = std::max(worst_near, sv[i]);
    }
  }
  Matrix v(dim, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(kept[c]);
  const Matrix p_scaled = v * v.adjoint();
  Matrix p = w.cwiseInverse().cast<Complex>().asDiagonal() * p_scaled * w.cast<Complex>().asDiagonal();
  out.projection = LinearOperator(algebra, std::move(p));
  out.fixed_dimension = static_cast<int>(kept.size());
  if (worst_near >= 0.0) {
    out.warning = "ill-conditioned: near-fixed direction with defect " + describe(worst_near) +
                  " (between 1e-10 and 1e-8) excluded from the fixed space";
  }
  return out;
}

}  // namespace nclab
