#include "nclab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nclab/errors.hpp"

namespace nclab {

namespace {

constexpr double kHintTolerance = 1e-12;
constexpr double kProjectionTolerance = 1e-10;
constexpr double kProjectionSpectrumTolerance = 1e-8;
constexpr double kEndpointTolerance = 1e-10;

Eigen::SelfAdjointEigenSolver<Matrix> solve_hermitian(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
  return es;
}

void require_finite(const Element& x, const char* what) {
  if (!x.all_finite()) throw NumericError(std::string(what) + ": element has non-finite entries");
}

}  // namespace

Algebra::Algebra(std::vector<int> block_dims, std::vector<double> trace_weights)
    : dims_(std::move(block_dims)), weights_(std::move(trace_weights)) {
  if (dims_.empty()) throw StructuralError("algebra needs at least one block");
  if (dims_.size() != weights_.size()) {
    throw StructuralError("algebra has " + std::to_string(dims_.size()) + " blocks but " +
                          std::to_string(weights_.size()) + " trace weights");
  }
  offsets_.reserve(dims_.size());
  for (std::size_t b = 0; b < dims_.size(); ++b) {
    if (dims_[b] < 1) throw StructuralError("block dimension must be >= 1");
    if (!(weights_[b] > 0.0) || !std::isfinite(weights_[b])) {
      throw StructuralError("trace weight must be finite and > 0");
    }
    offsets_.push_back(vector_dim_);
    total_trace_ += weights_[b] * dims_[b];
    matrix_dim_ += dims_[b];
    vector_dim_ += dims_[b] * dims_[b];
  }
}

std::shared_ptr<const Algebra> Algebra::make(std::vector<int> block_dims,
                                             std::vector<double> trace_weights) {
  return std::make_shared<const Algebra>(std::move(block_dims), std::move(trace_weights));
}

std::shared_ptr<const Algebra> Algebra::full(int n) { return make({n}, {1.0}); }

std::shared_ptr<const Algebra> Algebra::diagonal(int n, std::vector<double> weights) {
  if (weights.empty()) weights.assign(static_cast<std::size_t>(n), 1.0);
  return make(std::vector<int>(static_cast<std::size_t>(n), 1), std::move(weights));
}

// ---------------------------------------------------------------------------

Element::Element(AlgebraPtr algebra, std::vector<Matrix> blocks, std::optional<bool> hermitian_hint)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)), hermitian_hint_(hermitian_hint) {
  if (!algebra_) throw StructuralError("element without algebra");
  if (static_cast<int>(blocks_.size()) != algebra_->block_count()) {
    throw StructuralError("element has " + std::to_string(blocks_.size()) +
                          " blocks, algebra expects " + std::to_string(algebra_->block_count()));
  }
  for (int b = 0; b < algebra_->block_count(); ++b) {
    const auto& m = blocks_[static_cast<std::size_t>(b)];
    const int n = algebra_->block_dim(b);
    if (m.rows() != n || m.cols() != n) {
      throw StructuralError("block " + std::to_string(b) + " has shape " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            ", expected " + std::to_string(n) + "x" + std::to_string(n));
    }
  }
  if (hermitian_hint_.value_or(false) && !is_hermitian(kHintTolerance)) {
    throw StructuralError("element marked Hermitian is not Hermitian");
  }
}

Element Element::zero(AlgebraPtr algebra) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra->block_count(); ++b) {
    blocks.push_back(Matrix::Zero(algebra->block_dim(b), algebra->block_dim(b)));
  }
  return Element(std::move(algebra), std::move(blocks), true);
}

Element Element::identity(AlgebraPtr algebra) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra->block_count(); ++b) {
    blocks.push_back(Matrix::Identity(algebra->block_dim(b), algebra->block_dim(b)));
  }
  return Element(std::move(algebra), std::move(blocks), true);
}

Element Element::unit(AlgebraPtr algebra, int b, int i, int j) {
  Element e = zero(std::move(algebra));
  if (b < 0 || b >= e.block_count()) throw StructuralError("matrix unit block out of range");
  const int n = e.algebra().block_dim(b);
  if (i < 0 || j < 0 || i >= n || j >= n) throw StructuralError("matrix unit index out of range");
  e.block(b)(i, j) = 1.0;
  e.hermitian_hint_ = (i == j) ? std::optional<bool>(true) : std::nullopt;
  return e;
}

Element Element::diagonal(AlgebraPtr algebra, const std::vector<std::vector<double>>& diag) {
  if (static_cast<int>(diag.size()) != algebra->block_count()) {
    throw StructuralError("diagonal: one entry list per block expected");
  }
  Element e = zero(algebra);
  for (int b = 0; b < algebra->block_count(); ++b) {
    const auto& d = diag[static_cast<std::size_t>(b)];
    if (static_cast<int>(d.size()) != algebra->block_dim(b)) {
      throw StructuralError("diagonal: wrong entry count for block " + std::to_string(b));
    }
    for (int i = 0; i < algebra->block_dim(b); ++i) e.block(b)(i, i) = d[static_cast<std::size_t>(i)];
  }
  return e;
}

Element Element::from_vector(AlgebraPtr algebra, const Vector& v) {
  if (v.size() != algebra->vector_dim()) throw StructuralError("vector length does not match algebra");
  std::vector<Matrix> blocks;
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    blocks.push_back(Eigen::Map<const Matrix>(v.data() + algebra->vector_offset(b), n, n));
  }
  return Element(std::move(algebra), std::move(blocks));
}

Vector Element::vectorize() const {
  Vector v(algebra_->vector_dim());
  for (int b = 0; b < block_count(); ++b) {
    const int n = algebra_->block_dim(b);
    Eigen::Map<Matrix>(v.data() + algebra_->vector_offset(b), n, n) = block(b);
  }
  return v;
}

Element Element::adjoint() const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& m : blocks_) out.push_back(m.adjoint());
  return Element(algebra_, std::move(out), hermitian_hint_);
}

double Element::max_abs_entry() const {
  double m = 0.0;
  for (const auto& b : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

bool Element::is_hermitian(double tol) const {
  double dev = 0.0;
  for (const auto& b : blocks_) dev = std::max(dev, (b - b.adjoint()).cwiseAbs().maxCoeff());
  return dev <= tol * (1.0 + max_abs_entry());
}

bool Element::all_finite() const {
  for (const auto& b : blocks_) {
    if (!b.allFinite()) return false;
  }
  return true;
}

void Element::require_same_algebra(const Element& o) const {
  if (!same_algebra(*this, o)) throw StructuralError("elements belong to different algebras");
}

Element& Element::operator+=(const Element& o) {
  require_same_algebra(o);
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += o.blocks_[b];
  hermitian_hint_ = (hermitian_hint_.value_or(false) && o.hermitian_hint_.value_or(false))
                        ? std::optional<bool>(true)
                        : std::nullopt;
  return *this;
}

Element& Element::operator-=(const Element& o) {
  require_same_algebra(o);
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] -= o.blocks_[b];
  hermitian_hint_ = (hermitian_hint_.value_or(false) && o.hermitian_hint_.value_or(false))
                        ? std::optional<bool>(true)
                        : std::nullopt;
  return *this;
}

Element& Element::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  if (s.imag() != 0.0) hermitian_hint_.reset();
  return *this;
}

Element operator*(const Element& a, const Element& b) {
  a.require_same_algebra(b);
  std::vector<Matrix> out;
  out.reserve(a.blocks_.size());
  for (std::size_t i = 0; i < a.blocks_.size(); ++i) out.push_back(a.blocks_[i] * b.blocks_[i]);
  return Element(a.algebra_, std::move(out));
}

bool same_algebra(const Element& a, const Element& b) {
  if (!a.algebra_ptr() || !b.algebra_ptr()) return false;
  return a.algebra_ptr() == b.algebra_ptr() || a.algebra() == b.algebra();
}

double max_abs_difference(const Element& a, const Element& b) {
  if (!same_algebra(a, b)) throw StructuralError("elements belong to different algebras");
  double m = 0.0;
  for (int i = 0; i < a.block_count(); ++i) m = std::max(m, (a.block(i) - b.block(i)).cwiseAbs().maxCoeff());
  return m;
}

// ---------------------------------------------------------------------------

HermitianSpectrum hermitian_spectrum(const Element& x) {
  require_finite(x, "spectrum");
  HermitianSpectrum s;
  for (int b = 0; b < x.block_count(); ++b) {
    auto es = solve_hermitian(x.block(b));
    s.values.push_back(es.eigenvalues());
    s.vectors.push_back(es.eigenvectors());
  }
  return s;
}

Element functional_calculus(const Element& x, const std::function<double(double)>& f) {
  const auto s = hermitian_spectrum(x);
  std::vector<Matrix> out;
  for (int b = 0; b < x.block_count(); ++b) {
    const auto& v = s.vectors[static_cast<std::size_t>(b)];
    Eigen::VectorXd fv = s.values[static_cast<std::size_t>(b)].unaryExpr(f);
    Matrix m = v * fv.cast<Complex>().asDiagonal() * v.adjoint();
    out.push_back(0.5 * (m + m.adjoint()));
  }
  return Element(x.algebra_ptr(), std::move(out), true);
}

Complex trace(const Element& x) {
  Complex t = 0.0;
  for (int b = 0; b < x.block_count(); ++b) t += x.algebra().weight(b) * x.block(b).trace();
  return t;
}

Element modulus(const Element& x) {
  require_finite(x, "modulus");
  std::vector<Matrix> out;
  for (int b = 0; b < x.block_count(); ++b) {
    auto es = solve_hermitian(x.block(b).adjoint() * x.block(b));
    Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix m = es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    out.push_back(0.5 * (m + m.adjoint()));
  }
  return Element(x.algebra_ptr(), std::move(out), true);
}

double lp_norm(const Element& x, double p) {
  if (std::isnan(p) || p < 1.0) throw DomainError("lp_norm requires p >= 1");
  require_finite(x, "lp_norm");
  std::vector<Eigen::VectorXd> sv;
  double smax = 0.0;
  for (int b = 0; b < x.block_count(); ++b) {
    Eigen::JacobiSVD<Matrix> svd(x.block(b));
    sv.push_back(svd.singularValues());
    if (sv.back().size() > 0) smax = std::max(smax, sv.back().maxCoeff());
  }
  if (p == kInfinity || smax == 0.0) return smax;
  // Scaled by the largest singular value so large p does not overflow.
  double acc = 0.0;
  for (int b = 0; b < x.block_count(); ++b) {
    double blk = 0.0;
    for (double s : sv[static_cast<std::size_t>(b)]) blk += std::pow(s / smax, p);
    acc += x.algebra().weight(b) * blk;
  }
  return smax * std::pow(acc, 1.0 / p);
}

double operator_norm(const Element& x) { return lp_norm(x, kInfinity); }

Element real_part(const Element& x) {
  Element r = (x + x.adjoint()) * 0.5;
  for (int b = 0; b < r.block_count(); ++b) r.block(b) = 0.5 * (r.block(b) + r.block(b).adjoint());
  r.set_hermitian_hint(true);
  return r;
}

Element imag_part(const Element& x) {
  Element r = (x - x.adjoint()) * Complex(0.0, -0.5);
  for (int b = 0; b < r.block_count(); ++b) r.block(b) = 0.5 * (r.block(b) + r.block(b).adjoint());
  r.set_hermitian_hint(true);
  return r;
}

Element positive_part(const Element& h) {
  return functional_calculus(h, [](double t) { return t > 0.0 ? t : 0.0; });
}

Element negative_part(const Element& h) {
  return functional_calculus(h, [](double t) { return t < 0.0 ? -t : 0.0; });
}

std::array<Element, 4> decompose_four_positives(const Element& x) {
  const Element re = real_part(x);
  const Element im = imag_part(x);
  return {positive_part(re), positive_part(im), negative_part(re), negative_part(im)};
}

Element recompose_four_positives(const std::array<Element, 4>& parts) {
  const Complex i(0.0, 1.0);
  return parts[0] + i * parts[1] - parts[2] - i * parts[3];
}

double min_eigenvalue(const Element& h) {
  const auto s = hermitian_spectrum(h);
  double m = kInfinity;
  for (const auto& v : s.values) m = std::min(m, v.minCoeff());
  return m;
}

double max_eigenvalue(const Element& h) {
  const auto s = hermitian_spectrum(h);
  double m = -kInfinity;
  for (const auto& v : s.values) m = std::max(m, v.maxCoeff());
  return m;
}

bool is_positive(const Element& x, double tol) {
  if (!x.all_finite() || !x.is_hermitian(tol)) return false;
  return min_eigenvalue(x) >= -tol;
}

// ---------------------------------------------------------------------------

Projection::Projection(Element e) : e_(std::move(e)) {
  if (e_.empty()) throw StructuralError("projection without algebra");
  const double herm = operator_norm(e_ - e_.adjoint());
  const double idem = operator_norm(e_ * e_ - e_);
  if (herm > kProjectionTolerance || idem > kProjectionTolerance) {
    std::ostringstream os;
    os << "not a projection: |e - e*| = " << herm << ", |e^2 - e| = " << idem;
    throw StructuralError(os.str());
  }
  for (const auto& v : hermitian_spectrum(e_).values) {
    for (double l : v) {
      if (std::min(std::abs(l), std::abs(l - 1.0)) > kProjectionSpectrumTolerance) {
        throw StructuralError("projection has eigenvalue " + std::to_string(l));
      }
    }
  }
  e_.set_hermitian_hint(true);
}

Projection Projection::identity(AlgebraPtr algebra) { return Projection(Element::identity(std::move(algebra))); }

Element Projection::complement() const {
  Element c = Element::identity(e_.algebra_ptr()) - e_;
  c.set_hermitian_hint(true);
  return c;
}

double Projection::trace_complement() const { return trace(complement()).real(); }

Element Projection::compress(const Element& x) const { return e_ * x * e_; }

SpectralProjection spectral_projection(const Element& x, double lo, double hi) {
  if (!x.is_hermitian(kDefaultTolerance)) throw StructuralError("spectral_projection needs a Hermitian element");
  if (lo > hi) throw DomainError("spectral_projection: empty interval");
  const auto s = hermitian_spectrum(x);
  std::vector<std::string> warnings;
  std::vector<Matrix> out;
  for (int b = 0; b < x.block_count(); ++b) {
    const auto& vals = s.values[static_cast<std::size_t>(b)];
    const auto& vecs = s.vectors[static_cast<std::size_t>(b)];
    const int n = x.algebra().block_dim(b);
    Matrix e = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double l = vals[i];
      const bool near_lo = std::isfinite(lo) && std::abs(l - lo) <= kEndpointTolerance;
      const bool near_hi = std::isfinite(hi) && std::abs(l - hi) <= kEndpointTolerance;
      if (near_lo || near_hi) {
        std::ostringstream os;
        os.precision(17);
        os << "block " << b << ": eigenvalue " << l << " within 1e-10 of endpoint "
           << (near_lo ? lo : hi) << " (included)";
        warnings.push_back(os.str());
      }
      if ((l >= lo && l <= hi) || near_lo || near_hi) e += vecs.col(i) * vecs.col(i).adjoint();
    }
    out.push_back(0.5 * (e + e.adjoint()));
  }
  return {Projection(Element(x.algebra_ptr(), std::move(out), true)), std::move(warnings)};
}

}  // namespace nclab
