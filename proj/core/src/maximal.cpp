#include "nclab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nclab/errors.hpp"

namespace nclab {

namespace {

using Eigen::Index;
using RealVector = Eigen::VectorXd;


Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

struct Eig {
  RealVector values;
  Matrix vectors;
};

Eig eig(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
  if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix from_eig(const Eig& e, const std::function<double(double)>& f) {
  RealVector v = e.values.unaryExpr(f);
  return hermitize(e.vectors * v.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

double lambda_max(const Matrix& h) { return h.size() == 0 ? 0.0 : eig(h).values.maxCoeff(); }
double lambda_min(const Matrix& h) { return h.size() == 0 ? 0.0 : eig(h).values.minCoeff(); }

double conjugate_exponent(double p) {
  if (p == 1.0) return kInfinity;
  if (p == kInfinity) return 1.0;
  return p / (p - 1.0);
}

// Unweighted Schatten p-th power sum of a positive matrix, sum lambda^p.
double power_trace(const RealVector& values, double p) {
  double s = 0.0;
  for (double l : values) s += std::pow(std::max(l, 0.0), p);
  return s;
}

// ---------------------------------------------------------------------------
// Per-block problem data. Everything inside the solvers works on the block
// family divided by its largest operator norm.

struct Block {
  int n = 0;
  double weight = 1.0;
  double scale = 1.0;
  std::vector<Matrix> x;  // normalized, Hermitian
};

struct BlockSolution {
  Matrix a;                 // normalized
  std::vector<Matrix> rho;  // normalized dual for each family member
  Matrix rho0;              // dual for a >= 0
  std::string method;
  int iterations = 0;
  bool converged = true;
};

Matrix initial_point(const Block& blk, std::span<const int> active, double p) {
  double top = 0.0;
  Matrix sum = Matrix::Zero(blk.n, blk.n);
  for (int k : active) {
    const Eig e = eig(blk.x[static_cast<std::size_t>(k)]);
    top = std::max(top, e.values.maxCoeff());
    sum += from_eig(e, [](double l) { return std::max(l, 0.0); });
  }
  const Matrix flat = top * Matrix::Identity(blk.n, blk.n);
  const double pp = std::isfinite(p) ? p : 1.0;
  Matrix a0 = power_trace(eig(sum).values, pp) < power_trace(RealVector::Constant(blk.n, top), pp) ? sum : flat;
  const double delta = 1e-2 * std::max(top, 1e-12);
  a0 += delta * Matrix::Identity(blk.n, blk.n);
  return a0;
}

// Exact solution when the block family is simultaneously diagonalizable.
std::optional<BlockSolution> solve_commuting(const Block& blk, double p) {
  const std::size_t count = blk.x.size();
  for (int attempt = 0; attempt < 2; ++attempt) {
    Matrix combo = Matrix::Zero(blk.n, blk.n);
    for (std::size_t k = 0; k < count; ++k) {
      const double r = 1.0 + std::fmod(0.6180339887498949 * static_cast<double>(k + 1 + 7 * attempt), 1.0);
      combo += r * blk.x[k];
    }
    const Matrix u = eig(combo).vectors;
    bool ok = true;
    std::vector<RealVector> diag(count);
    for (std::size_t k = 0; k < count && ok; ++k) {
      Matrix m = u.adjoint() * blk.x[k] * u;
      diag[k] = m.diagonal().real();
      m.diagonal().setZero();
      ok = m.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + diag[k].cwiseAbs().maxCoeff());
    }
    if (!ok) continue;
    BlockSolution s;
    s.method = "commuting";
    RealVector alpha = RealVector::Zero(blk.n);
    std::vector<int> arg(static_cast<std::size_t>(blk.n), -1);
    for (int i = 0; i < blk.n; ++i) {
      for (std::size_t k = 0; k < count; ++k) {
        if (diag[k][i] > alpha[i]) {
          alpha[i] = diag[k][i];
          arg[static_cast<std::size_t>(i)] = static_cast<int>(k);
        }
      }
    }
    s.a = hermitize(u * alpha.cast<Complex>().asDiagonal() * u.adjoint());
    s.rho.assign(count, Matrix::Zero(blk.n, blk.n));
    s.rho0 = Matrix::Zero(blk.n, blk.n);
    for (int i = 0; i < blk.n; ++i) {
      const int k = arg[static_cast<std::size_t>(i)];
      if (k < 0) continue;
      const double g = std::isfinite(p) ? std::pow(alpha[i], p - 1.0) : 1.0;
      s.rho[static_cast<std::size_t>(k)] += g * u.col(i) * u.col(i).adjoint();
    }
    return s;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Log-barrier Newton method on one block:
//   t tr(a^p)/p - sum_{k in W} log det(a - x_k) - log det a.

class BarrierBlock {
 public:
  BarrierBlock(const Block& blk, std::vector<int> active, double p)
      : blk_(blk), active_(std::move(active)), p_(p), n_(blk.n) {}

  void start(const Matrix& a0) { a_ = a0; }
  const Matrix& a() const noexcept { return a_; }
  const std::vector<int>& active() const noexcept { return active_; }
  std::size_t barrier_degree() const { return static_cast<std::size_t>(n_) * (active_.size() + 1); }

  /// Newton iterations to the central point for parameter t.
  int center(double t, int max_steps) {
    int steps = 0;
    for (; steps < max_steps; ++steps) {
      std::vector<Matrix> s;
      if (!slacks(a_, &s)) throw NumericError("barrier iterate left the feasible region");
      const Eig ea = eig(a_);
      const Matrix grad = gradient(t, ea, s);
      const Matrix dir = newton_direction(t, ea, s, grad);
      const double dec2 = -(grad.conjugate().cwiseProduct(dir)).sum().real();
      if (!(dec2 > 2e-11)) break;
      const double phi0 = value(t, a_);
      double step = 1.0;
      bool moved = false;
      while (step > 1e-14) {
        const Matrix trial = hermitize(a_ + step * dir);
        const double v = value(t, trial);
        if (std::isfinite(v) && v <= phi0 - 0.25 * step * dec2) {
          a_ = trial;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    return steps + 1;
  }

  /// Dual variables (a - x_k)^{-1} / t at the current point.
  void duals(double t, std::vector<Matrix>& rho, Matrix& rho0) const {
    std::vector<Matrix> s;
    if (!slacks(a_, &s)) throw NumericError("barrier iterate left the feasible region");
    rho.assign(blk_.x.size(), Matrix::Zero(n_, n_));
    for (std::size_t j = 0; j < active_.size(); ++j) rho[static_cast<std::size_t>(active_[j])] = s[j] / t;
    rho0 = s.back() / t;
  }

 private:
  // Inverse slacks for every active constraint and for a >= 0 (last).
  bool slacks(const Matrix& a, std::vector<Matrix>* out) const {
    if (out) out->clear();
    const Matrix id = Matrix::Identity(n_, n_);
    for (std::size_t j = 0; j <= active_.size(); ++j) {
      const Matrix d = j < active_.size() ? Matrix(a - blk_.x[static_cast<std::size_t>(active_[j])]) : a;
      Eigen::LLT<Matrix> llt(hermitize(d));
      if (llt.info() != Eigen::Success) return false;
      if (out) out->push_back(hermitize(llt.solve(id)));
    }
    return true;
  }

  double value(double t, const Matrix& a) const {
    double logdet = 0.0;
    for (std::size_t j = 0; j <= active_.size(); ++j) {
      const Matrix d = j < active_.size() ? Matrix(a - blk_.x[static_cast<std::size_t>(active_[j])]) : a;
      Eigen::LLT<Matrix> llt(hermitize(d));
      if (llt.info() != Eigen::Success) return kInfinity;
      const RealVector diag = llt.matrixLLT().diagonal().real();
      for (Index i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0)) return kInfinity;
        logdet += 2.0 * std::log(diag[i]);
      }
    }
    return t * power_trace(eig(a).values, p_) / p_ - logdet;
  }

  Matrix gradient(double t, const Eig& ea, const std::vector<Matrix>& s) const {
    Matrix g = p_ == 1.0 ? Matrix(Matrix::Identity(n_, n_))
                         : from_eig(ea, [this](double l) { return std::pow(std::max(l, 0.0), p_ - 1.0); });
    g *= t;
    for (const auto& sk : s) g -= sk;
    return hermitize(g);
  }

  Matrix newton_direction(double t, const Eig& ea, const std::vector<Matrix>& s, const Matrix& grad) const {
    const Index nn = static_cast<Index>(n_) * n_;
    Matrix q = Matrix::Zero(nn, nn);
    for (const auto& sk : s) {
      const Matrix st = sk.transpose();
      for (int ia = 0; ia < n_; ++ia) {
        for (int ja = 0; ja < n_; ++ja) {
          q.block(static_cast<Index>(ia) * n_, static_cast<Index>(ja) * n_, n_, n_) += st(ia, ja) * sk;
        }
      }
    }
    if (p_ != 1.0) {
      // Daleckii-Krein derivative of a -> a^{p-1} in the eigenbasis of a.
      const auto& l = ea.values;
      RealVector gamma(nn);
      const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
      for (int j = 0; j < n_; ++j) {
        for (int i = 0; i < n_; ++i) {
          const double li = std::max(l[i], 0.0);
          const double lj = std::max(l[j], 0.0);
          double g;
          if (std::abs(li - lj) > 1e-9 * scale) {
            g = (std::pow(li, p_ - 1.0) - std::pow(lj, p_ - 1.0)) / (li - lj);
          } else {
            const double m = 0.5 * (li + lj);
            g = (p_ - 1.0) * std::pow(m, p_ - 2.0);
          }
          gamma[static_cast<Index>(j) * n_ + i] = g;
        }
      }
      const Matrix& u = ea.vectors;
      const Matrix uc = u.conjugate();
      Matrix k1(nn, nn);
      for (int ia = 0; ia < n_; ++ia) {
        for (int ja = 0; ja < n_; ++ja) {
          k1.block(static_cast<Index>(ia) * n_, static_cast<Index>(ja) * n_, n_, n_) = uc(ia, ja) * u;
        }
      }
      q += t * k1 * gamma.cast<Complex>().asDiagonal() * k1.adjoint();
    }
    q = 0.5 * (q + q.adjoint());
    const Vector rhs = -Eigen::Map<const Vector>(grad.data(), nn);
    Vector d;
    Eigen::LLT<Matrix> llt(q);
    if (llt.info() == Eigen::Success) {
      d = llt.solve(rhs);
    } else {
      d = q.completeOrthogonalDecomposition().solve(rhs);
    }
    return hermitize(Eigen::Map<const Matrix>(d.data(), n_, n_));
  }

  const Block& blk_;
  std::vector<int> active_;
  double p_;
  int n_;
  Matrix a_;
};

// ---------------------------------------------------------------------------

struct Assembled {
  Element a;
  std::vector<Element> rho;
  Element rho0;
};

Assembled assemble(const AlgebraPtr& algebra, const std::vector<Block>& blocks,
                   const std::vector<BlockSolution>& sols, std::size_t count, double p) {
  std::vector<Matrix> a, r0;
  std::vector<std::vector<Matrix>> r(count);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const double s = blocks[b].scale;
    const double ds = std::isfinite(p) ? std::pow(s, p - 1.0) : 1.0;
    a.push_back(s * sols[b].a);
    r0.push_back(ds * sols[b].rho0);
    for (std::size_t k = 0; k < count; ++k) r[k].push_back(ds * sols[b].rho[k]);
  }
  Assembled out{Element(algebra, std::move(a)), {}, Element(algebra, std::move(r0))};
  for (auto& rk : r) out.rho.emplace_back(algebra, std::move(rk));
  return out;
}

double dual_bound_with_zero(std::span<const Element> family, std::span<const Element> rho, const Element& rho0,
                            double p) {
  double num = 0.0;
  Element sigma = rho0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    num += trace(rho[k] * family[k]).real();
    sigma += rho[k];
  }
  const double den = lp_norm(sigma, conjugate_exponent(p));
  return den > 0.0 ? std::max(0.0, num / den) : 0.0;
}

double positive_part_bound(std::span<const Element> family, double p) {
  double best = 0.0;
  for (const auto& x : family) best = std::max(best, lp_norm(positive_part(x), p));
  return best;
}

double feasibility_margin(const Element& a, std::span<const Element> family) {
  double m = kInfinity;
  for (const auto& x : family) m = std::min(m, min_eigenvalue(a - x));
  return m;
}

// Dykstra's alternating projections onto {a >= x_k} and {a >= 0}.
Matrix dykstra(const Matrix& start, const std::vector<Matrix>& xs, int sweeps) {
  const int n = static_cast<int>(start.rows());
  const std::size_t m = xs.size() + 1;
  std::vector<Matrix> inc(m, Matrix::Zero(n, n));
  Matrix a = start;
  for (int s = 0; s < sweeps; ++s) {
    double change = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const Matrix z = a + inc[j];
      const Matrix base = j < xs.size() ? xs[j] : Matrix::Zero(n, n);
      const Matrix proj = base + from_eig(eig(z - base), [](double l) { return std::max(l, 0.0); });
      inc[j] = z - proj;
      change = std::max(change, (proj - a).cwiseAbs().maxCoeff());
      a = proj;
    }
    if (change < 1e-13) break;
  }
  return hermitize(a);
}

BlockSolution solve_projected(const Block& blk, double p, const DominantOptions& opt) {
  std::vector<int> all(blk.x.size());
  std::iota(all.begin(), all.end(), 0);
  BlockSolution s;
  s.method = "projected_descent";
  s.converged = false;
  Matrix a = dykstra(initial_point(blk, all, p), blk.x, 200);
  double prev = power_trace(eig(a).values, p);
  int stable = 0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    ++s.iterations;
    const Eig e = eig(a);
    const Matrix g =
        from_eig(e, [p](double l) { return l > 0.0 ? (p == 1.0 ? 1.0 : std::pow(l, p - 1.0)) : 0.0; });
    const double eta = 0.5 / std::sqrt(static_cast<double>(it));
    a = dykstra(a - eta * g, blk.x, 200);
    const double obj = power_trace(eig(a).values, p);
    stable = std::abs(obj - prev) <= opt.tol * std::max(obj, 1e-300) ? stable + 1 : 0;
    prev = obj;
    if (stable >= 10) {
      s.converged = true;
      break;
    }
  }
  double shift = std::max(0.0, -lambda_min(a));
  for (const auto& x : blk.x) shift = std::max(shift, -lambda_min(a - x));
  s.a = a + shift * Matrix::Identity(blk.n, blk.n);
  s.rho.assign(blk.x.size(), Matrix::Zero(blk.n, blk.n));
  s.rho0 = Matrix::Zero(blk.n, blk.n);
  return s;
}

std::vector<int> initial_working_set(const Block& blk) {
  const std::size_t count = blk.x.size();
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t keep = static_cast<std::size_t>(blk.n) * blk.n + 4;
  if (count <= keep) return idx;
  std::vector<double> top(count);
  for (std::size_t k = 0; k < count; ++k) top[k] = lambda_max(blk.x[k]);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    return top[static_cast<std::size_t>(i)] > top[static_cast<std::size_t>(j)];
  });
  idx.resize(static_cast<std::size_t>(blk.n) + 2);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(DominantMethod m) {
  switch (m) {
    case DominantMethod::automatic: return "automatic";
    case DominantMethod::barrier: return "barrier";
    case DominantMethod::projected_descent: return "projected_descent";
  }
  return "automatic";
}

DominantMethod dominant_method_from_string(std::string_view name) {
  if (name == "automatic") return DominantMethod::automatic;
  if (name == "barrier") return DominantMethod::barrier;
  if (name == "projected_descent") return DominantMethod::projected_descent;
  throw ConfigError("unknown dominant method '" + std::string(name) + "'");
}

double DominantReport::relative_gap() const {
  if (norm <= 0.0) return 0.0;
  return std::max(0.0, (norm - lower_bound) / norm);
}

double dual_lower_bound(std::span<const Element> family, std::span<const Element> rho, double p) {
  if (family.size() != rho.size()) throw StructuralError("one dual variable per family member is required");
  if (family.empty()) return 0.0;
  for (const auto& r : rho) {
    if (!is_positive(r, 1e-10)) throw DomainError("dual variables must be positive");
  }
  return std::max(dual_bound_with_zero(family, rho, Element::zero(family[0].algebra_ptr()), p),
                  positive_part_bound(family, p));
}

DominantReport dominant_element(std::span<const Element> family, double p, const DominantOptions& options) {
  if (family.empty()) throw StructuralError("dominant_element needs a nonempty family");
  if (std::isnan(p) || p < 1.0) throw DomainError("dominant_element requires p >= 1");
  const AlgebraPtr& algebra = family[0].algebra_ptr();
  for (const auto& x : family) {
    if (!same_algebra(x, family[0])) throw StructuralError("family members live in different algebras");
    if (!x.all_finite()) throw NumericError("family has non-finite entries");
    if (!x.is_hermitian(1e-10)) throw StructuralError("dominant_element needs Hermitian family members");
  }

  // Exact duplicates do not change the infimum.
  std::vector<Element> fam;
  for (const auto& x : family) {
    bool dup = false;
    for (const auto& y : fam) {
      if (max_abs_difference(x, y) == 0.0) {
        dup = true;
        break;
      }
    }
    if (!dup) fam.push_back(x);
  }

  DominantReport rep;
  rep.p = p;
  rep.converged = true;

  if (fam.size() == 1 && min_eigenvalue(fam[0]) >= 0.0) {
    rep.dominant = fam[0];
    rep.norm = lp_norm(fam[0], p);
    rep.lower_bound = rep.norm;
    rep.method = "single";
    rep.feasibility_margin = feasibility_margin(rep.dominant, family);
    return rep;
  }

  if (p == kInfinity) {
    double t = 0.0;
    for (const auto& x : fam) t = std::max(t, max_eigenvalue(x));
    rep.dominant = t * Element::identity(algebra);
    rep.norm = t;
    rep.lower_bound = t;
    rep.method = "infinity";
    rep.feasibility_margin = feasibility_margin(rep.dominant, family);
    return rep;
  }

  const std::size_t count = fam.size();
  std::vector<Block> blocks(static_cast<std::size_t>(algebra->block_count()));
  for (int b = 0; b < algebra->block_count(); ++b) {
    auto& blk = blocks[static_cast<std::size_t>(b)];
    blk.n = algebra->block_dim(b);
    blk.weight = algebra->weight(b);
    double s = 0.0;
    for (const auto& x : fam) s = std::max(s, x.block(b).cwiseAbs().maxCoeff());
    blk.scale = s > 0.0 ? s : 1.0;
    for (const auto& x : fam) blk.x.push_back(hermitize(x.block(b)) / blk.scale);
  }

  std::vector<BlockSolution> sols(blocks.size());
  std::vector<std::size_t> pending;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    double top = 0.0;
    for (const auto& x : blk.x) top = std::max(top, lambda_max(x));
    if (top <= 0.0) {
      sols[b].a = Matrix::Zero(blk.n, blk.n);
      sols[b].rho.assign(count, Matrix::Zero(blk.n, blk.n));
      sols[b].rho0 = Matrix::Zero(blk.n, blk.n);
      sols[b].method = "nonpositive";
      continue;
    }
    if (options.method == DominantMethod::projected_descent) {
      sols[b] = solve_projected(blk, p, options);
      continue;
    }
    if (options.method == DominantMethod::automatic) {
      if (auto s = solve_commuting(blk, p)) {
        sols[b] = std::move(*s);
        continue;
      }
    }
    pending.push_back(b);
  }

  int iterations = 0;
  double best_lower = 0.0;
  for (const auto& s : sols) iterations += s.iterations;
  bool converged = true;
  for (const auto& s : sols) converged = converged && s.converged;

  if (!pending.empty()) {
    std::vector<std::vector<int>> work(blocks.size());
    for (std::size_t b : pending) work[b] = initial_working_set(blocks[b]);
    bool done = false;
    for (int round = 0; round < 200 && !done; ++round) {
      std::vector<BarrierBlock> solvers;
      double f0 = 0.0;
      std::size_t degree = 0;
      for (std::size_t b : pending) {
        solvers.emplace_back(blocks[b], work[b], p);
        const Matrix a0 = initial_point(blocks[b], work[b], p);
        solvers.back().start(a0);
        f0 += power_trace(eig(a0).values, p) / p;
        degree += solvers.back().barrier_degree();
      }
      double t = static_cast<double>(degree) / std::max(f0, 1e-300);
      bool gap_ok = false;
      double best_gap = kInfinity;
      int stalled = 0;
      while (iterations < options.max_iterations) {
        for (std::size_t j = 0; j < pending.size(); ++j) {
          iterations += solvers[j].center(t, std::max(1, std::min(200, options.max_iterations - iterations)));
          sols[pending[j]].a = solvers[j].a();
          solvers[j].duals(t, sols[pending[j]].rho, sols[pending[j]].rho0);
          sols[pending[j]].method = "barrier";
        }
        const Assembled as = assemble(algebra, blocks, sols, count, p);
        const double norm = lp_norm(as.a, p);
        const double lb = std::max(dual_bound_with_zero(fam, as.rho, as.rho0, p), positive_part_bound(fam, p));
        best_lower = std::max(best_lower, lb);
        const double gap = norm - best_lower;
        if (gap <= options.tol * norm || norm == 0.0) {
          gap_ok = true;
          break;
        }
        // Slack eigenvalues near 1/t eventually lose all relative precision.
        stalled = gap < 0.5 * best_gap ? 0 : stalled + 1;
        best_gap = std::min(best_gap, gap);
        if (stalled >= 3 || t > 1e15) break;
        t *= 10.0;
      }
      // Constraint generation: add the most violated members outside the working sets.
      bool added = false;
      for (std::size_t b : pending) {
        std::vector<std::pair<double, int>> viol;
        std::vector<char> in(count, 0);
        for (int k : work[b]) in[static_cast<std::size_t>(k)] = 1;
        for (std::size_t k = 0; k < count; ++k) {
          if (in[k]) continue;
          const double m = lambda_min(sols[b].a - blocks[b].x[k]);
          if (m < 0.0) viol.emplace_back(m, static_cast<int>(k));
        }
        if (viol.empty()) continue;
        std::sort(viol.begin(), viol.end());
        const std::size_t take = std::min(viol.size(), static_cast<std::size_t>(std::max(4, blocks[b].n)));
        for (std::size_t i = 0; i < take; ++i) work[b].push_back(viol[i].second);
        std::sort(work[b].begin(), work[b].end());
        added = true;
      }
      if (!added) {
        done = true;
        converged = converged && gap_ok;
      } else if (iterations >= options.max_iterations) {
        // Restore feasibility of the best iterate by a final shift.
        for (std::size_t b : pending) {
          double shift = 0.0;
          for (const auto& x : blocks[b].x) shift = std::max(shift, -lambda_min(sols[b].a - x));
          sols[b].a += shift * Matrix::Identity(blocks[b].n, blocks[b].n);
        }
        converged = false;
        done = true;
      }
    }
    if (!done) converged = false;
  }

  const Assembled as = assemble(algebra, blocks, sols, count, p);
  rep.dominant = as.a;
  rep.norm = lp_norm(as.a, p);
  rep.lower_bound = std::min(
      rep.norm, std::max({best_lower, dual_bound_with_zero(fam, as.rho, as.rho0, p), positive_part_bound(fam, p)}));
  rep.iterations = iterations;
  rep.converged = converged;
  rep.feasibility_margin = feasibility_margin(rep.dominant, family);
  std::vector<std::string> methods;
  for (const auto& s : sols) {
    if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) methods.push_back(s.method);
  }
  for (std::size_t i = 0; i < methods.size(); ++i) rep.method += (i ? "+" : "") + methods[i];
  return rep;
}

SupPlusNorm sup_plus_norm(std::span<const Element> family, double p, const DominantOptions& options) {
  if (family.empty()) throw StructuralError("sup_plus_norm needs a nonempty family");
  bool positive = true;
  for (const auto& x : family) positive = positive && is_positive(x, kDefaultTolerance);
  SupPlusNorm out;
  if (positive) {
    std::vector<Element> herm;
    for (const auto& x : family) herm.push_back(real_part(x));
    out.report = dominant_element(herm, p, options);
    out.convention = "positive family";
  } else {
    std::vector<Element> parts;
    for (const auto& x : family) {
      for (auto& part : decompose_four_positives(x)) parts.push_back(std::move(part));
    }
    out.report = dominant_element(parts, p, options);
    out.convention = "four-positives upper bound";
  }
  out.value = out.report.norm;
  return out;
}

MaximalReport maximal_inequality_report(ContractionTuple t, const Element& x, double p, std::span<const int> cutoffs,
                                        const MaximalOptions& options) {
  if (!(p > 1.0)) throw DomainError("maximal_inequality_report requires p > 1");
  if (!is_positive(x, kDefaultTolerance)) throw DomainError("maximal_inequality_report requires a positive x");
  if (cutoffs.empty()) throw ConfigError("cutoff ladder is empty");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1 || (i > 0 && cutoffs[i] <= cutoffs[i - 1])) {
      throw ConfigError("cutoff ladder must be increasing and >= 1");
    }
  }
  const int d = static_cast<int>(t.size());
  MaximalReport rep;
  rep.p = p;
  rep.x_norm = lp_norm(x, p);

  int largest = 0;
  for (int c : cutoffs) {
    std::int64_t points = 1;
    for (int i = 0; i < d; ++i) points *= c;
    if (points > options.budget) {
      rep.partial = true;
      break;
    }
    largest = c;
  }
  if (largest == 0) return rep;

  GridOptions grid;
  grid.budget = options.budget;
  const AverageFamily fam =
      weighted_average_grid(Weight::constant(d, 1.0), t, x, Box::cube(d, 1, largest), grid);

  for (int c : cutoffs) {
    if (c > largest) break;
    std::vector<Element> members;
    fam.box().for_each([&](std::span<const int> n) {
      for (int v : n) {
        if (v > c) return;
      }
      members.push_back(real_part(fam.values()[static_cast<std::size_t>(fam.box().linear_index(n))]));
    });
    const DominantReport dr = dominant_element(members, p, options.dominant);
    MaximalRung r;
    r.cutoff = c;
    r.family_size = static_cast<std::int64_t>(members.size());
    r.norm = dr.norm;
    r.lower_bound = dr.lower_bound;
    r.ratio = rep.x_norm > 0.0 ? dr.norm / rep.x_norm : 0.0;
    r.iterations = dr.iterations;
    r.converged = dr.converged;
    rep.rungs.push_back(r);
  }
  for (std::size_t i = 1; i < rep.rungs.size(); ++i) {
    if (rep.rungs[i].ratio < rep.rungs[i - 1].ratio * (1.0 - options.monotone_slack)) rep.nondecreasing = false;
  }
  if (rep.rungs.size() >= 2) {
    const double a = rep.rungs[rep.rungs.size() - 2].ratio;
    const double b = rep.rungs.back().ratio;
    rep.last_relative_change = a > 0.0 ? std::abs(b - a) / a : (b == 0.0 ? 0.0 : kInfinity);
    rep.cauchy = rep.last_relative_change < options.cauchy_slack;
  }
  return rep;
}

InterpolationReport interpolation_check(std::span<const Element> family, double p, double q, double slack,
                                        const DominantOptions& options) {
  if (std::isnan(q) || q < 1.0) throw DomainError("interpolation_check requires q >= 1");
  if (!(q < p)) throw DomainError("interpolation_check requires q < p");
  if (family.empty()) throw StructuralError("interpolation_check needs a nonempty family");
  for (const auto& x : family) {
    if (!is_positive(x, kDefaultTolerance)) throw DomainError("interpolation_check needs a positive family");
  }
  InterpolationReport rep;
  rep.p = p;
  rep.q = q;
  rep.slack = slack;
  std::vector<Element> herm;
  for (const auto& x : family) {
    herm.push_back(real_part(x));
    rep.sup_operator_norm = std::max(rep.sup_operator_norm, operator_norm(x));
  }
  const DominantReport lhs = dominant_element(herm, p, options);
  const DominantReport rhs_q = dominant_element(herm, q, options);
  rep.lhs = lhs.norm;
  rep.q_norm = rhs_q.norm;
  const double theta = q / p;
  rep.rhs = std::pow(rep.sup_operator_norm, 1.0 - theta) * std::pow(rep.q_norm, theta);
  rep.holds = rep.lhs <= rep.rhs * (1.0 + slack);

  const Element candidate = std::pow(rep.sup_operator_norm, 1.0 - theta) *
                            functional_calculus(rhs_q.dominant, [theta](double l) {
                              return l > 0.0 ? std::pow(l, theta) : 0.0;
                            });
  rep.candidate_margin = feasibility_margin(candidate, herm);
  return rep;
}

}  // namespace nclab
