#pragma once

// Seeded generators and independent reference computations shared by the
// unit and acceptance tests. The oracles here avoid the library's numerics:
// plain loops, std::exp for phases and closed forms where they exist.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "nclab/algebra.hpp"
#include "nclab/contraction.hpp"
#include "nclab/random.hpp"
#include "nclab/weights.hpp"

namespace nclab_test {

using nclab::AlgebraPtr;
using nclab::Complex;
using nclab::Element;

inline std::filesystem::path data_dir() { return NCLAB_TEST_DATA_DIR; }

// ---------------------------------------------------------------- generators

inline AlgebraPtr random_algebra(nclab::RandomStream& rng, int max_blocks = 2, int max_dim = 3) {
  const int blocks = rng.integer(1, max_blocks);
  std::vector<int> dims;
  std::vector<double> weights;
  for (int b = 0; b < blocks; ++b) {
    dims.push_back(rng.integer(1, max_dim));
    weights.push_back(rng.uniform(0.5, 2.0));
  }
  return nclab::Algebra::make(dims, weights);
}

/// One of: scaled unitary, two-term unitary Kraus mixture, standard pinching,
/// convex mix of identity and pinching.
inline nclab::AbsoluteContraction random_contraction(const AlgebraPtr& algebra, nclab::RandomStream& rng) {
  using namespace nclab;
  switch (rng.integer(0, 3)) {
    case 0:
      return construct_contraction(algebra, ScaledUnitarySpec{random_unitary(algebra, rng), rng.uniform(0.6, 1.0)});
    case 1: {
      const double s = rng.uniform(0.2, 0.8);
      const double c = rng.uniform(0.7, 1.0);
      KrausSpec k;
      k.operators.push_back(random_unitary(algebra, rng) * std::sqrt(c * s));
      k.operators.push_back(random_unitary(algebra, rng) * std::sqrt(c * (1.0 - s)));
      return construct_contraction(algebra, std::move(k));
    }
    case 2: {
      PinchingSpec p;
      for (int b = 0; b < algebra->block_count(); ++b) {
        for (int i = 0; i < algebra->block_dim(b); ++i) p.projections.push_back(Element::unit(algebra, b, i, i));
      }
      return construct_contraction(algebra, std::move(p));
    }
    default: {
      PinchingSpec p;
      const Element u = random_unitary(algebra, rng);
      for (int b = 0; b < algebra->block_count(); ++b) {
        const auto& ub = u.block(b);
        for (int i = 0; i < algebra->block_dim(b); ++i) {
          Element e = Element::zero(algebra);
          e.block(b) = ub.col(i) * ub.col(i).adjoint();
          p.projections.push_back(std::move(e));
        }
      }
      const double w = rng.uniform(0.2, 0.8);
      ConvexCombinationSpec mix{{w, 1.0 - w},
                                {construct_contraction(algebra, ScaledUnitarySpec{Element::identity(algebra), 1.0}),
                                 construct_contraction(algebra, std::move(p))}};
      return construct_contraction(algebra, std::move(mix));
    }
  }
}

/// 1 to 3 terms with Gaussian coefficients and uniform phases.
inline nclab::TrigPolynomial random_trig(int d, nclab::RandomStream& rng) {
  std::vector<nclab::TrigTerm> terms;
  const int count = rng.integer(1, 3);
  for (int j = 0; j < count; ++j) {
    nclab::TrigTerm t;
    t.coefficient = rng.complex_normal();
    for (int i = 0; i < d; ++i) t.phases.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    terms.push_back(std::move(t));
  }
  return nclab::TrigPolynomial(d, std::move(terms));
}

// ---------------------------------------------------------------- oracles

/// Commutative weighted average on functions over n points: maps[i] acts by
/// f -> M_i f. Returns (1/|N|) sum_{k=1}^N a(k) M_d^{k_d} ... M_1^{k_1} f.
struct ScalarTerm {
  Complex c;
  std::vector<double> theta;
};

inline std::vector<Complex> scalar_weighted_average(const std::vector<std::vector<std::vector<double>>>& maps,
                                                    const std::vector<ScalarTerm>& weight,
                                                    const std::vector<double>& f, const std::vector<int>& n) {
  const std::size_t dim = f.size();
  const std::size_t d = maps.size();
  auto apply = [&](const std::vector<std::vector<double>>& m, const std::vector<Complex>& v) {
    std::vector<Complex> out(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) out[i] += m[i][j] * v[j];
    }
    return out;
  };
  std::vector<Complex> acc(dim, 0.0);
  std::vector<int> k(d, 1);
  std::int64_t count = 1;
  for (int v : n) count *= v;
  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::int64_t r = idx;
    for (std::size_t i = d; i-- > 0;) {
      k[i] = static_cast<int>(r % n[i]) + 1;
      r /= n[i];
    }
    Complex a = 0.0;
    for (const auto& t : weight) {
      double angle = 0.0;
      for (std::size_t i = 0; i < d; ++i) angle += t.theta[i] * k[i];
      a += t.c * std::exp(Complex(0.0, angle));
    }
    std::vector<Complex> v(f.begin(), f.end());
    for (std::size_t i = 0; i < d; ++i) {
      for (int s = 0; s < k[i]; ++s) v = apply(maps[i], v);
    }
    for (std::size_t i = 0; i < dim; ++i) acc[i] += a * v[i];
  }
  for (auto& v : acc) v /= static_cast<double>(count);
  return acc;
}

/// p = 1 dominant norm of {e11, v v*}, v = (1, 1)/sqrt 2, by dense search over
/// a = [[alpha, beta], [beta, gamma]] with gamma at its smallest feasible value.
inline double forty_five_degree_oracle() {
  auto gamma_min = [](double alpha, double beta) {
    return std::max(beta * beta / (alpha - 1.0), 0.5 + (beta - 0.5) * (beta - 0.5) / (alpha - 0.5));
  };
  double best = 1e300, ba = 1.5, bb = 0.5;
  double alo = 1.0 + 1e-9, ahi = 3.0, blo = -1.0, bhi = 2.0;
  for (int round = 0; round < 8; ++round) {
    const int m = 400;
    for (int i = 0; i <= m; ++i) {
      const double alpha = alo + (ahi - alo) * i / m;
      for (int j = 0; j <= m; ++j) {
        const double beta = blo + (bhi - blo) * j / m;
        const double v = alpha + gamma_min(alpha, beta);
        if (v < best) {
          best = v;
          ba = alpha;
          bb = beta;
        }
      }
    }
    const double wa = (ahi - alo) / 20.0, wb = (bhi - blo) / 20.0;
    alo = std::max(1.0 + 1e-12, ba - wa);
    ahi = ba + wa;
    blo = bb - wb;
    bhi = bb + wb;
  }
  return best;
}

/// D(N) for a(k) = P(k) + 1/m(k) against P on the cube [1, n]^d, d in {1, 2}:
/// (1/n^d) sum_j c_d(j)/j with c_1 = 1 and c_2(j) = 2(n - j) + 1.
inline double harmonic_discrepancy(int n, int d) {
  double s = 0.0;
  for (int j = 1; j <= n; ++j) s += (d == 1 ? 1.0 : 2.0 * (n - j) + 1.0) / j;
  return s / std::pow(static_cast<double>(n), d);
}

/// Smallest n0 with harmonic_discrepancy(n, d) < eps for every n in [n0, limit].
inline int harmonic_onset(double eps, int d, int limit) {
  int onset = limit + 1;
  for (int n = limit; n >= 1 && harmonic_discrepancy(n, d) < eps; --n) onset = n;
  return onset;
}

/// Scalar Egorov search on n points with masses w: drop the points with the
/// largest sup |r_t(i)| while the dropped mass stays <= eps. Returns the uniform
/// bound on the kept points.
inline double egorov_bound(const std::vector<std::vector<double>>& residuals, const std::vector<double>& w,
                           double eps) {
  const std::size_t n = w.size();
  std::vector<double> sup(n, 0.0);
  for (const auto& r : residuals) {
    for (std::size_t i = 0; i < n; ++i) sup[i] = std::max(sup[i], std::abs(r[i]));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sup[a] > sup[b]; });
  double dropped = 0.0;
  std::size_t first_kept = 0;
  while (first_kept < n && dropped + w[order[first_kept]] <= eps) dropped += w[order[first_kept++]];
  return first_kept < n ? sup[order[first_kept]] : 0.0;
}

/// (1/n) sum_{k=1}^n (lambda T)^k x by repeated application.
inline Element empirical_cesaro(const nclab::AbsoluteContraction& t, Complex lambda, const Element& x, int n) {
  Element v = x;
  Element acc = Element::zero(x.algebra_ptr());
  for (int k = 1; k <= n; ++k) {
    v = t.apply(v) * lambda;
    acc += v;
  }
  return acc * (1.0 / n);
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace nclab_test
