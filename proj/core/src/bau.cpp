#include "nclab/bau.hpp"

#include <cmath>

#include "nclab/errors.hpp"

namespace nclab {

namespace {

double weighted_trace(const Element& x) { return trace(x).real(); }

// tau of the spectral projection of h onto (lambda, inf).
double mass_above(const Element& h, double lambda) {
  const auto spec = hermitian_spectrum(h);
  double m = 0.0;
  for (int b = 0; b < h.block_count(); ++b) {
    for (double v : spec.values[static_cast<std::size_t>(b)]) {
      if (v > lambda) m += h.algebra().weight(b);
    }
  }
  return m;
}

double tail_sup(const Projection& e, std::span<const Element> tail) {
  double s = 0.0;
  for (const auto& r : tail) s = std::max(s, operator_norm(e.compress(r)));
  return s;
}

}  // namespace

std::vector<MultiIndex> lambda_box(int m, int n, int d) {
  if (d < 1) throw StructuralError("lambda_box needs d >= 1");
  if (m < 1) throw DomainError("lambda_box needs m >= 1");
  std::vector<MultiIndex> out;
  if (m > n) return out;
  Box::cube(d, m, n).for_each([&](std::span<const int> k) { out.emplace_back(std::vector<int>(k.begin(), k.end())); });
  return out;
}

BauCertificate certify_bau(std::span<const Element> tail, double p, double epsilon, int onset,
                           const BauOptions& options) {
  if (tail.empty()) throw DomainError("certify_bau needs a nonempty tail");
  if (!(p > 1.0)) throw DomainError("certify_bau requires p > 1");
  const AlgebraPtr& algebra = tail[0].algebra_ptr();
  for (const auto& r : tail) {
    if (!r.is_hermitian(kDefaultTolerance)) {
      throw StructuralError("certify_bau needs Hermitian residuals; split complex ones into real and imaginary parts");
    }
  }
  if (!options.lambda && !(epsilon > 0.0 && epsilon < algebra->total_trace())) {
    throw DomainError("epsilon must lie in (0, tau(1))");
  }

  std::vector<Element> family;
  family.reserve(2 * tail.size());
  for (const auto& r : tail) {
    const Element h = real_part(r);
    family.push_back(h);
    family.push_back(-h);
  }
  const DominantReport dom = dominant_element(family, p, options.dominant);
  const double norm = dom.norm;

  double lambda;
  double eps = epsilon;
  if (options.lambda) {
    lambda = *options.lambda;
    if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
    eps = p == kInfinity ? (norm <= lambda ? 0.0 : algebra->total_trace()) : std::pow(norm / lambda, p);
  } else {
    lambda = p == kInfinity ? norm : norm / std::pow(epsilon, 1.0 / p);
  }

  SpectralProjection sp = spectral_projection(dom.dominant, -kInfinity, lambda);
  BauCertificate c{.e = std::move(sp.projection)};
  c.warnings = std::move(sp.warnings);
  c.epsilon = eps;
  c.lambda = lambda;
  c.onset = onset;
  c.tail_sup = tail_sup(c.e, tail);
  c.dominant_norm = norm;
  c.trace_complement = c.e.trace_complement();
  c.chebyshev_mass = mass_above(dom.dominant, lambda);
  c.chebyshev_bound = lambda > 0.0 && p != kInfinity ? std::pow(norm / lambda, p) : 0.0;
  c.tail_size = static_cast<std::int64_t>(tail.size());
  c.tight = dom.converged;
  if (!dom.converged) c.warnings.push_back("bound not tight: dominant solve unconverged");
  c.dominant = dom.dominant;
  return c;
}

BauCertificate certify_bau(const AverageFamily& residuals, int onset, double p, double epsilon,
                           const BauOptions& options) {
  const auto tail = residuals.tail(onset);
  if (tail.empty()) throw DomainError("no residual with m(N) >= " + std::to_string(onset) + " in the box");
  return certify_bau(tail, p, epsilon, onset, options);
}

BauCertificate certify_bau_complex(std::span<const Element> tail, double p, double epsilon, int onset,
                                   const BauOptions& options) {
  if (tail.empty()) throw DomainError("certify_bau needs a nonempty tail");
  std::vector<Element> re, im;
  for (const auto& r : tail) {
    re.push_back(real_part(r));
    im.push_back(imag_part(r));
  }
  BauOptions half = options;
  if (options.lambda) half.lambda = 0.5 * *options.lambda;
  const BauCertificate cr = certify_bau(re, p, 0.5 * epsilon, onset, half);
  const BauCertificate ci = certify_bau(im, p, 0.5 * epsilon, onset, half);

  // e_R ^ e_I: eigenvalue 2 of e_R + e_I.
  const Element sum = cr.e.element() + ci.e.element();
  SpectralProjection sp = spectral_projection(sum, 2.0 - 1e-8, kInfinity);
  BauCertificate c{.e = std::move(sp.projection)};
  c.kind = "complex";
  c.epsilon = cr.epsilon + ci.epsilon;
  c.lambda = cr.lambda + ci.lambda;
  c.onset = onset;
  c.tail_sup = tail_sup(c.e, tail);
  c.dominant_norm = std::max(cr.dominant_norm, ci.dominant_norm);
  c.trace_complement = c.e.trace_complement();
  c.chebyshev_mass = cr.chebyshev_mass + ci.chebyshev_mass;
  c.chebyshev_bound = cr.chebyshev_bound + ci.chebyshev_bound;
  c.tail_size = static_cast<std::int64_t>(tail.size());
  c.tight = cr.tight && ci.tight;
  for (const auto& w : cr.warnings) c.warnings.push_back("real part: " + w);
  for (const auto& w : ci.warnings) c.warnings.push_back("imaginary part: " + w);
  return c;
}

BauCertificate certify_residuals(const AverageFamily& residuals, int onset, double p, double epsilon,
                                 const BauOptions& options) {
  const auto tail = residuals.tail(onset);
  if (tail.empty()) throw DomainError("no residual with m(N) >= " + std::to_string(onset) + " in the box");
  bool hermitian = true;
  for (const auto& r : tail) hermitian = hermitian && r.is_hermitian(kDefaultTolerance);
  return hermitian ? certify_bau(tail, p, epsilon, onset, options)
                   : certify_bau_complex(tail, p, epsilon, onset, options);
}

std::vector<BauCertificate> certify_ladder(const AverageFamily& residuals, std::span<const int> onsets, double p,
                                           double epsilon, const BauOptions& options) {
  std::vector<BauCertificate> out;
  for (int n0 : onsets) {
    if (residuals.tail_indices(n0).empty()) continue;
    out.push_back(certify_residuals(residuals, n0, p, epsilon, options));
  }
  return out;
}

SoundnessReport verify_certificate(const BauCertificate& cert, std::span<const Element> tail, double p) {
  SoundnessReport r;
  const Element& e = cert.e.element();
  const Element one = Element::identity(e.algebra_ptr());
  r.projection_valid = max_abs_difference(e * e, e) <= 1e-10 && max_abs_difference(e, e.adjoint()) <= 1e-10;
  r.trace_complement = weighted_trace(one) - weighted_trace(e);
  r.trace_ok = r.trace_complement <= cert.epsilon + 1e-12;
  for (const auto& x : tail) r.max_tail = std::max(r.max_tail, lp_norm(e * x * e, kInfinity));
  r.tail_ok = r.max_tail <= cert.lambda + 1e-10;
  if (!cert.dominant.empty() && cert.kind == "hermitian") {
    r.chebyshev_mass = mass_above(cert.dominant, cert.lambda);
    const double bound = p == kInfinity ? 0.0 : std::pow(lp_norm(cert.dominant, p) / cert.lambda, p);
    r.chebyshev_ok = r.chebyshev_mass <= bound + 1e-8;
  } else {
    r.chebyshev_mass = cert.chebyshev_mass;
    r.chebyshev_ok = cert.chebyshev_mass <= cert.chebyshev_bound + 1e-8;
  }
  r.passed = r.projection_valid && r.trace_ok && r.tail_ok && r.chebyshev_ok;
  return r;
}

}  // namespace nclab
