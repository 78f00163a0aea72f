#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nclab/algebra.hpp"
#include "nclab/averages.hpp"
#include "nclab/maximal.hpp"
#include "nclab/multi_index.hpp"

namespace nclab {

/// Indices k in N^d with m <= min(k) and max(k) <= n, lexicographic. Empty when m > n.
std::vector<MultiIndex> lambda_box(int m, int n, int d);

struct BauOptions {
  /// When set, lambda is fixed and epsilon is back-computed from the
  /// Chebyshev bound.
  std::optional<double> lambda;
  DominantOptions dominant;
};

struct BauCertificate {
  Projection e;
  double epsilon = 0.0;
  double lambda = 0.0;
  int onset = 1;
  /// max over the tail of ||e r_n e||_inf
  double tail_sup = 0.0;
  double dominant_norm = 0.0;
  /// tau(1 - e)
  double trace_complement = 0.0;
  /// tau of the spectral projection of a on (lambda, inf).
  double chebyshev_mass = 0.0;
  /// (||a||_p / lambda)^p
  double chebyshev_bound = 0.0;
  std::int64_t tail_size = 0;
  /// False when the dominant solve did not reach its tolerance. The
  /// certificate stays valid since only feasibility is used.
  bool tight = true;
  /// "hermitian" or "complex" (intersection of real and imaginary parts).
  std::string kind = "hermitian";
  Element dominant{};
  std::vector<std::string> warnings{};
};

/// Certificate for a tail family of Hermitian residuals r_n.
BauCertificate certify_bau(std::span<const Element> tail, double p, double epsilon, int onset = 1,
                           const BauOptions& options = {});

/// Uses the members of `residuals` with m(N) >= onset as the tail.
BauCertificate certify_bau(const AverageFamily& residuals, int onset, double p, double epsilon,
                           const BauOptions& options = {});

/// Complex residuals: certificates for the real and imaginary parts with
/// epsilon/2 each, intersected. lambda is the sum of the two bounds.
BauCertificate certify_bau_complex(std::span<const Element> tail, double p, double epsilon, int onset = 1,
                                   const BauOptions& options = {});

/// Hermitian or complex residual families, chosen by inspection.
BauCertificate certify_residuals(const AverageFamily& residuals, int onset, double p, double epsilon,
                                 const BauOptions& options = {});

/// Certificates for each onset of the ladder. Onsets with an empty tail are skipped.
std::vector<BauCertificate> certify_ladder(const AverageFamily& residuals, std::span<const int> onsets, double p,
                                           double epsilon, const BauOptions& options = {});

struct SoundnessReport {
  bool projection_valid = false;
  bool trace_ok = false;
  bool tail_ok = false;
  bool chebyshev_ok = false;
  double trace_complement = 0.0;
  double max_tail = 0.0;
  double chebyshev_mass = 0.0;
  bool passed = false;
};

/// Recomputes every claim of the certificate from e, lambda and the tail:
/// ||e r_n e||_inf <= lambda + 1e-10, tau(1 - e) <= epsilon and, when the
/// dominant element is present, the Chebyshev bound with slack 1e-8.
SoundnessReport verify_certificate(const BauCertificate& cert, std::span<const Element> tail, double p);

}  // namespace nclab
