#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nclab/algebra.hpp"
#include "nclab/averages.hpp"

namespace nclab {

enum class DominantMethod {
  /// Exact formulas where they apply, otherwise the barrier method.
  automatic,
  barrier,
  projected_descent,
};

std::string_view to_string(DominantMethod m);
DominantMethod dominant_method_from_string(std::string_view name);

struct DominantOptions {
  /// Target relative duality gap (barrier) or relative objective change
  /// (projected descent).
  double tol = 1e-8;
  int max_iterations = 10000;
  DominantMethod method = DominantMethod::automatic;
};

struct DominantReport {
  Element dominant;
  double p = 1.0;
  double norm = 0.0;
  double lower_bound = 0.0;
  int iterations = 0;
  /// min over k of the smallest eigenvalue of dominant - x_k.
  double feasibility_margin = 0.0;
  bool converged = false;
  /// Which path produced each block, e.g. "commuting" or "barrier".
  std::string method;

  /// (norm - lower_bound) / norm, zero when both vanish.
  double relative_gap() const;
};

/// Smallest ||a||_p over positive a with a >= x_k for every k.
DominantReport dominant_element(std::span<const Element> family, double p, const DominantOptions& options = {});

/// Largest value of sum_k tau(rho_k x_k) / ||sum_k rho_k||_q over the given
/// positive rho, together with max_k ||(x_k)_+||_p. Every value is a lower
/// bound for the dominant norm.
double dual_lower_bound(std::span<const Element> family, std::span<const Element> rho, double p);

struct SupPlusNorm {
  double value = 0.0;
  /// "positive family" or "four-positives upper bound".
  std::string convention;
  DominantReport report;
};

/// ||sup+ x_k||_p. Non-positive families are replaced by the positive parts of
/// their four-positives decompositions, which yields an upper bound.
SupPlusNorm sup_plus_norm(std::span<const Element> family, double p, const DominantOptions& options = {});

struct MaximalRung {
  int cutoff = 0;
  std::int64_t family_size = 0;
  double norm = 0.0;
  double lower_bound = 0.0;
  double ratio = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MaximalOptions {
  double cauchy_slack = 0.05;
  /// Relative tolerance for the nondecreasing check.
  double monotone_slack = 1e-6;
  std::int64_t budget = kDefaultBudget;
  DominantOptions dominant;
};

struct MaximalReport {
  double p = 2.0;
  double x_norm = 0.0;
  std::vector<MaximalRung> rungs;
  bool nondecreasing = true;
  /// Last two rungs differ by less than the slack (relative).
  bool cauchy = false;
  double last_relative_change = 0.0;
  /// Cutoffs beyond the budget were skipped.
  bool partial = false;
  std::string evaluator = "grid";
};

/// Ratio ||a*||_p / ||x||_p where a* dominates {M_N(T)x : N in [1,c]^d} for each
/// cutoff c of the ladder.
MaximalReport maximal_inequality_report(ContractionTuple t, const Element& x, double p, std::span<const int> cutoffs,
                                        const MaximalOptions& options = {});

struct InterpolationReport {
  double p = 0.0;
  double q = 0.0;
  double lhs = 0.0;
  double sup_operator_norm = 0.0;
  double q_norm = 0.0;
  double rhs = 0.0;
  double slack = 1e-6;
  bool holds = false;
  /// Smallest eigenvalue of s^{1-q/p} a_q^{q/p} - x_k, a direct witness that
  /// the right-hand side dominates.
  double candidate_margin = 0.0;
};

/// ||sup+ x_k||_p <= (sup_k ||x_k||_inf)^{1-q/p} ||sup+ x_k||_q^{q/p} for positive
/// families and 1 <= q < p.
InterpolationReport interpolation_check(std::span<const Element> family, double p, double q, double slack = 1e-6,
                                        const DominantOptions& options = {});

}  // namespace nclab
