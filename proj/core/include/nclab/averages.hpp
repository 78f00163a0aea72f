#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nclab/algebra.hpp"
#include "nclab/contraction.hpp"
#include "nclab/multi_index.hpp"
#include "nclab/weights.hpp"

namespace nclab {

inline constexpr std::int64_t kDefaultBudget = std::int64_t{1} << 24;

enum class Evaluator { direct, grid, factorized };

std::string_view to_string(Evaluator e);
Evaluator evaluator_from_string(std::string_view name);

/// Work done by an evaluator. Filled when a non-null pointer is passed.
struct OperationCounts {
  std::int64_t applications = 0;
  std::int64_t lattice_points = 0;
  std::int64_t weight_evaluations = 0;

  OperationCounts& operator+=(const OperationCounts& o) {
    applications += o.applications;
    lattice_points += o.lattice_points;
    weight_evaluations += o.weight_evaluations;
    return *this;
  }
};

/// Elements indexed by every N of a box, stored in lexicographic order.
class AverageFamily {
 public:
  AverageFamily(Box box, std::vector<Element> values, std::string provenance);

  const Box& box() const noexcept { return box_; }
  const std::vector<Element>& values() const noexcept { return values_; }
  const std::string& provenance() const noexcept { return provenance_; }
  const Element& at(const MultiIndex& n) const;

  /// Indices N of the box with m(N) >= onset, in lexicographic order.
  std::vector<MultiIndex> tail_indices(int onset) const;
  std::vector<Element> tail(int onset) const;
  /// x_N - limit for every N.
  AverageFamily minus(const Element& limit, std::string provenance) const;

 private:
  Box box_;
  std::vector<Element> values_;
  std::string provenance_;
};

using ContractionTuple = std::span<const AbsoluteContraction>;

/// (1/|N|) sum_{k=1}^{N} a(k) T^k x by explicit summation.
Element weighted_average_direct(const Weight& a, ContractionTuple t, const Element& x, const MultiIndex& n,
                                std::int64_t budget = kDefaultBudget, OperationCounts* counts = nullptr);

struct GridOptions {
  std::int64_t budget = kDefaultBudget;
  int threads = 1;
};

/// A_N for every N in the box from one pass of d-dimensional prefix sums.
/// Results are bitwise independent of `threads`.
AverageFamily weighted_average_grid(const Weight& a, ContractionTuple t, const Element& x, const Box& box,
                                    const GridOptions& options = {}, OperationCounts* counts = nullptr);

/// Sum over terms of c_j M_{N_d}(g_{j,d} T_d) ... M_{N_1}(g_{j,1} T_1) x.
Element weighted_average_factorized(const Weight& a, ContractionTuple t, const Element& x, const MultiIndex& n,
                                    OperationCounts* counts = nullptr);

/// Evaluator dispatch for a single N.
Element weighted_average(Evaluator e, const Weight& a, ContractionTuple t, const Element& x, const MultiIndex& n,
                         std::int64_t budget = kDefaultBudget, OperationCounts* counts = nullptr);

/// Averages with Re a(k) and Im a(k).
std::pair<Element, Element> split_real_imag(const Weight& a, ContractionTuple t, const Element& x,
                                            const MultiIndex& n, std::int64_t budget = kDefaultBudget);

/// M_N(T)x, the unweighted average.
Element ergodic_average(ContractionTuple t, const Element& x, const MultiIndex& n,
                        std::int64_t budget = kDefaultBudget);

struct LimitResult {
  Element value;
  /// Zero for trigonometric polynomials. For other weights, eps ||x||_2 for the
  /// approximant used.
  double error_budget = 0.0;
  std::vector<std::string> warnings;
};

/// Limit of the averages as every N_i grows, for polynomial weights.
LimitResult limit_oracle(const TrigPolynomial& p, ContractionTuple t, const Element& x);

/// Polynomial weights go to limit_oracle. Besicovitch weights use the
/// approximant at level eps.
LimitResult limit_estimate(const Weight& a, ContractionTuple t, const Element& x, double eps);

}  // namespace nclab
