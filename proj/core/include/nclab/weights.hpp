#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nclab/algebra.hpp"
#include "nclab/multi_index.hpp"

namespace nclab {

/// e^{i angle}, exact at multiples of pi/2.
Complex unimodular(double angle);

/// One term c * prod_i e^{i theta_i k_i}.
struct TrigTerm {
  Complex coefficient;
  std::vector<double> phases;
};

/// Finite trigonometric polynomial on N^d. Phases are stored as angles,
/// reduced to [0, 2 pi).
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  TrigPolynomial(int dimension, std::vector<TrigTerm> terms);

  static TrigPolynomial constant(int dimension, Complex c);
  static TrigPolynomial zero(int dimension) { return TrigPolynomial(dimension, {}); }

  int dimension() const noexcept { return dimension_; }
  std::span<const TrigTerm> terms() const noexcept { return terms_; }

  Complex operator()(std::span<const int> k) const;
  Complex operator()(const MultiIndex& k) const { return (*this)(k.components()); }

  /// Value of a single term at k.
  Complex term_value(std::size_t j, std::span<const int> k) const;

  /// sum_j |c_j|, a bound on |P(k)| for every k.
  double coefficient_bound() const;

  TrigPolynomial scaled(Complex s) const;
  /// Re P and Im P are again trigonometric polynomials (phases negated).
  TrigPolynomial real_part() const;
  TrigPolynomial imag_part() const;

 private:
  int dimension_ = 0;
  std::vector<TrigTerm> terms_;
};

/// c / m(k)^alpha
struct DecayPerturbation {
  double scale = 1.0;
  double exponent = 1.0;
};

/// Lattice-periodic values on the box [1, period] (lexicographic order),
/// shifted at construction to have zero mean over one period.
struct PeriodicPerturbation {
  std::vector<int> period;
  std::vector<Complex> values;
};

/// amplitude * m(k)^(-exponent) * e^{2 pi i U}, U uniform from a counter-based
/// generator keyed by (seed, k).
struct SeededNoisePerturbation {
  double amplitude = 1.0;
  double exponent = 0.0;
  std::uint64_t seed = 0;
};

using Perturbation =
    std::variant<std::monostate, DecayPerturbation, PeriodicPerturbation, SeededNoisePerturbation>;

Complex eval_perturbation(const Perturbation& rule, std::span<const int> k);
/// sup_k |eta(k)|
double perturbation_bound(const Perturbation& rule);
std::string perturbation_name(const Perturbation& rule);

/// a(k) = base(k) + eta(k) with explicit approximants P_eps per epsilon level.
class BesicovitchWeight {
 public:
  BesicovitchWeight(TrigPolynomial base, Perturbation perturbation,
                    std::map<double, TrigPolynomial> approximants,
                    std::optional<double> declared_bound = std::nullopt);

  int dimension() const noexcept { return base_.dimension(); }
  const TrigPolynomial& base() const noexcept { return base_; }
  const Perturbation& perturbation() const noexcept { return perturbation_; }
  const std::map<double, TrigPolynomial>& approximants() const noexcept { return approximants_; }

  Complex operator()(std::span<const int> k) const;

  /// Approximant with the largest level <= eps. Throws ConfigError if none.
  const TrigPolynomial& approximant(double eps) const;
  double approximant_level(double eps) const;

  double declared_bound() const noexcept { return bound_; }

  /// All of base, perturbation and approximants multiplied by s > 0.
  BesicovitchWeight scaled(double s) const;

 private:
  TrigPolynomial base_;
  Perturbation perturbation_;
  std::map<double, TrigPolynomial> approximants_;
  double bound_ = 0.0;
};

/// Type-erased bounded weight family on N^d.
class Weight {
 public:
  using Function = std::function<Complex(std::span<const int>)>;

  Weight() = default;
  Weight(TrigPolynomial p);  // NOLINT(google-explicit-constructor)
  Weight(BesicovitchWeight b);  // NOLINT(google-explicit-constructor)
  static Weight function(int dimension, Function f, double bound, std::string name);
  static Weight constant(int dimension, Complex c) { return TrigPolynomial::constant(dimension, c); }

  int dimension() const noexcept { return dimension_; }
  /// Declared sup |a(k)|.
  double bound() const noexcept { return bound_; }
  const std::string& name() const noexcept { return name_; }

  Complex operator()(std::span<const int> k) const { return fn_(k); }
  Complex operator()(const MultiIndex& k) const { return fn_(k.components()); }

  const TrigPolynomial* trig() const noexcept;
  const BesicovitchWeight* besicovitch() const noexcept;

  Weight real_part() const;
  Weight imag_part() const;
  Weight scaled(double s) const;
  /// a / bound, so sup |a| <= 1.
  Weight normalized() const;

 private:
  int dimension_ = 0;
  double bound_ = 0.0;
  std::string name_;
  Function fn_;
  std::shared_ptr<const std::variant<std::monostate, TrigPolynomial, BesicovitchWeight>> source_;
};

Complex eval_weight(const Weight& a, const MultiIndex& k);

/// max |a(k)| over the box; throws IntegrityError naming the witness index if
/// the declared bound is exceeded by more than 1e-12.
double sup_bound(const Weight& a, const Box& box);

struct BesicovitchRung {
  MultiIndex upper;  // box [1, upper]
  int m = 0;         // m(upper)
  double discrepancy = 0.0;
  bool below_epsilon = false;
};

struct BesicovitchReport {
  double epsilon = 0.0;
  double approximant_level = 0.0;
  MultiIndex cutoff;
  int configured_onset = 1;
  std::vector<BesicovitchRung> rungs;
  /// Smallest m from which every tested rung is below epsilon.
  std::optional<int> observed_onset;
  bool passed = false;
  std::string evidence = "finite-box evidence";
};

/// Ladder of boxes [1, N(t)], t = 1..m(cutoff), with N(t)_i = ceil(t cutoff_i / m(cutoff)),
/// and D(N) = (1/|N|) sum_{k<=N} |a(k) - P_eps(k)| on each. Passes iff D < eps on every
/// rung with m(N) >= onset.
BesicovitchReport verify_besicovitch(const BesicovitchWeight& a, double epsilon, const MultiIndex& cutoff,
                                     int onset = 1, std::int64_t budget = std::int64_t{1} << 24);

}  // namespace nclab
