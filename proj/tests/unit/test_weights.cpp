#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "nclab/errors.hpp"
#include "nclab/weights.hpp"

using namespace nclab;
using std::numbers::pi;

TEST(Trig, ConstantOne) {
  const TrigPolynomial p(2, {TrigTerm{1.0, {0.0, 0.0}}});
  for (int a = 1; a <= 5; ++a) EXPECT_EQ(p(MultiIndex{a, 2 * a}), Complex(1.0));
}

TEST(Trig, PhasePiAtThree) {
  const TrigPolynomial p(1, {TrigTerm{1.0, {pi}}});
  EXPECT_EQ(p(MultiIndex{3}), Complex(-1.0));
}

TEST(Trig, ProductOfUnimodulars) {
  const TrigPolynomial p(2, {TrigTerm{1.0, {pi / 2, pi}}});
  EXPECT_EQ(p(MultiIndex{2, 3}), Complex(1.0));
}

TEST(Trig, MultiplicativeAcrossIndexAddition) {
  RandomStream rng(1, "trig");
  for (int s = 0; s < 50; ++s) {
    const std::vector<double> theta{rng.uniform(0.0, 2 * pi), rng.uniform(0.0, 2 * pi)};
    const TrigPolynomial p(2, {TrigTerm{1.0, theta}});
    const MultiIndex k{rng.integer(1, 50), rng.integer(1, 50)};
    const MultiIndex q{rng.integer(1, 50), rng.integer(1, 50)};
    EXPECT_LT(std::abs(p(k + q) - p(k) * p(q)), 1e-12);
  }
}

TEST(SupBound, ConstantWeight) { EXPECT_DOUBLE_EQ(sup_bound(Weight::constant(2, 1.0), Box::cube(2, 1, 5)), 1.0); }

TEST(SupBound, SingleTerm) {
  const Weight w = TrigPolynomial(1, {TrigTerm{Complex(0.0, 0.7), {1.3}}});
  EXPECT_NEAR(sup_bound(w, Box::cube(1, 1, 40)), 0.7, 1e-15);
}

TEST(SupBound, TwoTermsMatchExhaustiveScan) {
  const std::vector<double> t1{0.4, 1.1}, t2{2.0, 0.3};
  const TrigPolynomial p(2, {TrigTerm{0.6, t1}, TrigTerm{Complex(0.2, -0.3), t2}});
  const Box box = Box::cube(2, 1, 30);
  double brute = 0.0;
  box.for_each([&](std::span<const int> k) {
    const Complex v = 0.6 * std::exp(Complex(0, t1[0] * k[0] + t1[1] * k[1])) +
                      Complex(0.2, -0.3) * std::exp(Complex(0, t2[0] * k[0] + t2[1] * k[1]));
    brute = std::max(brute, std::abs(v));
  });
  EXPECT_NEAR(sup_bound(p, box), brute, 1e-12);
}

TEST(SupBound, ExceededDeclaredBoundNamesWitness) {
  const Weight w = Weight::function(1, [](std::span<const int> k) { return Complex(k[0] == 7 ? 2.0 : 0.5); }, 1.0,
                                    "spike");
  try {
    sup_bound(w, Box::cube(1, 1, 10));
    FAIL();
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }
}

TEST(Normalize, SupAtMostOne) {
  RandomStream rng(2, "normalize");
  for (int s = 0; s < 10; ++s) {
    const Weight w = Weight(nclab_test::random_trig(2, rng)).normalized();
    EXPECT_LE(sup_bound(w, Box::cube(2, 1, 20)), 1.0 + 1e-12);
  }
}

TEST(Besicovitch, OwnApproximantHasZeroDiscrepancy) {
  const TrigPolynomial base(1, {TrigTerm{0.5, {1.0}}});
  const BesicovitchWeight w(base, std::monostate{}, {{1e-9, base}});
  for (double eps : {1e-9, 0.01, 0.5}) {
    const auto r = verify_besicovitch(w, eps, MultiIndex{50});
    EXPECT_TRUE(r.passed);
    for (const auto& rung : r.rungs) EXPECT_EQ(rung.discrepancy, 0.0);
  }
}

TEST(Besicovitch, HarmonicPerturbationMatchesClosedForm) {
  const TrigPolynomial base(1, {TrigTerm{1.0, {0.5}}});
  const BesicovitchWeight w(base, DecayPerturbation{1.0, 1.0}, {{0.05, base}});
  const auto r = verify_besicovitch(w, 0.05, MultiIndex{300}, 1);
  for (const auto& rung : r.rungs) {
    EXPECT_NEAR(rung.discrepancy, nclab_test::harmonic_discrepancy(rung.upper[0], 1), 1e-12);
  }
  EXPECT_EQ(r.observed_onset, nclab_test::harmonic_onset(0.05, 1, 300));
}

TEST(Besicovitch, TwoDimensionalHarmonicClosedForm) {
  const TrigPolynomial base(2, {TrigTerm{1.0, {0.0, 0.0}}});
  const BesicovitchWeight w(base, DecayPerturbation{1.0, 1.0}, {{0.05, base}});
  const auto r = verify_besicovitch(w, 0.05, MultiIndex{60, 60}, 1);
  for (const auto& rung : r.rungs) {
    EXPECT_NEAR(rung.discrepancy, nclab_test::harmonic_discrepancy(rung.upper[0], 2), 1e-12);
  }
}

TEST(Besicovitch, AlternatingAgainstZeroFails) {
  const TrigPolynomial alt(1, {TrigTerm{1.0, {pi}}});
  const BesicovitchWeight w(alt, std::monostate{}, {{0.5, TrigPolynomial::zero(1)}});
  const auto r = verify_besicovitch(w, 0.5, MultiIndex{40});
  EXPECT_FALSE(r.passed);
  for (const auto& rung : r.rungs) EXPECT_NEAR(rung.discrepancy, 1.0, 1e-15);
}

TEST(Besicovitch, DoublingPerturbationDoublesDiscrepancy) {
  const TrigPolynomial base(1, {TrigTerm{0.3, {0.7}}});
  const BesicovitchWeight w1(base, DecayPerturbation{0.4, 0.5}, {{0.1, base}});
  const BesicovitchWeight w2(base, DecayPerturbation{0.8, 0.5}, {{0.1, base}});
  const auto r1 = verify_besicovitch(w1, 0.1, MultiIndex{80});
  const auto r2 = verify_besicovitch(w2, 0.1, MultiIndex{80});
  ASSERT_EQ(r1.rungs.size(), r2.rungs.size());
  for (std::size_t i = 0; i < r1.rungs.size(); ++i) {
    EXPECT_NEAR(r2.rungs[i].discrepancy, 2.0 * r1.rungs[i].discrepancy, 1e-12);
  }
}

TEST(Besicovitch, PeriodicPerturbationHasZeroMean) {
  const TrigPolynomial base(1, {TrigTerm{0.5, {0.0}}});
  const BesicovitchWeight w(base, PeriodicPerturbation{{4}, {1.0, 2.0, 3.0, 6.0}}, {{0.5, base}});
  Complex sum = 0.0;
  for (int k = 1; k <= 400; ++k) sum += w(std::vector<int>{k}) - base(std::vector<int>{k});
  EXPECT_LT(std::abs(sum), 1e-10);
}

TEST(Besicovitch, ApproximantLookupUsesLargestLevelBelowEpsilon) {
  const TrigPolynomial base(1, {TrigTerm{1.0, {0.0}}});
  const BesicovitchWeight w(base, std::monostate{}, {{0.01, base}, {0.1, base}});
  EXPECT_DOUBLE_EQ(w.approximant_level(0.05), 0.01);
  EXPECT_DOUBLE_EQ(w.approximant_level(0.1), 0.1);
  EXPECT_THROW(w.approximant_level(0.001), ConfigError);
}

TEST(Besicovitch, SeededNoiseIsDeterministic) {
  const TrigPolynomial base(2, {TrigTerm{1.0, {0.0, 0.0}}});
  const BesicovitchWeight w(base, SeededNoisePerturbation{0.3, 0.5, 99}, {{0.5, base}});
  const auto a = verify_besicovitch(w, 0.5, MultiIndex{20, 20});
  const auto b = verify_besicovitch(w, 0.5, MultiIndex{20, 20});
  ASSERT_EQ(a.rungs.size(), b.rungs.size());
  for (std::size_t i = 0; i < a.rungs.size(); ++i) EXPECT_EQ(a.rungs[i].discrepancy, b.rungs[i].discrepancy);
}
