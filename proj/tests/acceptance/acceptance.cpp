// Acceptance runner: one PASS/FAIL line per criterion. Exit status is 0 only
// when every selected criterion passes.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "nclab/averages.hpp"
#include "nclab/bau.hpp"
#include "nclab/maximal.hpp"
#include "nclab/report.hpp"
#include "nclab/runner.hpp"
#include "nclab/scenario.hpp"

using namespace nclab;
using nclab_test::data_dir;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Hoelder, triangle, monotonicity and four-positives reconstruction.
Outcome norm_trace_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::vector<int>> shapes{{2}, {3}, {2, 2}, {3, 2}};
  const double ps[] = {1.0, 1.5, 2.0, 3.0, kInfinity};
  const double slack = 1e-9;
  int failures = 0;
  double worst = 0.0;
  for (int s = 0; s < 500; ++s) {
    const auto& shape = shapes[static_cast<std::size_t>(s) % shapes.size()];
    RandomStream rng(1000 + static_cast<std::uint64_t>(s), "norm-suite");
    std::vector<double> w;
    for (std::size_t b = 0; b < shape.size(); ++b) w.push_back(rng.uniform(0.5, 2.0));
    const auto alg = Algebra::make(shape, w);
    const Element x = random_general(alg, rng);
    const Element y = random_general(alg, rng);
    const Element a = random_positive(alg, rng);
    const Element b = a + random_positive(alg, rng);
    for (double p : ps) {
      const double q = std::isinf(p) ? 1.0 : (p == 1.0 ? kInfinity : p / (p - 1.0));
      const double scale = 1.0 + lp_norm(x, p) * lp_norm(y, q);
      const double holder = std::abs(trace(x * y)) - lp_norm(x, p) * lp_norm(y, q);
      const double tri = lp_norm(x + y, p) - lp_norm(x, p) - lp_norm(y, p);
      const double mono = lp_norm(a, p) - lp_norm(b, p);
      for (double v : {holder / scale, tri / (1.0 + lp_norm(x, p) + lp_norm(y, p)), mono / (1.0 + lp_norm(b, p))}) {
        worst = std::max(worst, v);
        if (v > slack) ++failures;
      }
    }
    const auto parts = decompose_four_positives(x);
    const double rec = max_abs_difference(recompose_four_positives(parts), x);
    bool parts_positive = true;
    for (const auto& part : parts) parts_positive = parts_positive && min_eigenvalue(part) >= -slack;
    worst = std::max(worst, rec);
    if (rec > slack || !parts_positive) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 30.0,
          fmt("500 elements, %d violations, worst excess %.3g, %.2f s (limit 30 s)", failures, worst, secs)};
}

// 2. Diagonal subalgebra of M_8 against a scalar implementation.
Outcome commutative_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto alg = Algebra::diagonal(8);
  RandomStream rng(2, "commutative");
  std::vector<std::vector<std::vector<double>>> scalar_maps;
  std::vector<AbsoluteContraction> maps;
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<std::vector<double>> m(8, std::vector<double>(8));
    for (auto& row : m) {
      for (auto& v : row) v = rng.uniform() < 0.6 ? rng.uniform() : 0.0;
    }
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      double r = 0, c = 0;
      for (int j = 0; j < 8; ++j) {
        r += m[i][j];
        c += m[j][i];
      }
      worst = std::max({worst, r, c});
    }
    Matrix t(8, 8);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        m[i][j] *= 0.98 / worst;
        t(i, j) = m[i][j];
      }
    }
    scalar_maps.push_back(m);
    maps.push_back(construct_contraction(alg, TransferSpec{t}));
  }
  const std::vector<nclab_test::ScalarTerm> terms{
      {{0.6, 0.0}, {0.0, 0.0}}, {{0.25, -0.1}, {0.9, 2.1}}, {{0.0, 0.3}, {std::numbers::pi / 3, 4.0}}};
  std::vector<TrigTerm> poly;
  for (const auto& t : terms) poly.push_back({t.c, t.theta});
  const Weight weight = TrigPolynomial(2, poly);
  std::vector<double> f(8);
  std::vector<std::vector<double>> diag;
  for (auto& v : f) {
    v = rng.uniform(-1.0, 2.0);
    diag.push_back({v});
  }
  const Element x = Element::diagonal(alg, diag);
  const AverageFamily fam = weighted_average_grid(weight, maps, x, Box::cube(2, 1, 16));
  double worst = 0.0;
  for (int n1 = 1; n1 <= 16; ++n1) {
    for (int n2 = 1; n2 <= 16; ++n2) {
      const auto ref = nclab_test::scalar_weighted_average(scalar_maps, terms, f, {n1, n2});
      const Element& a = fam.at(MultiIndex{n1, n2});
      for (int i = 0; i < 8; ++i) worst = std::max(worst, std::abs(a.block(i)(0, 0) - ref[static_cast<std::size_t>(i)]));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 10.0,
          fmt("256 boxes, max |grid - scalar| = %.3g (limit 1e-12), %.2f s (limit 10 s)", worst, secs)};
}

// 3. direct, grid and factorized evaluators.
Outcome evaluator_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int compared = 0;
  for (int s = 0; s < 20; ++s) {
    RandomStream rng(3000 + static_cast<std::uint64_t>(s), "evaluators");
    const int d = 1 + s % 3;
    const auto alg = nclab_test::random_algebra(rng);
    std::vector<AbsoluteContraction> maps;
    for (int i = 0; i < d; ++i) maps.push_back(nclab_test::random_contraction(alg, rng));
    const Weight weight = Weight(nclab_test::random_trig(d, rng)).normalized();
    const Element x = random_general(alg, rng);
    const int upper = d == 3 ? 16 : 32;
    const AverageFamily fam = weighted_average_grid(weight, maps, x, Box::cube(d, 1, upper));
    std::vector<MultiIndex> probes{MultiIndex::constant(d, 1), MultiIndex::constant(d, upper)};
    for (int j = 0; j < 12; ++j) {
      std::vector<int> n;
      for (int i = 0; i < d; ++i) n.push_back(rng.integer(1, upper));
      probes.emplace_back(n);
    }
    const double scale = std::max(1.0, lp_norm(x, kInfinity));
    for (const auto& n : probes) {
      const Element direct = weighted_average_direct(weight, maps, x, n);
      const Element fact = weighted_average_factorized(weight, maps, x, n);
      const Element& grid = fam.at(n);
      worst = std::max({worst, max_abs_difference(direct, grid) / scale, max_abs_difference(direct, fact) / scale,
                        max_abs_difference(grid, fact) / scale});
      ++compared;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 120.0,
          fmt("20 scenarios, %d boxes, max pairwise difference %.3g (limit 1e-9), %.2f s (limit 120 s)", compared,
              worst, secs)};
}

// 4. M_N x +- A_N^(R) x >= 0 and likewise for the imaginary part.
Outcome sandwich() {
  double worst = kInfinity;
  for (int s = 0; s < 100; ++s) {
    RandomStream rng(4000 + static_cast<std::uint64_t>(s), "sandwich");
    const auto alg = nclab_test::random_algebra(rng);
    std::vector<AbsoluteContraction> maps;
    for (int i = 0; i < 2; ++i) maps.push_back(nclab_test::random_contraction(alg, rng));
    const Weight weight = Weight(nclab_test::random_trig(2, rng)).normalized();
    const Element x = random_positive(alg, rng);
    const Box box = Box::cube(2, 1, 8);
    const AverageFamily m = weighted_average_grid(Weight::constant(2, 1.0), maps, x, box);
    const AverageFamily re = weighted_average_grid(weight.real_part(), maps, x, box);
    const AverageFamily im = weighted_average_grid(weight.imag_part(), maps, x, box);
    for (std::size_t i = 0; i < m.values().size(); ++i) {
      for (const auto* part : {&re, &im}) {
        worst = std::min(worst, min_eigenvalue(m.values()[i] + part->values()[i]));
        worst = std::min(worst, min_eigenvalue(m.values()[i] - part->values()[i]));
      }
    }
  }
  return {worst >= -1e-10, fmt("100 scenarios on [1,8]^2, smallest eigenvalue %.3g (limit -1e-10)", worst)};
}

// 5. Dominant element: diagonal oracle, single elements and the 45 degree instance.
Outcome dominant() {
  double worst_diag = 0.0;
  for (int s = 0; s < 50; ++s) {
    RandomStream rng(5000 + static_cast<std::uint64_t>(s), "dominant-diagonal");
    const int blocks = rng.integer(1, 3);
    std::vector<int> dims;
    std::vector<double> w;
    for (int b = 0; b < blocks; ++b) {
      dims.push_back(rng.integer(1, 4));
      w.push_back(rng.uniform(0.5, 2.0));
    }
    const auto alg = Algebra::make(dims, w);
    const int k = rng.integer(2, 6);
    std::vector<Element> family;
    std::vector<std::vector<double>> top(dims.size());
    for (std::size_t b = 0; b < dims.size(); ++b) top[b].assign(static_cast<std::size_t>(dims[b]), 0.0);
    for (int j = 0; j < k; ++j) {
      std::vector<std::vector<double>> diag(dims.size());
      for (std::size_t b = 0; b < dims.size(); ++b) {
        for (int i = 0; i < dims[b]; ++i) {
          const double v = rng.uniform(-0.5, 2.0);
          diag[b].push_back(v);
          top[b][static_cast<std::size_t>(i)] = std::max(top[b][static_cast<std::size_t>(i)], v);
        }
      }
      family.push_back(Element::diagonal(alg, diag));
    }
    for (double p : {1.0, 2.0, 4.0}) {
      double sum = 0.0;
      for (std::size_t b = 0; b < dims.size(); ++b) {
        for (double v : top[b]) sum += w[b] * std::pow(v, p);
      }
      const double oracle = std::pow(sum, 1.0 / p);
      const auto r = dominant_element(family, p);
      worst_diag = std::max(worst_diag, std::abs(r.norm - oracle) / std::max(1.0, oracle));
    }
  }
  bool single_exact = true;
  for (int s = 0; s < 10; ++s) {
    RandomStream rng(5500 + static_cast<std::uint64_t>(s), "dominant-single");
    const auto alg = nclab_test::random_algebra(rng);
    const Element x = random_positive(alg, rng);
    for (double p : {1.0, 2.0, 4.0, kInfinity}) {
      const std::vector<Element> one{x};
      single_exact = single_exact && dominant_element(one, p).norm == lp_norm(x, p);
    }
  }
  const auto alg = Algebra::full(2);
  Element q = Element::zero(alg);
  q.block(0) << 0.5, 0.5, 0.5, 0.5;
  const std::vector<Element> pair{Element::unit(alg, 0, 0, 0), q};
  const auto r = dominant_element(pair, 1.0);
  const double oracle = nclab_test::forty_five_degree_oracle();
  const double gap = (r.norm - r.lower_bound) / r.norm;
  const double vs_oracle = std::abs(r.norm - oracle) / oracle;
  return {worst_diag <= 1e-6 && single_exact && gap <= 1e-3 && vs_oracle <= 1e-3,
          fmt("diagonal max rel. error %.3g (limit 1e-6); single elements exact: %s; 45 degree norm %.9f, grid oracle "
              "%.9f, rel. gap %.3g (limit 1e-3)",
              worst_diag, single_exact ? "yes" : "no", r.norm, oracle, gap)};
}

// 6. Ratio ladder is nondecreasing and settles.
Outcome maximal_ladder() {
  int ok = 0;
  double worst_change = 0.0;
  const std::vector<int> cutoffs{4, 8, 16, 32};
  for (int s = 0; s < 10; ++s) {
    RandomStream rng(6000 + static_cast<std::uint64_t>(s), "maximal");
    const int d = 1 + s % 2;
    const auto alg = nclab_test::random_algebra(rng, 2, 2);
    std::vector<AbsoluteContraction> maps;
    for (int i = 0; i < d; ++i) maps.push_back(nclab_test::random_contraction(alg, rng));
    const Element x = random_positive(alg, rng);
    const auto rep = maximal_inequality_report(maps, x, 2.0, cutoffs);
    const auto& rg = rep.rungs;
    bool mono = rg.size() == cutoffs.size();
    for (std::size_t i = 1; i < rg.size(); ++i) mono = mono && rg[i].ratio >= rg[i - 1].ratio * (1.0 - 1e-6);
    const double change = rg.size() >= 2 ? std::abs(rg.back().ratio - rg[rg.size() - 2].ratio) / rg[rg.size() - 2].ratio
                                         : kInfinity;
    worst_change = std::max(worst_change, change);
    if (mono && change < 0.05) ++ok;
  }
  return {ok == 10, fmt("%d/10 scenarios nondecreasing with last-rung change < 5%%, worst change %.3g", ok, worst_change)};
}

// 7. Certificates on the d = 2 pinching reference scenario.
Outcome certificates() {
  const ScenarioConfig c = load_scenario(data_dir() / "pinching_trig_2d.json");
  std::vector<AbsoluteContraction> maps;
  for (const auto& desc : c.contractions) maps.push_back(build_contraction(c.algebra, desc));
  const LimitResult limit = limit_oracle(*c.weight.trig(), maps, c.x);
  const AverageFamily fam = weighted_average_grid(c.weight, maps, c.x, Box::cube(2, 1, 64));
  const AverageFamily res = fam.minus(limit.value, "residual");
  bool all_sound = true;
  bool cheb = true;
  std::optional<int> hit;
  std::string ladder;
  for (int n0 : {8, 16, 32, 64}) {
    const BauCertificate cert = certify_residuals(res, n0, 2.0, 0.01);
    const SoundnessReport sr = verify_certificate(cert, res.tail(n0), 2.0);
    all_sound = all_sound && sr.passed;
    cheb = cheb && sr.chebyshev_ok && cert.chebyshev_mass <= cert.chebyshev_bound + 1e-8;
    if (!hit && cert.tail_sup <= 1e-3) hit = n0;
    ladder += fmt(" N0=%d:%.3g", n0, cert.tail_sup);
  }
  return {all_sound && cheb && hit.has_value(),
          fmt("sound: %s; Chebyshev: %s; tail_sup%s; first N0 with tail_sup <= 1e-3: %s", all_sound ? "yes" : "no",
              cheb ? "yes" : "no", ladder.c_str(), hit ? std::to_string(*hit).c_str() : "none")};
}

// 8. 1/m(k)-perturbed weight at epsilon = 0.05.
Outcome besicovitch() {
  const double eps = 0.05;
  auto weight = [eps](int d) {
    TrigTerm t{1.0, std::vector<double>(static_cast<std::size_t>(d), 1.0)};
    const TrigPolynomial base(d, {t});
    return BesicovitchWeight(base, DecayPerturbation{1.0, 1.0}, {{eps, base}});
  };
  const auto r1 = verify_besicovitch(weight(1), eps, MultiIndex{400}, 100);
  const auto r2 = verify_besicovitch(weight(2), eps, MultiIndex{400, 400}, 32);
  const int o1 = nclab_test::harmonic_onset(eps, 1, 400);
  const int o2 = nclab_test::harmonic_onset(eps, 2, 400);
  const bool oracle_match = r1.observed_onset == o1 && r2.observed_onset == o2;
  auto show = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("none"); };
  return {r1.passed && r2.passed && oracle_match,
          fmt("d=1 observed onset %s (required <= 100, harmonic-sum oracle %d); d=2 observed onset %s (required <= 32, "
              "oracle %d); implementation matches oracle: %s",
              show(r1.observed_onset).c_str(), o1, show(r2.observed_onset).c_str(), o2, oracle_match ? "yes" : "no")};
}

// 9. log-log slope of the error along the diagonal.
Outcome convergence_rate() {
  std::string detail;
  bool ok = true;
  for (const char* file : {"half_pinching_rate.json", "half_pinching_rate_1d.json"}) {
    const ScenarioConfig c = load_scenario(data_dir() / file);
    std::vector<AbsoluteContraction> maps;
    for (const auto& desc : c.contractions) maps.push_back(build_contraction(c.algebra, desc));
    const Element limit = limit_oracle(*c.weight.trig(), maps, c.x).value;
    std::vector<double> ns, errs;
    bool decreasing = true;
    for (int n : {8, 16, 32, 64}) {
      const Element a = weighted_average_grid(c.weight, maps, c.x, Box::cube(c.dimension(), n, n)).values().front();
      const double e = lp_norm(a - limit, 2.0);
      if (!errs.empty() && e >= errs.back()) decreasing = false;
      ns.push_back(n);
      errs.push_back(e);
    }
    const double slope = nclab_test::loglog_slope(ns, errs);
    ok = ok && decreasing && slope >= -1.3 && slope <= -0.7;
    detail += fmt("%s%s slope %.3f, decreasing %s", detail.empty() ? "" : "; ", c.name.c_str(), slope,
                  decreasing ? "yes" : "no");
  }
  return {ok, detail + " (slope limits [-1.3, -0.7])"};
}

// 10. Interpolation inequality on positive families.
Outcome interpolation() {
  int held = 0, total = 0;
  double worst = kInfinity;
  for (auto [p, q] : {std::pair{4.0, 2.0}, std::pair{3.0, 1.5}}) {
    for (int s = 0; s < 100; ++s) {
      RandomStream rng(10000 + static_cast<std::uint64_t>(s), "interpolation");
      const auto alg = nclab_test::random_algebra(rng);
      std::vector<Element> family;
      const int k = rng.integer(2, 5);
      for (int j = 0; j < k; ++j) family.push_back(random_positive(alg, rng) * rng.uniform(0.2, 2.0));
      const auto r = interpolation_check(family, p, q, 1e-6);
      ++total;
      if (r.holds) ++held;
      worst = std::min(worst, (r.rhs - r.lhs) / r.rhs);
    }
  }
  return {held == total, fmt("%d/%d families hold, smallest relative margin %.3g (slack 1e-6)", held, total, worst)};
}

// 11. Byte-identical reports on repeated runs.
Outcome determinism() {
  int files = 0, identical = 0;
  for (const char* file : {"pinching_trig_2d.json", "seeded_maximal.json", "besicovitch_decay.json",
                           "identity_map.json", "invalid_kraus.json"}) {
    std::vector<Task> tasks;
    const ScenarioConfig c = load_scenario(data_dir() / file);
    tasks.push_back(Task::verify);
    if (c.average) tasks.push_back(Task::average);
    if (c.maximal) tasks.push_back(Task::maximal);
    if (c.besicovitch) tasks.push_back(Task::besicovitch);
    if (c.certify) tasks.push_back(Task::certify);
    const std::string first = to_structured(run_scenario(c, tasks));
    ScenarioConfig again = load_scenario(data_dir() / file);
    if (again.average) again.average->threads = 4;
    const RunReport second = run_scenario(again, tasks);
    std::string csv_a, csv_b;
    const RunReport first_report = run_scenario(c, tasks);
    for (const auto& t : first_report.tables) csv_a += to_csv(t);
    for (const auto& t : second.tables) csv_b += to_csv(t);
    ++files;
    if (first == to_structured(second) && csv_a == csv_b && reemit_structured(first) == first) ++identical;
  }
  return {identical == files, fmt("%d/%d scenarios byte-identical across runs and thread counts", identical, files)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nclab acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criterion numbers to run (default: all)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= 11; ++i) selected.push_back(i);
  }
  const std::vector<std::function<Outcome()>> criteria{
      norm_trace_suite, commutative_oracle, evaluator_agreement, sandwich,      dominant,     maximal_ladder,
      certificates,     besicovitch,        convergence_rate,    interpolation, determinism};
  bool all = true;
  for (int n : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s: %s\n", n, o.passed ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
