#include "nclab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lattice.hpp"
#include "nclab/errors.hpp"
#include "nclab/random.hpp"

namespace nclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

int require_index(std::span<const int> k, int d) {
  if (static_cast<int>(k.size()) != d) {
    throw StructuralError("weight of dimension " + std::to_string(d) + " evaluated at a " +
                          std::to_string(k.size()) + "-index");
  }
  int m = k.empty() ? 0 : k[0];
  for (int v : k) m = std::min(m, v);
  return m;
}

}  // namespace

Complex unimodular(double angle) {
  const double r = reduce_angle(angle);
  const double q = r / (0.5 * std::numbers::pi);
  const double nearest = std::round(q);
  if (std::abs(q - nearest) < 1e-12) {
    switch (static_cast<int>(nearest) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return {std::cos(r), std::sin(r)};
}

// ---------------------------------------------------------------------------

TrigPolynomial::TrigPolynomial(int dimension, std::vector<TrigTerm> terms)
    : dimension_(dimension), terms_(std::move(terms)) {
  if (dimension_ < 1) throw StructuralError("trigonometric polynomial dimension must be >= 1");
  for (auto& t : terms_) {
    if (static_cast<int>(t.phases.size()) != dimension_) {
      throw StructuralError("trigonometric term has " + std::to_string(t.phases.size()) + " phases, expected " +
                            std::to_string(dimension_));
    }
    if (!std::isfinite(t.coefficient.real()) || !std::isfinite(t.coefficient.imag())) {
      throw NumericError("non-finite trigonometric coefficient");
    }
    for (auto& th : t.phases) {
      if (!std::isfinite(th)) throw NumericError("non-finite phase");
      th = reduce_angle(th);
    }
  }
}

TrigPolynomial TrigPolynomial::constant(int dimension, Complex c) {
  return TrigPolynomial(dimension, {TrigTerm{c, std::vector<double>(static_cast<std::size_t>(dimension), 0.0)}});
}

Complex TrigPolynomial::term_value(std::size_t j, std::span<const int> k) const {
  const auto& t = terms_[j];
  double angle = 0.0;
  for (int i = 0; i < dimension_; ++i) {
    const auto a = static_cast<std::size_t>(i);
    angle += reduce_angle(t.phases[a] * k[a]);
  }
  return t.coefficient * unimodular(angle);
}

Complex TrigPolynomial::operator()(std::span<const int> k) const {
  require_index(k, dimension_);
  Complex v = 0.0;
  for (std::size_t j = 0; j < terms_.size(); ++j) v += term_value(j, k);
  return v;
}

double TrigPolynomial::coefficient_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s;
}

TrigPolynomial TrigPolynomial::scaled(Complex s) const {
  auto terms = terms_;
  for (auto& t : terms) t.coefficient *= s;
  return TrigPolynomial(dimension_, std::move(terms));
}

TrigPolynomial TrigPolynomial::real_part() const {
  std::vector<TrigTerm> out;
  for (const auto& t : terms_) {
    out.push_back({0.5 * t.coefficient, t.phases});
    auto neg = t.phases;
    for (auto& th : neg) th = -th;
    out.push_back({0.5 * std::conj(t.coefficient), std::move(neg)});
  }
  return TrigPolynomial(dimension_, std::move(out));
}

TrigPolynomial TrigPolynomial::imag_part() const {
  const Complex half_i(0.0, 0.5);
  std::vector<TrigTerm> out;
  for (const auto& t : terms_) {
    // Im z = (z - conj z) / (2i)
    out.push_back({t.coefficient / (2.0 * Complex(0.0, 1.0)), t.phases});
    auto neg = t.phases;
    for (auto& th : neg) th = -th;
    out.push_back({std::conj(t.coefficient) * half_i, std::move(neg)});
  }
  return TrigPolynomial(dimension_, std::move(out));
}

// ---------------------------------------------------------------------------

Complex eval_perturbation(const Perturbation& rule, std::span<const int> k) {
  struct Visitor {
    std::span<const int> k;
    Complex operator()(const std::monostate&) const { return 0.0; }
    Complex operator()(const DecayPerturbation& r) const {
      int m = k[0];
      for (int v : k) m = std::min(m, v);
      return r.scale / std::pow(static_cast<double>(m), r.exponent);
    }
    Complex operator()(const PeriodicPerturbation& r) const {
      std::int64_t idx = 0;
      for (std::size_t i = 0; i < k.size(); ++i) idx = idx * r.period[i] + (k[i] - 1) % r.period[i];
      return r.values[static_cast<std::size_t>(idx)];
    }
    Complex operator()(const SeededNoisePerturbation& r) const {
      int m = k[0];
      for (int v : k) m = std::min(m, v);
      const double u = to_unit_interval(hash_index(r.seed, k));
      return r.amplitude * std::pow(static_cast<double>(m), -r.exponent) * unimodular(kTwoPi * u);
    }
  };
  return std::visit(Visitor{k}, rule);
}

double perturbation_bound(const Perturbation& rule) {
  struct Visitor {
    double operator()(const std::monostate&) const { return 0.0; }
    double operator()(const DecayPerturbation& r) const { return std::abs(r.scale); }
    double operator()(const PeriodicPerturbation& r) const {
      double m = 0.0;
      for (auto v : r.values) m = std::max(m, std::abs(v));
      return m;
    }
    double operator()(const SeededNoisePerturbation& r) const { return std::abs(r.amplitude); }
  };
  return std::visit(Visitor{}, rule);
}

std::string perturbation_name(const Perturbation& rule) {
  switch (rule.index()) {
    case 0: return "none";
    case 1: return "decay";
    case 2: return "periodic";
    default: return "seeded_noise";
  }
}

BesicovitchWeight::BesicovitchWeight(TrigPolynomial base, Perturbation perturbation,
                                     std::map<double, TrigPolynomial> approximants,
                                     std::optional<double> declared_bound)
    : base_(std::move(base)), perturbation_(std::move(perturbation)), approximants_(std::move(approximants)) {
  const int d = base_.dimension();
  for (const auto& [eps, p] : approximants_) {
    if (!(eps > 0.0)) throw ConfigError("approximant level must be > 0");
    if (p.dimension() != d) throw StructuralError("approximant dimension differs from the weight");
  }
  if (auto* per = std::get_if<PeriodicPerturbation>(&perturbation_)) {
    if (static_cast<int>(per->period.size()) != d) throw StructuralError("period has the wrong dimension");
    std::int64_t n = 1;
    for (int p : per->period) {
      if (p < 1) throw ConfigError("period components must be >= 1");
      n *= p;
    }
    if (static_cast<std::int64_t>(per->values.size()) != n) {
      throw ConfigError("periodic perturbation needs " + std::to_string(n) + " values");
    }
    Complex mean = 0.0;
    for (auto v : per->values) mean += v;
    mean /= static_cast<double>(n);
    for (auto& v : per->values) v -= mean;
  }
  if (auto* dec = std::get_if<DecayPerturbation>(&perturbation_)) {
    if (!(dec->exponent >= 0.0)) throw ConfigError("decay exponent must be >= 0");
  }
  if (auto* noise = std::get_if<SeededNoisePerturbation>(&perturbation_)) {
    if (!(noise->exponent >= 0.0)) throw ConfigError("noise exponent must be >= 0");
  }
  const double natural = base_.coefficient_bound() + perturbation_bound(perturbation_);
  bound_ = declared_bound.value_or(natural);
  if (!(bound_ >= 0.0)) throw ConfigError("declared bound must be >= 0");
}

Complex BesicovitchWeight::operator()(std::span<const int> k) const {
  require_index(k, dimension());
  return base_(k) + eval_perturbation(perturbation_, k);
}

double BesicovitchWeight::approximant_level(double eps) const {
  auto it = approximants_.upper_bound(eps);
  if (it == approximants_.begin()) {
    std::ostringstream os;
    os << "no approximant at level <= " << eps;
    throw ConfigError(os.str());
  }
  return std::prev(it)->first;
}

const TrigPolynomial& BesicovitchWeight::approximant(double eps) const {
  return approximants_.at(approximant_level(eps));
}

BesicovitchWeight BesicovitchWeight::scaled(double s) const {
  if (!(s > 0.0)) throw DomainError("weights may only be rescaled by s > 0");
  Perturbation p = perturbation_;
  std::visit(
      [s](auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, DecayPerturbation>) r.scale *= s;
        if constexpr (std::is_same_v<R, PeriodicPerturbation>) {
          for (auto& v : r.values) v *= s;
        }
        if constexpr (std::is_same_v<R, SeededNoisePerturbation>) r.amplitude *= s;
      },
      p);
  std::map<double, TrigPolynomial> approx;
  for (const auto& [eps, poly] : approximants_) approx.emplace(eps * s, poly.scaled(s));
  return BesicovitchWeight(base_.scaled(s), std::move(p), std::move(approx), bound_ * s);
}

// ---------------------------------------------------------------------------

using WeightSource = std::variant<std::monostate, TrigPolynomial, BesicovitchWeight>;

Weight::Weight(TrigPolynomial p)
    : dimension_(p.dimension()), bound_(p.coefficient_bound()), name_("trig"),
      source_(std::make_shared<const WeightSource>(std::move(p))) {
  const auto* poly = &std::get<TrigPolynomial>(*source_);
  auto keep = source_;
  fn_ = [poly, keep](std::span<const int> k) { return (*poly)(k); };
}

Weight::Weight(BesicovitchWeight b)
    : dimension_(b.dimension()), bound_(b.declared_bound()), name_("besicovitch"),
      source_(std::make_shared<const WeightSource>(std::move(b))) {
  const auto* w = &std::get<BesicovitchWeight>(*source_);
  auto keep = source_;
  fn_ = [w, keep](std::span<const int> k) { return (*w)(k); };
}

Weight Weight::function(int dimension, Function f, double bound, std::string name) {
  Weight w;
  w.dimension_ = dimension;
  w.bound_ = bound;
  w.name_ = std::move(name);
  w.fn_ = std::move(f);
  return w;
}

const TrigPolynomial* Weight::trig() const noexcept {
  return source_ ? std::get_if<TrigPolynomial>(source_.get()) : nullptr;
}

const BesicovitchWeight* Weight::besicovitch() const noexcept {
  return source_ ? std::get_if<BesicovitchWeight>(source_.get()) : nullptr;
}

Weight Weight::real_part() const {
  if (const auto* p = trig()) return Weight(p->real_part());
  auto f = fn_;
  return function(dimension_, [f](std::span<const int> k) { return Complex(f(k).real(), 0.0); }, bound_,
                  "re(" + name_ + ")");
}

Weight Weight::imag_part() const {
  if (const auto* p = trig()) return Weight(p->imag_part());
  auto f = fn_;
  return function(dimension_, [f](std::span<const int> k) { return Complex(f(k).imag(), 0.0); }, bound_,
                  "im(" + name_ + ")");
}

Weight Weight::scaled(double s) const {
  if (const auto* p = trig()) return Weight(p->scaled(s));
  if (const auto* b = besicovitch()) {
    if (s > 0.0) return Weight(b->scaled(s));
  }
  auto f = fn_;
  return function(dimension_, [f, s](std::span<const int> k) { return s * f(k); }, std::abs(s) * bound_, name_);
}

Weight Weight::normalized() const {
  if (bound_ <= 0.0) return *this;
  return scaled(1.0 / bound_);
}

Complex eval_weight(const Weight& a, const MultiIndex& k) {
  for (int i = 0; i < k.dimension(); ++i) {
    if (k[i] < 1) throw DomainError("weights are indexed by k >= 1");
  }
  return a(k);
}

double sup_bound(const Weight& a, const Box& box) {
  if (box.dimension() != a.dimension()) throw StructuralError("box dimension differs from the weight");
  double best = 0.0;
  std::vector<int> witness;
  box.for_each([&](std::span<const int> k) {
    const double v = std::abs(a(k));
    if (v > best) {
      best = v;
      witness.assign(k.begin(), k.end());
    }
  });
  if (best > a.bound() + 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "declared bound " << a.bound() << " violated: |a(k)| = " << best << " at k = "
       << MultiIndex(witness).to_string();
    throw IntegrityError(os.str());
  }
  return best;
}

// ---------------------------------------------------------------------------

BesicovitchReport verify_besicovitch(const BesicovitchWeight& a, double epsilon, const MultiIndex& cutoff,
                                     int onset, std::int64_t budget) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (cutoff.dimension() != a.dimension()) throw StructuralError("cutoff dimension differs from the weight");
  const Box box = Box::from_origin(cutoff);
  if (box.size() > budget) {
    throw BudgetError("Besicovitch ladder needs " + std::to_string(box.size()) + " lattice points, budget is " +
                      std::to_string(budget));
  }
  BesicovitchReport rep;
  rep.epsilon = epsilon;
  rep.approximant_level = a.approximant_level(epsilon);
  rep.cutoff = cutoff;
  rep.configured_onset = onset;
  const TrigPolynomial& p = a.approximant(epsilon);

  std::vector<double> table(static_cast<std::size_t>(box.size()));
  std::size_t pos = 0;
  box.for_each([&](std::span<const int> k) { table[pos++] = std::abs(a(k) - p(k)); });
  const auto lens = cutoff.components();
  detail::prefix_sum_all_axes(std::span<double>(table), lens, 1, 1);

  const int m_star = cutoff.min_component();
  for (int t = 1; t <= m_star; ++t) {
    std::vector<int> up(static_cast<std::size_t>(cutoff.dimension()));
    for (int i = 0; i < cutoff.dimension(); ++i) {
      const auto n = static_cast<std::int64_t>(t) * cutoff[i];
      up[static_cast<std::size_t>(i)] = static_cast<int>((n + m_star - 1) / m_star);
    }
    MultiIndex upper(std::move(up));
    BesicovitchRung r;
    r.m = upper.min_component();
    r.discrepancy =
        table[static_cast<std::size_t>(box.linear_index(upper.components()))] / static_cast<double>(upper.cardinality());
    r.below_epsilon = r.discrepancy < epsilon;
    r.upper = std::move(upper);
    rep.rungs.push_back(std::move(r));
  }

  rep.passed = true;
  for (const auto& r : rep.rungs) {
    if (r.m >= onset && !r.below_epsilon) rep.passed = false;
  }
  for (auto it = rep.rungs.rbegin(); it != rep.rungs.rend(); ++it) {
    if (!it->below_epsilon) break;
    rep.observed_onset = it->m;
  }
  return rep;
}

}  // namespace nclab
