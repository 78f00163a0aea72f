#include "nclab/averages.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "lattice.hpp"
#include "nclab/errors.hpp"

namespace nclab {

namespace {

// Componentwise Kahan accumulator over a fixed-length complex vector.
class VectorKahan {
 public:
  explicit VectorKahan(Eigen::Index n) : sum_(Vector::Zero(n)), comp_(Vector::Zero(n)), y_(n), t_(n) {}

  void add(const Vector& v, Complex scale) {
    y_ = scale * v - comp_;
    t_ = sum_ + y_;
    comp_ = (t_ - sum_) - y_;
    sum_ = t_;
  }

  const Vector& value() const noexcept { return sum_; }

 private:
  Vector sum_, comp_, y_, t_;
};

void check_inputs(const Weight& a, ContractionTuple t, const Element& x, int d) {
  if (t.empty()) throw StructuralError("contraction tuple is empty");
  if (static_cast<int>(t.size()) != d) {
    throw StructuralError("index dimension " + std::to_string(d) + " differs from the number of contractions " +
                          std::to_string(t.size()));
  }
  if (a.dimension() != d) throw StructuralError("weight dimension differs from the index dimension");
  for (const auto& ti : t) {
    if (!(*ti.algebra() == x.algebra())) throw StructuralError("contraction and element live in different algebras");
  }
}

void check_budget(std::int64_t points, std::int64_t budget, const char* what) {
  if (points > budget) {
    throw BudgetError(std::string(what) + " needs " + std::to_string(points) + " lattice points, budget is " +
                      std::to_string(budget) + "; use the factorized evaluator for polynomial weights");
  }
}

// Visits T^k x for k in [1, upper] in lexicographic order. Axis 1 is the
// outermost loop, so T_1 is applied first as in T_d^{k_d} ... T_1^{k_1}.
template <class Emit>
void visit_orbit(ContractionTuple t, const Vector& x, std::span<const int> upper, Emit&& emit,
                 std::int64_t& applications) {
  const int d = static_cast<int>(upper.size());
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  std::vector<Vector> level(static_cast<std::size_t>(d) + 1);
  level[0] = x;
  auto rec = [&](auto&& self, int axis) -> void {
    const auto ax = static_cast<std::size_t>(axis);
    const Matrix& m = t[ax].transfer_matrix();
    level[ax + 1] = level[ax];
    for (int ki = 1; ki <= upper[ax]; ++ki) {
      level[ax + 1] = m * level[ax + 1];
      ++applications;
      k[ax] = ki;
      if (axis + 1 == d) {
        emit(std::span<const int>(k), level[ax + 1]);
      } else {
        self(self, axis + 1);
      }
    }
  };
  rec(rec, 0);
}

// (1/N) sum_{k=1}^{N} (lambda T)^k v with lambda = e^{i theta}.
Vector modulated_mean(const Matrix& m, double theta, int n, const Vector& v, std::int64_t& applications) {
  VectorKahan acc(v.size());
  Vector y = v;
  for (int k = 1; k <= n; ++k) {
    y = m * y;
    ++applications;
    acc.add(y, unimodular(std::fmod(theta * k, 2.0 * std::numbers::pi)));
  }
  return acc.value() / static_cast<double>(n);
}

}  // namespace

std::string_view to_string(Evaluator e) {
  switch (e) {
    case Evaluator::direct: return "direct";
    case Evaluator::grid: return "grid";
    case Evaluator::factorized: return "factorized";
  }
  return "direct";
}

Evaluator evaluator_from_string(std::string_view name) {
  if (name == "direct") return Evaluator::direct;
  if (name == "grid") return Evaluator::grid;
  if (name == "factorized") return Evaluator::factorized;
  throw ConfigError("unknown evaluator '" + std::string(name) + "' (expected direct, grid or factorized)");
}

// ---------------------------------------------------------------------------

AverageFamily::AverageFamily(Box box, std::vector<Element> values, std::string provenance)
    : box_(std::move(box)), values_(std::move(values)), provenance_(std::move(provenance)) {
  if (static_cast<std::int64_t>(values_.size()) != box_.size()) {
    throw StructuralError("average family needs one value per box index");
  }
  for (std::size_t i = 1; i < values_.size(); ++i) if (!same_algebra(values_[0], values_[i])) throw StructuralError("average family mixes algebras");
}

const Element& AverageFamily::at(const MultiIndex& n) const {
  if (!box_.contains(n)) throw DomainError("index " + n.to_string() + " is outside the family's box");
  return values_[static_cast<std::size_t>(box_.linear_index(n.components()))];
}

std::vector<MultiIndex> AverageFamily::tail_indices(int onset) const {
  std::vector<MultiIndex> out;
  box_.for_each([&](std::span<const int> k) {
    int m = k[0];
    for (int v : k) m = std::min(m, v);
    if (m >= onset) out.emplace_back(std::vector<int>(k.begin(), k.end()));
  });
  return out;
}

std::vector<Element> AverageFamily::tail(int onset) const {
  std::vector<Element> out;
  for (const auto& n : tail_indices(onset)) out.push_back(at(n));
  return out;
}

AverageFamily AverageFamily::minus(const Element& limit, std::string provenance) const {
  std::vector<Element> r;
  r.reserve(values_.size());
  for (const auto& v : values_) r.push_back(v - limit);
  return AverageFamily(box_, std::move(r), std::move(provenance));
}

// ---------------------------------------------------------------------------

Element weighted_average_direct(const Weight& a, ContractionTuple t, const Element& x, const MultiIndex& n,
                                std::int64_t budget, OperationCounts* counts) {
  check_inputs(a, t, x, n.dimension());
  const Box box = Box::from_origin(n);
  check_budget(box.size(), budget, "direct evaluation");
  OperationCounts local;
  VectorKahan acc(x.algebra_ptr()->vector_dim());
  visit_orbit(
      t, x.vectorize(), n.components(),
      [&](std::span<const int> k, const Vector& z) {
        acc.add(z, a(k));
        ++local.weight_evaluations;
      },
      local.applications);
  local.lattice_points = box.size();
  if (counts) *counts += local;
  return Element::from_vector(x.algebra_ptr(), acc.value() / static_cast<double>(box.size()));
}

AverageFamily weighted_average_grid(const Weight& a, ContractionTuple t, const Element& x, const Box& box,
                                    const GridOptions& options, OperationCounts* counts) {
  const int d = box.dimension();
  check_inputs(a, t, x, d);
  const MultiIndex upper = box.upper();
  const Box full = Box::from_origin(upper);
  check_budget(full.size(), options.budget, "grid evaluation");

  const auto dim = static_cast<std::int64_t>(x.algebra_ptr()->vector_dim());
  const auto lens = upper.components();
  const std::int64_t slice = full.size() / lens[0];
  std::vector<Complex> data(static_cast<std::size_t>(full.size() * dim));

  // T_1^{k_1} x for every leading coordinate, then each slice independently.
  std::vector<Vector> lead(static_cast<std::size_t>(lens[0]));
  OperationCounts local;
  {
    Vector y = x.vectorize();
    for (int k1 = 0; k1 < lens[0]; ++k1) {
      y = t[0].transfer_matrix() * y;
      lead[static_cast<std::size_t>(k1)] = y;
    }
    local.applications += lens[0];
  }
  std::vector<std::int64_t> slice_apps(static_cast<std::size_t>(lens[0]), 0);
  const std::vector<int> rest(lens.begin() + 1, lens.end());
  auto fill_slice = [&](std::int64_t k1) {
    std::vector<int> idx(static_cast<std::size_t>(d));
    idx[0] = static_cast<int>(k1) + 1;
    Complex* base = data.data() + k1 * slice * dim;
    if (d == 1) {
      const Complex w = a(std::span<const int>(idx));
      for (std::int64_t c = 0; c < dim; ++c) base[c] = w * lead[static_cast<std::size_t>(k1)][c];
      return;
    }
    std::int64_t pos = 0;
    visit_orbit(
        t.subspan(1), lead[static_cast<std::size_t>(k1)], rest,
        [&](std::span<const int> k, const Vector& z) {
          std::copy(k.begin(), k.end(), idx.begin() + 1);
          const Complex w = a(std::span<const int>(idx));
          Complex* p = base + pos * dim;
          for (std::int64_t c = 0; c < dim; ++c) p[c] = w * z[c];
          ++pos;
        },
        slice_apps[static_cast<std::size_t>(k1)]);
  };
  detail::parallel_chunks(lens[0], options.threads, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t k1 = b; k1 < e; ++k1) fill_slice(k1);
  });
  for (auto s : slice_apps) local.applications += s;
  local.lattice_points = full.size();
  local.weight_evaluations = full.size();

  detail::prefix_sum_all_axes(std::span<Complex>(data), lens, static_cast<int>(dim), options.threads);

  std::vector<Element> values;
  values.reserve(static_cast<std::size_t>(box.size()));
  box.for_each([&](std::span<const int> n) {
    const std::int64_t li = full.linear_index(n);
    std::int64_t card = 1;
    for (int v : n) card *= v;
    Vector s = Eigen::Map<const Vector>(data.data() + li * dim, dim) / static_cast<double>(card);
    values.push_back(Element::from_vector(x.algebra_ptr(), s));
  });
  if (counts) *counts += local;
  return AverageFamily(box, std::move(values), "grid");
}

Element weighted_average_factorized(const Weight& a, ContractionTuple t, const Element& x, const MultiIndex& n,
                                    OperationCounts* counts) {
  const TrigPolynomial* poly = a.trig();
  if (!poly) {
    throw UnsupportedError("factorized evaluation needs a trigonometric polynomial weight; weight '" + a.name() +
                           "' is not one (use the direct or grid evaluator)");
  }
  const int d = n.dimension();
  check_inputs(a, t, x, d);
  OperationCounts local;
  const Vector x0 = x.vectorize();
  Vector total = Vector::Zero(x0.size());
  for (const auto& term : poly->terms()) {
    Vector y = x0;
    for (int i = 0; i < d; ++i) {
      const auto ax = static_cast<std::size_t>(i);
      y = modulated_mean(t[ax].transfer_matrix(), term.phases[ax], n[i], y, local.applications);
    }
    total += term.coefficient * y;
  }
  local.weight_evaluations = static_cast<std::int64_t>(poly->terms().size());
  if (counts) *counts += local;
  return Element::from_vector(x.algebra_ptr(), total);
}

Element weighted_average(Evaluator e, const Weight& a, ContractionTuple t, const Element& x, const MultiIndex& n,
                         std::int64_t budget, OperationCounts* counts) {
  switch (e) {
    case Evaluator::direct: return weighted_average_direct(a, t, x, n, budget, counts);
    case Evaluator::grid: {
      GridOptions opt;
      opt.budget = budget;
      return weighted_average_grid(a, t, x, Box(n, n), opt, counts).values().front();
    }
    case Evaluator::factorized: return weighted_average_factorized(a, t, x, n, counts);
  }
  throw StructuralError("unknown evaluator");
}

std::pair<Element, Element> split_real_imag(const Weight& a, ContractionTuple t, const Element& x,
                                            const MultiIndex& n, std::int64_t budget) {
  return {weighted_average_direct(a.real_part(), t, x, n, budget),
          weighted_average_direct(a.imag_part(), t, x, n, budget)};
}

Element ergodic_average(ContractionTuple t, const Element& x, const MultiIndex& n, std::int64_t budget) {
  return weighted_average_direct(Weight::constant(n.dimension(), 1.0), t, x, n, budget);
}

// ---------------------------------------------------------------------------

LimitResult limit_oracle(const TrigPolynomial& p, ContractionTuple t, const Element& x) {
  const int d = p.dimension();
  check_inputs(Weight(p), t, x, d);
  std::map<std::pair<int, double>, CesaroLimit> cache;
  LimitResult out;
  const Vector x0 = x.vectorize();
  Vector total = Vector::Zero(x0.size());
  for (const auto& term : p.terms()) {
    Vector y = x0;
    for (int i = 0; i < d; ++i) {
      const auto ax = static_cast<std::size_t>(i);
      const auto key = std::make_pair(i, term.phases[ax]);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, cesaro_limit_projection(t[ax], unimodular(term.phases[ax]))).first;
        if (it->second.warning) out.warnings.push_back("axis " + std::to_string(i + 1) + ": " + *it->second.warning);
      }
      y = it->second.projection.transfer() * y;
    }
    total += term.coefficient * y;
  }
  out.value = Element::from_vector(x.algebra_ptr(), total);
  return out;
}

LimitResult limit_estimate(const Weight& a, ContractionTuple t, const Element& x, double eps) {
  if (const auto* p = a.trig()) return limit_oracle(*p, t, x);
  if (const auto* b = a.besicovitch()) {
    const double level = b->approximant_level(eps);
    LimitResult r = limit_oracle(b->approximant(eps), t, x);
    r.error_budget = level * lp_norm(x, 2.0);
    return r;
  }
  throw UnsupportedError("no limit is available for weight '" + a.name() + "'");
}

}  // namespace nclab
