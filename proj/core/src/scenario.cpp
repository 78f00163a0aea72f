#include "nclab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "nclab/errors.hpp"
#include "nclab/random.hpp"
#include "nclab/text_format.hpp"

namespace nclab {

namespace {

using json = nlohmann::json;

class Parser {
 public:
  Parser(std::filesystem::path base, std::optional<std::uint64_t> seed) : base_(std::move(base)), seed_(seed) {}

  AlgebraPtr algebra;
  bool used_randomness = false;

  std::uint64_t seed_for(const std::string& where) {
    used_randomness = true;
    if (!seed_) throw ConfigError(where + ": randomized component requires a 'seed'");
    return *seed_;
  }

  static const json& field(const json& j, const char* name, const std::string& where) {
    if (!j.is_object() || !j.contains(name)) throw ConfigError(where + ": missing field '" + name + "'");
    return j.at(name);
  }

  static double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
  }

  static int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<int>();
  }

  static Complex complex(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
      return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(where + ": expected a number or a [re, im] pair");
  }

  static std::vector<int> int_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected a list of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], where + "/" + std::to_string(i)));
    return out;
  }

  static Matrix matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(where + ": expected a list of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw ConfigError(where + ": rows have different lengths");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        m(r, c) = complex(row[static_cast<std::size_t>(c)], where + "/" + std::to_string(r));
      }
    }
    return m;
  }

  std::string read_text(const json& j, const std::string& where) const {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_array()) {
      std::string s;
      for (const auto& line : j) {
        if (!line.is_string()) throw ConfigError(where + ": text lines must be strings");
        s += line.get<std::string>();
        s += '\n';
      }
      return s;
    }
    throw ConfigError(where + ": expected a string or a list of lines");
  }

  std::string read_file(const std::string& name, const std::string& where) const {
    const std::filesystem::path p = std::filesystem::path(name).is_absolute() ? std::filesystem::path(name) : base_ / name;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError(where + ": cannot read '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  Element element(const json& j, const std::string& where) {
    Element e = element_unscaled(j, where);
    if (j.is_object() && j.contains("scale")) e *= complex(j.at("scale"), where + "/scale");
    return e;
  }

  Element element_unscaled(const json& j, const std::string& where) {
    if (j.is_string() || j.is_array()) return parse_element(read_text(j, where), algebra);
    if (!j.is_object()) throw ConfigError(where + ": expected an element description");
    if (j.contains("text")) return parse_element(read_text(j.at("text"), where), algebra);
    if (j.contains("file")) {
      const auto& f = j.at("file");
      if (!f.is_string()) throw ConfigError(where + "/file: expected a path");
      return parse_element(read_file(f.get<std::string>(), where), algebra);
    }
    if (j.contains("identity")) return Element::identity(algebra);
    if (j.contains("zero")) return Element::zero(algebra);
    if (j.contains("unit")) {
      const auto v = int_list(j.at("unit"), where + "/unit");
      if (v.size() != 3) throw ConfigError(where + "/unit: expected [block, row, column]");
      check_block_index(v[0], v[1], v[2], where);
      return Element::unit(algebra, v[0], v[1], v[2]);
    }
    if (j.contains("diagonal")) {
      const auto& d = j.at("diagonal");
      if (!d.is_array()) throw ConfigError(where + "/diagonal: expected one list per block");
      std::vector<std::vector<double>> diag;
      for (const auto& blk : d) {
        std::vector<double> v;
        for (const auto& x : blk) v.push_back(number(x, where + "/diagonal"));
        diag.push_back(std::move(v));
      }
      return Element::diagonal(algebra, diag);
    }
    if (j.contains("blocks")) {
      const auto& bl = j.at("blocks");
      if (!bl.is_array()) throw ConfigError(where + "/blocks: expected a list of matrices");
      std::vector<Matrix> m;
      for (std::size_t i = 0; i < bl.size(); ++i) m.push_back(matrix(bl[i], where + "/blocks/" + std::to_string(i)));
      return Element(algebra, std::move(m));
    }
    if (j.contains("projector")) {
      const auto& pr = j.at("projector");
      const int b = integer(field(pr, "block", where + "/projector"), where + "/projector/block");
      const auto& vec = field(pr, "vector", where + "/projector");
      if (b < 0 || b >= algebra->block_count()) throw ConfigError(where + "/projector: block out of range");
      const int n = algebra->block_dim(b);
      if (!vec.is_array() || static_cast<int>(vec.size()) != n) {
        throw ConfigError(where + "/projector: vector length must equal the block size");
      }
      Vector v(n);
      for (int i = 0; i < n; ++i) v[i] = complex(vec[static_cast<std::size_t>(i)], where + "/projector/vector");
      if (v.norm() == 0.0) throw ConfigError(where + "/projector: zero vector");
      v /= v.norm();
      Element e = Element::zero(algebra);
      e.block(b) = v * v.adjoint();
      return e;
    }
    if (j.contains("random")) {
      const auto& r = j.at("random");
      if (!r.is_string()) throw ConfigError(where + "/random: expected a kind name");
      const std::string tag = j.contains("tag") && j.at("tag").is_string() ? j.at("tag").get<std::string>() : where;
      RandomStream rng(seed_for(where), tag);
      const std::string kind = r.get<std::string>();
      if (kind == "positive") return random_positive(algebra, rng);
      if (kind == "general") return random_general(algebra, rng);
      if (kind == "hermitian") return random_hermitian(algebra, rng);
      if (kind == "unitary") return random_unitary(algebra, rng);
      if (kind == "diagonal_positive") return random_diagonal_positive(algebra, rng);
      throw ConfigError(where + "/random: unknown kind '" + kind + "'");
    }
    throw ConfigError(where + ": unrecognized element description");
  }

  void check_block_index(int b, int i, int k, const std::string& where) const {
    if (b < 0 || b >= algebra->block_count() || i < 0 || k < 0 || i >= algebra->block_dim(b) ||
        k >= algebra->block_dim(b)) {
      throw ConfigError(where + ": matrix unit index out of range");
    }
  }

  std::vector<Element> basis_projections(const std::string& basis, const std::string& where) const {
    std::vector<Element> out;
    for (int b = 0; b < algebra->block_count(); ++b) {
      const int n = algebra->block_dim(b);
      for (int j = 0; j < n; ++j) {
        Vector v(n);
        for (int m = 0; m < n; ++m) {
          if (basis == "standard") {
            v[m] = m == j ? 1.0 : 0.0;
          } else if (basis == "fourier") {
            v[m] = std::polar(1.0 / std::sqrt(static_cast<double>(n)), 2.0 * std::numbers::pi * j * m / n);
          } else {
            throw ConfigError(where + ": unknown basis '" + basis + "' (expected standard or fourier)");
          }
        }
        Element e = Element::zero(algebra);
        e.block(b) = v * v.adjoint();
        out.push_back(std::move(e));
      }
    }
    return out;
  }

  ContractionDescription contraction(const json& j, const std::string& where) {
    const auto& kind_field = field(j, "kind", where);
    if (!kind_field.is_string()) throw ConfigError(where + "/kind: expected a name");
    ContractionDescription d;
    try {
      d.kind = contraction_kind_from_string(kind_field.get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
    switch (d.kind) {
      case ContractionKind::scaled_unitary: {
        ScaledUnitarySpec s;
        s.unitary = j.contains("unitary") ? element(j.at("unitary"), where + "/unitary") : Element::identity(algebra);
        s.scale = j.contains("scale") ? number(j.at("scale"), where + "/scale") : 1.0;
        d.leaf = std::move(s);
        break;
      }
      case ContractionKind::pinching: {
        PinchingSpec s;
        if (j.contains("basis")) {
          if (!j.at("basis").is_string()) throw ConfigError(where + "/basis: expected a name");
          s.projections = basis_projections(j.at("basis").get<std::string>(), where);
        } else {
          const auto& ps = field(j, "projections", where);
          if (!ps.is_array()) throw ConfigError(where + "/projections: expected a list");
          for (std::size_t i = 0; i < ps.size(); ++i) {
            s.projections.push_back(element(ps[i], where + "/projections/" + std::to_string(i)));
          }
        }
        d.leaf = std::move(s);
        break;
      }
      case ContractionKind::schur_multiplier:
        d.leaf = SchurMultiplierSpec{matrix(field(j, "coefficients", where), where + "/coefficients")};
        break;
      case ContractionKind::kraus: {
        KrausSpec s;
        const auto& ops = field(j, "operators", where);
        if (!ops.is_array()) throw ConfigError(where + "/operators: expected a list");
        for (std::size_t i = 0; i < ops.size(); ++i) {
          s.operators.push_back(element(ops[i], where + "/operators/" + std::to_string(i)));
        }
        d.leaf = std::move(s);
        break;
      }
      case ContractionKind::convex_combination: {
        const auto& w = field(j, "weights", where);
        if (!w.is_array()) throw ConfigError(where + "/weights: expected a list");
        for (const auto& v : w) d.weights.push_back(number(v, where + "/weights"));
        parts(j, where, d);
        if (d.weights.size() != d.parts.size()) throw ConfigError(where + ": one weight per map is required");
        break;
      }
      case ContractionKind::composition:
        parts(j, where, d);
        break;
      case ContractionKind::transfer:
        d.leaf = TransferSpec{matrix(field(j, "matrix", where), where + "/matrix")};
        break;
    }
    return d;
  }

  void parts(const json& j, const std::string& where, ContractionDescription& d) {
    const auto& maps = field(j, "maps", where);
    if (!maps.is_array() || maps.empty()) throw ConfigError(where + "/maps: expected a nonempty list");
    for (std::size_t i = 0; i < maps.size(); ++i) {
      d.parts.push_back(contraction(maps[i], where + "/maps/" + std::to_string(i)));
    }
  }

  TrigPolynomial trig(const json& terms, int d, const std::string& where) const {
    if (!terms.is_array()) throw ConfigError(where + ": expected a list of [re, im, theta_1, ..., theta_d] terms");
    std::vector<TrigTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& t = terms[i];
      const std::string w = where + "/" + std::to_string(i);
      if (!t.is_array() || static_cast<int>(t.size()) != d + 2) {
        throw ConfigError(w + ": term needs " + std::to_string(d + 2) + " numbers");
      }
      TrigTerm term;
      term.coefficient = {number(t[0], w), number(t[1], w)};
      for (int k = 0; k < d; ++k) term.phases.push_back(number(t[static_cast<std::size_t>(k) + 2], w));
      out.push_back(std::move(term));
    }
    if (out.empty()) return TrigPolynomial(d, {TrigTerm{0.0, std::vector<double>(static_cast<std::size_t>(d), 0.0)}});
    return TrigPolynomial(d, std::move(out));
  }

  Weight weight(const json& j, int d, const std::string& where) {
    const auto& type = field(j, "type", where);
    if (!type.is_string()) throw ConfigError(where + "/type: expected trig or besicovitch");
    Weight w;
    if (type == "trig") {
      w = trig(field(j, "terms", where), d, where + "/terms");
    } else if (type == "besicovitch") {
      TrigPolynomial base = j.contains("base") ? trig(j.at("base"), d, where + "/base") : trig(json::array(), d, where);
      std::map<double, TrigPolynomial> approx;
      const auto& levels = field(j, "approximants", where);
      if (!levels.is_array()) throw ConfigError(where + "/approximants: expected a list");
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const std::string wi = where + "/approximants/" + std::to_string(i);
        const double eps = number(field(levels[i], "epsilon", wi), wi + "/epsilon");
        approx.emplace(eps, levels[i].contains("terms") ? trig(levels[i].at("terms"), d, wi + "/terms") : base);
      }
      Perturbation pert;
      if (j.contains("perturbation")) pert = perturbation(j.at("perturbation"), d, where + "/perturbation");
      std::optional<double> bound;
      if (j.contains("bound")) bound = number(j.at("bound"), where + "/bound");
      w = BesicovitchWeight(std::move(base), std::move(pert), std::move(approx), bound);
    } else {
      throw ConfigError(where + "/type: unknown weight type '" + type.get<std::string>() + "'");
    }
    if (j.contains("normalize") && j.at("normalize").is_boolean() && j.at("normalize").get<bool>()) {
      w = w.normalized();
    }
    return w;
  }

  Perturbation perturbation(const json& j, int d, const std::string& where) {
    const auto& rule = field(j, "rule", where);
    if (!rule.is_string()) throw ConfigError(where + "/rule: expected a name");
    const std::string r = rule.get<std::string>();
    if (r == "none") return std::monostate{};
    if (r == "decay") {
      return DecayPerturbation{number(field(j, "scale", where), where + "/scale"),
                               number(field(j, "exponent", where), where + "/exponent")};
    }
    if (r == "periodic") {
      PeriodicPerturbation p;
      p.period = int_list(field(j, "period", where), where + "/period");
      if (static_cast<int>(p.period.size()) != d) throw ConfigError(where + "/period: needs one entry per axis");
      const auto& vals = field(j, "values", where);
      if (!vals.is_array()) throw ConfigError(where + "/values: expected a list");
      for (const auto& v : vals) p.values.push_back(complex(v, where + "/values"));
      return p;
    }
    if (r == "seeded_noise") {
      const std::string tag = j.contains("tag") && j.at("tag").is_string() ? j.at("tag").get<std::string>() : where;
      return SeededNoisePerturbation{number(field(j, "amplitude", where), where + "/amplitude"),
                                     number(field(j, "exponent", where), where + "/exponent"),
                                     derive_key(seed_for(where), tag)};
    }
    throw ConfigError(where + "/rule: unknown perturbation rule '" + r + "'");
  }

 private:
  std::filesystem::path base_;
  std::optional<std::uint64_t> seed_;
};

Box parse_box(const json& j, int d, const std::string& where) {
  auto corner = [&](const char* name) {
    auto v = Parser::int_list(Parser::field(j, name, where), where + "/" + name);
    if (static_cast<int>(v.size()) != d) throw ConfigError(where + "/" + name + ": needs " + std::to_string(d) + " entries");
    return MultiIndex(std::move(v));
  };
  try {
    if (j.contains("cube")) {
      const auto v = Parser::int_list(j.at("cube"), where + "/cube");
      if (v.size() != 2) throw ConfigError(where + "/cube: expected [lo, hi]");
      return Box::cube(d, v[0], v[1]);
    }
    const MultiIndex upper = corner("upper");
    const MultiIndex lower = j.contains("lower") ? corner("lower") : MultiIndex::constant(d, 1);
    return Box(lower, upper);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AbsoluteContraction build_contraction(const AlgebraPtr& algebra, const ContractionDescription& description,
                                      double tol) {
  switch (description.kind) {
    case ContractionKind::convex_combination: {
      ConvexCombinationSpec s;
      s.weights = description.weights;
      for (const auto& p : description.parts) s.maps.push_back(build_contraction(algebra, p, tol));
      return construct_contraction(algebra, std::move(s), tol);
    }
    case ContractionKind::composition: {
      CompositionSpec s;
      for (const auto& p : description.parts) s.maps.push_back(build_contraction(algebra, p, tol));
      return construct_contraction(algebra, std::move(s), tol);
    }
    default:
      return construct_contraction(algebra, description.leaf, tol);
  }
}

ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir,
                              const ScenarioOverrides& overrides) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");

  ScenarioConfig c;
  std::string digest_input(json_text);
  if (overrides.seed) digest_input += "\nseed-override=" + std::to_string(*overrides.seed);
  if (overrides.budget) digest_input += "\nbudget=" + std::to_string(*overrides.budget);
  c.digest = fnv1a_hex(digest_input);

  c.name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "unnamed";
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a nonnegative 64-bit integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (overrides.seed) c.seed = overrides.seed;
  if (j.contains("tolerance")) c.tolerance = Parser::number(j.at("tolerance"), "tolerance");
  if (j.contains("budget")) {
    if (!j.at("budget").is_number_integer()) throw ConfigError("budget: expected an integer");
    c.budget = j.at("budget").get<std::int64_t>();
  }
  if (overrides.budget) c.budget = *overrides.budget;
  if (c.budget < 1) throw ConfigError("budget must be >= 1");
  if (j.contains("p")) c.p = Parser::number(j.at("p"), "p");

  Parser parser(base_dir, c.seed);
  {
    const auto& a = Parser::field(j, "algebra", "scenario");
    const auto dims = Parser::int_list(Parser::field(a, "blocks", "algebra"), "algebra/blocks");
    std::vector<double> weights(dims.size(), 1.0);
    if (a.contains("weights")) {
      const auto& w = a.at("weights");
      if (!w.is_array() || w.size() != dims.size()) throw ConfigError("algebra/weights: one weight per block");
      for (std::size_t i = 0; i < w.size(); ++i) weights[i] = Parser::number(w[i], "algebra/weights");
    }
    try {
      c.algebra = Algebra::make(dims, weights);
    } catch (const Error& e) {
      throw ConfigError(std::string("algebra: ") + e.what());
    }
    parser.algebra = c.algebra;
  }

  const auto& cs = Parser::field(j, "contractions", "scenario");
  if (!cs.is_array() || cs.empty()) throw ConfigError("contractions: expected a nonempty list (one map per axis)");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    c.contractions.push_back(parser.contraction(cs[i], "contractions/" + std::to_string(i)));
  }
  const int d = c.dimension();

  c.weight = j.contains("weight") ? parser.weight(j.at("weight"), d, "weight") : Weight::constant(d, 1.0);
  if (c.weight.dimension() != d) throw ConfigError("weight dimension differs from the number of contractions");
  c.x = j.contains("x") ? parser.element(j.at("x"), "x") : Element::identity(c.algebra);

  if (j.contains("dominant")) {
    const auto& dm = j.at("dominant");
    if (dm.contains("tol")) c.dominant.tol = Parser::number(dm.at("tol"), "dominant/tol");
    if (dm.contains("max_iterations")) {
      c.dominant.max_iterations = Parser::integer(dm.at("max_iterations"), "dominant/max_iterations");
    }
    if (dm.contains("method")) {
      if (!dm.at("method").is_string()) throw ConfigError("dominant/method: expected a name");
      c.dominant.method = dominant_method_from_string(dm.at("method").get<std::string>());
    }
  }

  if (j.contains("average")) {
    const auto& a = j.at("average");
    AverageTaskConfig t;
    t.box = parse_box(Parser::field(a, "box", "average"), d, "average/box");
    if (a.contains("evaluator")) {
      if (!a.at("evaluator").is_string()) throw ConfigError("average/evaluator: expected a name");
      t.evaluator = evaluator_from_string(a.at("evaluator").get<std::string>());
    }
    if (a.contains("threads")) t.threads = Parser::integer(a.at("threads"), "average/threads");
    if (a.contains("limit_epsilon")) t.limit_epsilon = Parser::number(a.at("limit_epsilon"), "average/limit_epsilon");
    c.average = t;
  }
  if (j.contains("maximal")) {
    const auto& m = j.at("maximal");
    MaximalTaskConfig t;
    t.p = m.contains("p") ? Parser::number(m.at("p"), "maximal/p") : c.p;
    if (m.contains("cutoffs")) t.cutoffs = Parser::int_list(m.at("cutoffs"), "maximal/cutoffs");
    if (m.contains("cauchy_slack")) t.cauchy_slack = Parser::number(m.at("cauchy_slack"), "maximal/cauchy_slack");
    c.maximal = t;
  }
  if (j.contains("besicovitch")) {
    const auto& b = j.at("besicovitch");
    BesicovitchTaskConfig t;
    t.epsilon = Parser::number(Parser::field(b, "epsilon", "besicovitch"), "besicovitch/epsilon");
    auto cut = Parser::int_list(Parser::field(b, "cutoff", "besicovitch"), "besicovitch/cutoff");
    if (static_cast<int>(cut.size()) != d) throw ConfigError("besicovitch/cutoff: needs one entry per axis");
    for (int v : cut) {
      if (v < 1) throw ConfigError("besicovitch/cutoff: entries must be >= 1");
    }
    t.cutoff = MultiIndex(std::move(cut));
    if (b.contains("onset")) t.onset = Parser::integer(b.at("onset"), "besicovitch/onset");
    c.besicovitch = t;
  }
  if (j.contains("certify")) {
    const auto& b = j.at("certify");
    CertifyTaskConfig t;
    t.p = b.contains("p") ? Parser::number(b.at("p"), "certify/p") : c.p;
    if (b.contains("epsilon")) t.epsilon = Parser::number(b.at("epsilon"), "certify/epsilon");
    if (b.contains("lambda") && !b.at("lambda").is_null()) t.lambda = Parser::number(b.at("lambda"), "certify/lambda");
    if (b.contains("box_upper")) t.box_upper = Parser::integer(b.at("box_upper"), "certify/box_upper");
    if (b.contains("onsets")) t.onsets = Parser::int_list(b.at("onsets"), "certify/onsets");
    if (t.box_upper < 1) throw ConfigError("certify/box_upper must be >= 1");
    c.certify = t;
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str(), path.parent_path(), overrides);
}

}  // namespace nclab
