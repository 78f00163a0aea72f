#include "nclab/runner.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "nclab/bau.hpp"
#include "nclab/errors.hpp"
#include "nclab/text_format.hpp"

namespace nclab {

namespace {

constexpr Task kOrder[] = {Task::verify, Task::average, Task::maximal, Task::besicovitch, Task::certify};

std::vector<Task> dependencies(Task t) {
  switch (t) {
    case Task::average:
    case Task::maximal: return {Task::verify};
    case Task::certify: return {Task::verify, Task::average};
    default: return {};
  }
}

std::vector<std::string> index_columns(int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i) out.push_back("n_" + std::to_string(i));
  return out;
}

std::vector<Cell> index_cells(std::span<const int> n) {
  std::vector<Cell> out;
  for (int v : n) out.emplace_back(static_cast<std::int64_t>(v));
  return out;
}

Table make_table(std::string name, int d) {
  Table t;
  t.header = table_header(name, d);
  t.name = std::move(name);
  return t;
}

struct State {
  const ScenarioConfig& config;
  std::vector<AbsoluteContraction> maps;
  std::optional<LimitResult> limit;
  RunReport& report;
};

std::optional<double> limit_level(const ScenarioConfig& c) {
  if (c.average && c.average->limit_epsilon) return c.average->limit_epsilon;
  if (c.besicovitch) return c.besicovitch->epsilon;
  if (c.certify) return c.certify->epsilon;
  return std::nullopt;
}

// Limit of the averages when one is available for the configured weight.
const LimitResult* ensure_limit(State& s, TaskResult& task) {
  if (s.limit) return &*s.limit;
  const Weight& w = s.config.weight;
  if (w.trig()) {
    s.limit = limit_oracle(*w.trig(), s.maps, s.config.x);
  } else if (w.besicovitch()) {
    const auto level = limit_level(s.config);
    if (!level) return nullptr;
    s.limit = limit_estimate(w, s.maps, s.config.x, *level);
  } else {
    return nullptr;
  }
  for (const auto& msg : s.limit->warnings) task.warnings.push_back(msg);
  return &*s.limit;
}

void run_verify(State& s, TaskResult& task) {
  Table t = make_table("verify", s.config.dimension());
  s.maps.clear();
  for (std::size_t i = 0; i < s.config.contractions.size(); ++i) {
    AbsoluteContraction m;
    try {
      m = build_contraction(s.config.algebra, s.config.contractions[i], s.config.tolerance);
    } catch (const ContractionRejected& e) {
      s.report.tables.push_back(std::move(t));
      std::string detail = e.what();
      if (detail.starts_with(e.condition() + ": ")) detail.erase(0, e.condition().size() + 2);
      throw ContractionRejected(e.condition(), detail + " (axis " + std::to_string(i + 1) + ")");
    }
    const auto& v = m.verification();
    t.add_row({static_cast<std::int64_t>(i + 1), std::string(to_string(m.kind())), v.subunital_margin,
               v.trace_margin, v.choi_min_eig, v.hermiticity_preserving, m.positivity_verified(), v.passed,
               std::string("choi")});
    if (!m.positivity_verified()) {
      task.warnings.push_back("axis " + std::to_string(i + 1) + ": positivity unverified (Choi matrix not positive)");
    }
    s.maps.push_back(std::move(m));
  }
  s.report.tables.push_back(std::move(t));
}

void run_average(State& s, TaskResult& task) {
  const auto& c = s.config;
  if (!c.average) throw ConfigError("scenario has no 'average' section");
  const auto& cfg = *c.average;
  const int d = c.dimension();
  if (cfg.box.dimension() != d) throw ConfigError("average box dimension differs from the number of contractions");
  const LimitResult* limit = ensure_limit(s, task);
  Table t = make_table("averages", d);
  auto row = [&](std::span<const int> n, const Element& a) {
    auto cells = index_cells(n);
    cells.emplace_back(std::string(to_string(cfg.evaluator)));
    cells.emplace_back(lp_norm(a, 2.0));
    if (limit) {
      cells.emplace_back(lp_norm(a - limit->value, 2.0));
    } else {
      cells.emplace_back(std::monostate{});
    }
    t.add_row(std::move(cells));
  };
  if (cfg.evaluator == Evaluator::grid) {
    GridOptions opt;
    opt.budget = c.budget;
    opt.threads = cfg.threads;
    const AverageFamily fam = weighted_average_grid(c.weight, s.maps, c.x, cfg.box, opt, &task.operations);
    std::size_t i = 0;
    cfg.box.for_each([&](std::span<const int> n) { row(n, fam.values()[i++]); });
  } else {
    cfg.box.for_each([&](std::span<const int> n) {
      const MultiIndex idx(std::vector<int>(n.begin(), n.end()));
      row(n, weighted_average(cfg.evaluator, c.weight, s.maps, c.x, idx, c.budget, &task.operations));
    });
  }
  s.report.tables.push_back(std::move(t));
}

void run_maximal(State& s, TaskResult&) {
  const auto& c = s.config;
  if (!c.maximal) throw ConfigError("scenario has no 'maximal' section");
  MaximalOptions opt;
  opt.cauchy_slack = c.maximal->cauchy_slack;
  opt.budget = c.budget;
  opt.dominant = c.dominant;
  const MaximalReport r = maximal_inequality_report(s.maps, c.x, c.maximal->p, c.maximal->cutoffs, opt);
  Table t = make_table("maximal", c.dimension());
  for (const auto& rung : r.rungs) {
    t.add_row({static_cast<std::int64_t>(rung.cutoff), rung.family_size, rung.norm, rung.lower_bound, rung.ratio,
               static_cast<std::int64_t>(rung.iterations), rung.converged, std::string("grid+dominant")});
  }
  s.report.tables.push_back(std::move(t));
  Table sum = make_table("maximal_summary", c.dimension());
  sum.add_row({r.p, r.x_norm, r.nondecreasing, r.cauchy, r.last_relative_change, r.partial,
               std::string("grid+dominant")});
  s.report.tables.push_back(std::move(sum));
}

void run_besicovitch(State& s, TaskResult& task) {
  const auto& c = s.config;
  if (!c.besicovitch) throw ConfigError("scenario has no 'besicovitch' section");
  const BesicovitchWeight* w = c.weight.besicovitch();
  if (!w) throw DomainError("the besicovitch task needs a weight of type 'besicovitch'");
  const auto& cfg = *c.besicovitch;
  const BesicovitchReport r = verify_besicovitch(*w, cfg.epsilon, cfg.cutoff, cfg.onset, c.budget);
  task.operations.lattice_points += cfg.cutoff.cardinality();
  task.operations.weight_evaluations += cfg.cutoff.cardinality();
  const int d = c.dimension();
  Table t = make_table("besicovitch", d);
  std::int64_t i = 0;
  for (const auto& rung : r.rungs) {
    std::vector<Cell> cells{++i};
    for (auto& cell : index_cells(rung.upper.components())) cells.push_back(std::move(cell));
    cells.emplace_back(static_cast<std::int64_t>(rung.m));
    cells.emplace_back(rung.discrepancy);
    cells.emplace_back(rung.below_epsilon);
    cells.emplace_back(std::string("prefix_table"));
    t.add_row(std::move(cells));
  }
  s.report.tables.push_back(std::move(t));
  Table sum = make_table("besicovitch_summary", d);
  sum.add_row({r.epsilon, r.approximant_level, static_cast<std::int64_t>(r.configured_onset),
               r.observed_onset ? Cell(static_cast<std::int64_t>(*r.observed_onset)) : Cell(std::monostate{}), r.passed,
               r.evidence, std::string("prefix_table")});
  s.report.tables.push_back(std::move(sum));
}

void run_certify(State& s, TaskResult& task) {
  const auto& c = s.config;
  if (!c.certify) throw ConfigError("scenario has no 'certify' section");
  const auto& cfg = *c.certify;
  const LimitResult* limit = ensure_limit(s, task);
  if (!limit) throw UnsupportedError("no limit is available for this weight, so residuals cannot be formed");
  const int d = c.dimension();
  GridOptions opt;
  opt.budget = c.budget;
  const AverageFamily fam =
      weighted_average_grid(c.weight, s.maps, c.x, Box::cube(d, 1, cfg.box_upper), opt, &task.operations);
  const AverageFamily residuals = fam.minus(limit->value, "grid residual");
  BauOptions bo;
  bo.lambda = cfg.lambda;
  bo.dominant = c.dominant;
  Table t = make_table("certificates", d);
  for (int n0 : cfg.onsets) {
    if (residuals.tail_indices(n0).empty()) {
      task.warnings.push_back("onset " + std::to_string(n0) + " has an empty tail in the residual box");
      continue;
    }
    const BauCertificate cert = certify_residuals(residuals, n0, cfg.p, cfg.epsilon, bo);
    const SoundnessReport sound = verify_certificate(cert, residuals.tail(n0), cfg.p);
    t.add_row({static_cast<std::int64_t>(n0), cert.epsilon, cert.lambda, cert.trace_complement, cert.tail_sup,
               cert.dominant_norm, cert.tail_size, cert.kind, cert.tight, sound.passed,
               std::string("dominant+chebyshev")});
    for (const auto& w : cert.warnings) task.warnings.push_back("onset " + std::to_string(n0) + ": " + w);
    s.report.artifacts.push_back({"certificate_e_onset_" + std::to_string(n0), format_element(cert.e.element())});
  }
  s.report.tables.push_back(std::move(t));
}

}  // namespace

std::string_view to_string(Task t) {
  switch (t) {
    case Task::verify: return "verify";
    case Task::average: return "average";
    case Task::maximal: return "maximal";
    case Task::besicovitch: return "besicovitch";
    case Task::certify: return "certify";
  }
  return "verify";
}

Task task_from_string(std::string_view name) {
  for (Task t : kOrder) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

std::vector<std::string> table_header(std::string_view table, int d) {
  auto with_index = [d](std::vector<std::string> pre, std::vector<std::string> post) {
    for (auto& c : index_columns(d)) pre.push_back(std::move(c));
    for (auto& c : post) pre.push_back(std::move(c));
    return pre;
  };
  if (table == "verify") {
    return {"axis", "kind", "subunital_margin", "trace_margin", "choi_min_eig", "hermiticity_preserving",
            "positivity_verified", "passed", "evaluator"};
  }
  if (table == "averages") return with_index({}, {"evaluator", "norm_l2", "error_l2"});
  if (table == "maximal") {
    return {"cutoff", "family_size", "norm", "lower_bound", "ratio", "iterations", "converged", "evaluator"};
  }
  if (table == "maximal_summary") {
    return {"p", "x_norm", "nondecreasing", "cauchy", "last_relative_change", "partial", "evaluator"};
  }
  if (table == "besicovitch") return with_index({"rung"}, {"m", "discrepancy", "below_epsilon", "evaluator"});
  if (table == "besicovitch_summary") {
    return {"epsilon", "approximant_level", "configured_onset", "observed_onset", "passed", "evidence", "evaluator"};
  }
  if (table == "certificates") {
    return {"onset",     "epsilon",   "lambda", "trace_complement", "tail_sup", "dominant_norm",
            "tail_size", "kind",      "tight",  "sound",            "evaluator"};
  }
  throw StructuralError("unknown table '" + std::string(table) + "'");
}

RunReport run_scenario(const ScenarioConfig& config, std::span<const Task> tasks, const RunOptions& options) {
  RunReport report;
  report.tool_version = tool_version();
  report.scenario_name = config.name;
  report.digest = config.digest;
  report.seed = config.seed;

  std::map<Task, bool> wanted;
  std::function<void(Task)> want = [&](Task t) {
    if (wanted[t]) return;
    wanted[t] = true;
    for (Task dep : dependencies(t)) want(dep);
  };
  for (Task t : tasks) want(t);

  State state{config, {}, std::nullopt, report};
  std::map<Task, std::string> status;
  for (Task t : kOrder) {
    if (!wanted[t]) continue;
    TaskResult r;
    r.name = std::string(to_string(t));
    std::string failed_dep;
    for (Task dep : dependencies(t)) {
      if (status[dep] != "ok") failed_dep = std::string(to_string(dep));
    }
    if (!failed_dep.empty()) {
      r.status = "skipped";
      r.message = "dependency '" + failed_dep + "' did not succeed";
    } else {
      const auto start = std::chrono::steady_clock::now();
      try {
        switch (t) {
          case Task::verify: run_verify(state, r); break;
          case Task::average: run_average(state, r); break;
          case Task::maximal: run_maximal(state, r); break;
          case Task::besicovitch: run_besicovitch(state, r); break;
          case Task::certify: run_certify(state, r); break;
        }
      } catch (const std::exception& e) {
        r.status = "failed";
        r.message = e.what();
      }
      if (options.timings) {
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    }
    status[t] = r.status;
    report.tasks.push_back(std::move(r));
  }
  return report;
}

}  // namespace nclab
