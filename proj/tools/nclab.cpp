// nclab: run scenario files and emit reports.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nclab/errors.hpp"
#include "nclab/runner.hpp"
#include "nclab/scenario.hpp"

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  std::string format = "both";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
  bool timings = false;
};

struct AverageFlags {
  std::vector<int> lower, upper;
  std::optional<std::string> evaluator;
  std::optional<int> threads;
};

struct MaximalFlags {
  std::optional<double> p;
  std::vector<int> cutoffs;
};

struct BesicovitchFlags {
  std::optional<double> epsilon;
  std::vector<int> cutoff;
  std::optional<int> onset;
};

struct CertifyFlags {
  std::optional<double> epsilon, lambda, p;
  std::vector<int> onsets;
  std::optional<int> box_upper;
};

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Applies subcommand flags and returns a description of them for the digest.
std::string apply_average(nclab::ScenarioConfig& c, const AverageFlags& f) {
  std::string tag;
  if (!c.average) c.average.emplace();
  auto& a = *c.average;
  if (!f.upper.empty()) {
    std::vector<int> lower = f.lower.empty() ? std::vector<int>(f.upper.size(), 1) : f.lower;
    a.box = nclab::Box(nclab::MultiIndex(lower), nclab::MultiIndex(f.upper));
    tag += "|box=" + join(lower) + ":" + join(f.upper);
  } else if (!f.lower.empty()) {
    throw nclab::ConfigError("--lower requires --upper");
  }
  if (f.evaluator) {
    a.evaluator = nclab::evaluator_from_string(*f.evaluator);
    tag += "|evaluator=" + *f.evaluator;
  }
  if (f.threads) a.threads = *f.threads;
  return tag;
}

std::string apply_maximal(nclab::ScenarioConfig& c, const MaximalFlags& f) {
  std::string tag;
  if (!c.maximal) c.maximal.emplace();
  if (f.p) {
    c.maximal->p = *f.p;
    tag += "|p=" + std::to_string(*f.p);
  }
  if (!f.cutoffs.empty()) {
    c.maximal->cutoffs = f.cutoffs;
    tag += "|cutoffs=" + join(f.cutoffs);
  }
  return tag;
}

std::string apply_besicovitch(nclab::ScenarioConfig& c, const BesicovitchFlags& f) {
  std::string tag;
  if (!c.besicovitch) c.besicovitch.emplace();
  auto& b = *c.besicovitch;
  if (f.epsilon) {
    b.epsilon = *f.epsilon;
    tag += "|epsilon=" + std::to_string(*f.epsilon);
  }
  if (!f.cutoff.empty()) {
    b.cutoff = nclab::MultiIndex(f.cutoff);
    tag += "|cutoff=" + join(f.cutoff);
  }
  if (f.onset) {
    b.onset = *f.onset;
    tag += "|onset=" + std::to_string(*f.onset);
  }
  return tag;
}

std::string apply_certify(nclab::ScenarioConfig& c, const CertifyFlags& f) {
  std::string tag;
  if (!c.certify) c.certify.emplace();
  auto& k = *c.certify;
  if (f.epsilon) {
    k.epsilon = *f.epsilon;
    tag += "|epsilon=" + std::to_string(*f.epsilon);
  }
  if (f.lambda) {
    k.lambda = *f.lambda;
    tag += "|lambda=" + std::to_string(*f.lambda);
  }
  if (f.p) {
    k.p = *f.p;
    tag += "|p=" + std::to_string(*f.p);
  }
  if (!f.onsets.empty()) {
    k.onsets = f.onsets;
    tag += "|onsets=" + join(f.onsets);
  }
  if (f.box_upper) {
    k.box_upper = *f.box_upper;
    tag += "|box_upper=" + std::to_string(*f.box_upper);
  }
  return tag;
}

void print_report(const nclab::RunReport& report, nclab::ReportFormat format) {
  if (format != nclab::ReportFormat::tabular) std::cout << nclab::to_structured(report);
  if (format != nclab::ReportFormat::structured) {
    for (const auto& t : report.tables) std::cout << "# " << t.name << "\n" << nclab::to_csv(t);
  }
}

void summarize(const nclab::RunReport& report) {
  for (const auto& t : report.tasks) {
    std::cerr << t.name << ": " << t.status;
    if (!t.message.empty()) std::cerr << " (" << t.message << ")";
    std::cerr << "\n";
    for (const auto& w : t.warnings) std::cerr << "  warning: " << w << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted ergodic averages in finite von Neumann algebras"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory; reports go to stdout when omitted");
  app.add_option("--format", g.format, "structured, tabular or both")
      ->check(CLI::IsMember({"structured", "tabular", "both"}));
  app.add_option("--seed-override", g.seed, "Replace the scenario seed");
  app.add_option("--budget", g.budget, "Lattice point budget");
  app.add_flag("--timings", g.timings, "Record wall-clock seconds per task (breaks byte identity)");

  auto* verify = app.add_subcommand("verify", "Check that each contraction is absolute");

  AverageFlags af;
  auto* average = app.add_subcommand("average", "Weighted averages over a box");
  average->add_option("--lower", af.lower, "Lower box corner, e.g. 1,1")->delimiter(',');
  average->add_option("--upper", af.upper, "Upper box corner, e.g. 16,16")->delimiter(',');
  average->add_option("--evaluator", af.evaluator, "direct, grid or factorized")
      ->check(CLI::IsMember({"direct", "grid", "factorized"}));
  average->add_option("--threads", af.threads, "Worker threads for the grid evaluator")->check(CLI::PositiveNumber);

  MaximalFlags mf;
  auto* maximal = app.add_subcommand("maximal", "Dominant-element ladder for the maximal inequality");
  maximal->add_option("--p", mf.p, "Exponent p >= 1");
  maximal->add_option("--cutoffs", mf.cutoffs, "Cutoff ladder, e.g. 4,8,16,32")->delimiter(',');

  BesicovitchFlags bf;
  auto* besicovitch = app.add_subcommand("besicovitch", "Cesaro approximation check of a Besicovitch weight");
  besicovitch->add_option("--epsilon", bf.epsilon, "Approximation level");
  besicovitch->add_option("--cutoff", bf.cutoff, "Largest box corner, e.g. 200 or 64,64")->delimiter(',');
  besicovitch->add_option("--onset", bf.onset, "Smallest m from which the discrepancy must stay below epsilon");

  CertifyFlags cf;
  auto* certify = app.add_subcommand("certify", "Bilateral almost uniform convergence certificates");
  certify->add_option("--epsilon", cf.epsilon, "Trace budget of the exceptional projection");
  certify->add_option("--lambda", cf.lambda, "Uniform bound; epsilon is then back-computed");
  certify->add_option("--p", cf.p, "Exponent used by the Chebyshev cut");
  certify->add_option("--onsets", cf.onsets, "Tail onsets N0, e.g. 8,16,32")->delimiter(',');
  certify->add_option("--box-upper", cf.box_upper, "Residual box is [1, box-upper]^d");

  std::vector<std::string> task_names;
  auto* run = app.add_subcommand("run", "Run several tasks from one scenario");
  run->add_option("--tasks", task_names, "Tasks, e.g. verify,average,certify; defaults to every configured task")
      ->delimiter(',')
      ->check(CLI::IsMember({"verify", "average", "maximal", "besicovitch", "certify"}));

  CLI11_PARSE(app, argc, argv);

  try {
    nclab::ScenarioOverrides overrides;
    overrides.seed = g.seed;
    overrides.budget = g.budget;
    nclab::ScenarioConfig config = nclab::load_scenario(g.config, overrides);

    std::vector<nclab::Task> tasks;
    std::string tag;
    if (verify->parsed()) {
      tasks = {nclab::Task::verify};
    } else if (average->parsed()) {
      tag = apply_average(config, af);
      tasks = {nclab::Task::average};
    } else if (maximal->parsed()) {
      tag = apply_maximal(config, mf);
      tasks = {nclab::Task::maximal};
    } else if (besicovitch->parsed()) {
      tag = apply_besicovitch(config, bf);
      tasks = {nclab::Task::besicovitch};
    } else if (run->parsed()) {
      if (task_names.empty()) {
        tasks.push_back(nclab::Task::verify);
        if (config.average) tasks.push_back(nclab::Task::average);
        if (config.maximal) tasks.push_back(nclab::Task::maximal);
        if (config.besicovitch) tasks.push_back(nclab::Task::besicovitch);
        if (config.certify) tasks.push_back(nclab::Task::certify);
      }
      for (const auto& name : task_names) tasks.push_back(nclab::task_from_string(name));
    } else {
      tag = apply_certify(config, cf);
      tasks = {nclab::Task::certify};
    }
    if (!tag.empty()) config.digest = nclab::fnv1a_hex(config.digest + tag);

    nclab::RunOptions options;
    options.timings = g.timings;
    const nclab::RunReport report = nclab::run_scenario(config, tasks, options);
    const auto format = nclab::report_format_from_string(g.format);
    if (g.out.empty()) {
      print_report(report, format);
    } else {
      for (const auto& path : nclab::emit_report(report, g.out, format)) std::cerr << "wrote " << path.string() << "\n";
    }
    summarize(report);
    return report.failed() ? 1 : 0;
  } catch (const nclab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
