#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "nclab/errors.hpp"
#include "nclab/runner.hpp"
#include "nclab/scenario.hpp"

using namespace nclab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nclab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<Task> configured_tasks(const ScenarioConfig& c) {
  std::vector<Task> t{Task::verify};
  if (c.average) t.push_back(Task::average);
  if (c.maximal) t.push_back(Task::maximal);
  if (c.besicovitch) t.push_back(Task::besicovitch);
  if (c.certify) t.push_back(Task::certify);
  return t;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(NCLAB_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kMinimal = R"({"name": "m", "algebra": {"blocks": [2]}, "contractions": [{"kind": "scaled_unitary"}]})";

}  // namespace

TEST(Runner, IdentityMapAveragesEqualX) {
  const ScenarioConfig c = load_scenario(nclab_test::data_dir() / "identity_map.json");
  const std::vector<Task> tasks{Task::average};
  const RunReport r = run_scenario(c, tasks);
  ASSERT_FALSE(r.failed());
  const Table* t = r.table("averages");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->rows.size(), 16u);
  const double x_norm = lp_norm(c.x, 2.0);
  for (const auto& row : t->rows) {
    EXPECT_DOUBLE_EQ(std::get<double>(row[3]), x_norm);
    EXPECT_EQ(std::get<double>(row[4]), 0.0);
    EXPECT_EQ(std::get<std::string>(row[2]), "grid");
  }
}

TEST(Runner, InvalidKrausSkipsDependents) {
  const ScenarioConfig c = load_scenario(nclab_test::data_dir() / "invalid_kraus.json");
  const std::vector<Task> tasks{Task::verify, Task::average};
  const RunReport r = run_scenario(c, tasks);
  ASSERT_EQ(r.tasks.size(), 2u);
  EXPECT_EQ(r.tasks[0].status, "failed");
  EXPECT_NE(r.tasks[0].message.find("sum K_j* K_j <= 1"), std::string::npos);
  EXPECT_EQ(r.tasks[1].status, "skipped");
  EXPECT_TRUE(r.failed());
}

TEST(Runner, DependenciesAreAddedAndOrdered) {
  const ScenarioConfig c = load_scenario(nclab_test::data_dir() / "seeded_maximal.json");
  const std::vector<Task> tasks{Task::certify};
  const RunReport r = run_scenario(c, tasks);
  ASSERT_EQ(r.tasks.size(), 3u);
  EXPECT_EQ(r.tasks[0].name, "verify");
  EXPECT_EQ(r.tasks[1].name, "average");
  EXPECT_EQ(r.tasks[2].name, "certify");
  EXPECT_FALSE(r.failed());
  EXPECT_FALSE(r.tasks[2].seconds.has_value());
}

TEST(Runner, RepeatedRunsAreByteIdentical) {
  for (const char* f : {"seeded_maximal.json", "pinching_trig_2d.json", "besicovitch_decay.json"}) {
    const ScenarioConfig c = load_scenario(nclab_test::data_dir() / f);
    const auto tasks = configured_tasks(c);
    EXPECT_EQ(to_structured(run_scenario(c, tasks)), to_structured(run_scenario(c, tasks))) << f;
  }
}

TEST(Runner, EveryNumericRowCarriesEvaluator) {
  const ScenarioConfig c = load_scenario(nclab_test::data_dir() / "seeded_maximal.json");
  const RunReport r = run_scenario(c, configured_tasks(c));
  for (const auto& t : r.tables) {
    const auto it = std::find(t.header.begin(), t.header.end(), "evaluator");
    ASSERT_NE(it, t.header.end()) << t.name;
    const auto col = static_cast<std::size_t>(it - t.header.begin());
    for (const auto& row : t.rows) EXPECT_FALSE(std::get<std::string>(row[col]).empty());
  }
}

TEST(Report, PinnedHeaders) {
  EXPECT_EQ(table_header("averages", 2),
            (std::vector<std::string>{"n_1", "n_2", "evaluator", "norm_l2", "error_l2"}));
  EXPECT_EQ(table_header("maximal", 1), (std::vector<std::string>{"cutoff", "family_size", "norm", "lower_bound",
                                                                  "ratio", "iterations", "converged", "evaluator"}));
  EXPECT_EQ(table_header("besicovitch", 1),
            (std::vector<std::string>{"rung", "n_1", "m", "discrepancy", "below_epsilon", "evaluator"}));
  EXPECT_EQ(table_header("certificates", 2),
            (std::vector<std::string>{"onset", "epsilon", "lambda", "trace_complement", "tail_sup", "dominant_norm",
                                      "tail_size", "kind", "tight", "sound", "evaluator"}));
  EXPECT_EQ(table_header("verify", 3),
            (std::vector<std::string>{"axis", "kind", "subunital_margin", "trace_margin", "choi_min_eig",
                                      "hermiticity_preserving", "positivity_verified", "passed", "evaluator"}));
  EXPECT_THROW(table_header("nope", 1), StructuralError);
}

TEST(Report, EmptyTaskSetHasMetadataOnly) {
  const ScenarioConfig c = parse_scenario(kMinimal);
  const RunReport r = run_scenario(c, {});
  EXPECT_TRUE(r.tasks.empty());
  EXPECT_TRUE(r.tables.empty());
  const auto doc = nlohmann::json::parse(to_structured(r));
  EXPECT_EQ(doc["schema"], kReportSchema);
  EXPECT_EQ(doc["scenario"]["digest"], c.digest);
  EXPECT_TRUE(doc["tables"].empty());
}

TEST(Report, AveragesCsvOnFourByFour) {
  const ScenarioConfig c = load_scenario(nclab_test::data_dir() / "identity_map.json");
  const std::vector<Task> tasks{Task::average};
  const fs::path dir = scratch("csv");
  const auto files = emit_report(run_scenario(c, tasks), dir, ReportFormat::both);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  const std::string csv = slurp(dir / "averages.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n_1,n_2,evaluator,norm_l2,error_l2");
}

TEST(Report, StructuredRoundTrip) {
  const ScenarioConfig c = load_scenario(nclab_test::data_dir() / "pinching_trig_2d.json");
  const std::string text = to_structured(run_scenario(c, configured_tasks(c)));
  EXPECT_EQ(reemit_structured(text), text);
}

TEST(Report, SeventeenDigitsAndSpecialValues) {
  RunReport r;
  Table t;
  t.name = "t";
  t.header = {"a", "b", "c", "d", "evaluator"};
  t.add_row({0.1, -0.0, std::nan(""), std::monostate{}, std::string("x")});
  r.tables.push_back(t);
  const std::string csv = to_csv(r.tables[0]);
  EXPECT_NE(csv.find("0.10000000000000001,0,"), std::string::npos) << csv;
  const auto doc = nlohmann::json::parse(to_structured(r));
  EXPECT_TRUE(doc["tables"][0]["rows"][0][2].is_null());
  EXPECT_THROW(t.add_row({1.0}), IntegrityError);
}

TEST(Report, UnwritableDestination) {
  const ScenarioConfig c = parse_scenario(kMinimal);
  const fs::path file = scratch("unwritable") / "plain_file";
  std::ofstream(file) << "x";
  EXPECT_THROW(emit_report(run_scenario(c, {}), file / "sub", ReportFormat::structured), IoError);
}

TEST(Scenario, DigestTracksOverrides) {
  const ScenarioConfig a = parse_scenario(kMinimal);
  const ScenarioConfig b = parse_scenario(kMinimal);
  ScenarioOverrides o;
  o.budget = 1000;
  const ScenarioConfig c = parse_scenario(kMinimal, {}, o);
  EXPECT_EQ(a.digest, b.digest);
  EXPECT_NE(a.digest, c.digest);
  EXPECT_EQ(c.budget, 1000);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Scenario, RandomnessNeedsSeed) {
  const char* text = R"({"algebra": {"blocks": [2]}, "contractions": [{"kind": "scaled_unitary"}],
                         "x": {"random": "positive"}})";
  EXPECT_THROW(parse_scenario(text), ConfigError);
  ScenarioOverrides o;
  o.seed = 7;
  EXPECT_NO_THROW(parse_scenario(text, {}, o));
}

TEST(Scenario, DimensionMismatchRejected) {
  const char* text = R"({"algebra": {"blocks": [2]}, "contractions": [{"kind": "scaled_unitary"}],
                         "weight": {"type": "trig", "terms": [[1, 0, 0, 0]]}})";
  EXPECT_THROW(parse_scenario(text), ConfigError);
  const char* box = R"({"algebra": {"blocks": [2]}, "contractions": [{"kind": "scaled_unitary"}],
                        "average": {"box": {"upper": [4, 4]}}})";
  EXPECT_THROW(parse_scenario(box), ConfigError);
}

TEST(Scenario, MissingFileReported) {
  const char* text = R"({"algebra": {"blocks": [2]}, "contractions": [{"kind": "scaled_unitary"}],
                         "x": {"file": "does_not_exist.txt"}})";
  EXPECT_THROW(parse_scenario(text, nclab_test::data_dir()), ConfigError);
}

TEST(Scenario, SeededElementsDependOnTagOnly) {
  const char* one = R"({"seed": 3, "algebra": {"blocks": [2]}, "contractions": [{"kind": "scaled_unitary"}],
                        "x": {"random": "positive", "tag": "x"}})";
  const char* two = R"({"seed": 3, "algebra": {"blocks": [2]},
                        "contractions": [{"kind": "scaled_unitary", "unitary": {"random": "unitary", "tag": "u"}}],
                        "x": {"random": "positive", "tag": "x"}})";
  EXPECT_EQ(max_abs_difference(parse_scenario(one).x, parse_scenario(two).x), 0.0);
}

TEST(Tool, ExitStatusAndByteIdenticalFiles) {
  const fs::path a = scratch("tool_a"), b = scratch("tool_b");
  const std::string cfg = "--config " + (nclab_test::data_dir() / "seeded_maximal.json").string();
  EXPECT_EQ(run_tool(cfg + " --out " + a.string() + " run"), 0);
  EXPECT_EQ(run_tool(cfg + " --out " + b.string() + " run"), 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
  }
  EXPECT_TRUE(fs::exists(a / "maximal.csv"));
  const std::string bad = "--config " + (nclab_test::data_dir() / "invalid_kraus.json").string();
  EXPECT_NE(run_tool(bad + " --out " + scratch("tool_bad").string() + " run --tasks verify,average"), 0);
}

TEST(Tool, AverageSubcommandOverridesBox) {
  const fs::path dir = scratch("tool_avg");
  const std::string cfg = "--config " + (nclab_test::data_dir() / "identity_map.json").string();
  ASSERT_EQ(run_tool(cfg + " --out " + dir.string() + " --format tabular average --upper 3,2 --evaluator direct"), 0);
  const std::string csv = slurp(dir / "averages.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_NE(csv.find(",direct,"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "report.json"));
}
