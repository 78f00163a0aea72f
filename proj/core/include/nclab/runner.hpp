#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nclab/report.hpp"
#include "nclab/scenario.hpp"

namespace nclab {

enum class Task { verify, average, maximal, besicovitch, certify };

std::string_view to_string(Task t);
Task task_from_string(std::string_view name);

struct RunOptions {
  /// Record wall-clock seconds per task. Off by default so that reports are
  /// byte-identical across runs.
  bool timings = false;
};

/// Runs the requested tasks and their dependencies in the order verify,
/// average, maximal, besicovitch, certify. Errors are captured per task;
/// tasks depending on a failed task are skipped.
RunReport run_scenario(const ScenarioConfig& config, std::span<const Task> tasks, const RunOptions& options = {});

/// Pinned header of each table for index dimension d.
std::vector<std::string> table_header(std::string_view table, int d);

}  // namespace nclab
