#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nclab/averages.hpp"

namespace nclab {

inline constexpr const char* kReportSchema = "nclab.report/1";

std::string tool_version();

/// Empty cells print as "" in CSV and null in the structured report.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

struct TaskResult {
  std::string name;
  /// "ok", "failed" or "skipped".
  std::string status = "ok";
  std::string message;
  std::vector<std::string> warnings;
  OperationCounts operations;
  /// Wall-clock seconds, only recorded on request.
  std::optional<double> seconds;
};

struct Artifact {
  std::string name;
  std::string text;
};

struct RunReport {
  std::string schema = kReportSchema;
  std::string tool_version;
  std::string scenario_name;
  std::string digest;
  std::optional<std::uint64_t> seed;
  std::vector<TaskResult> tasks;
  std::vector<Table> tables;
  std::vector<Artifact> artifacts;

  bool failed() const;
  const Table* table(std::string_view name) const;
};

/// Single JSON document. Floating-point values use 17 significant digits.
std::string to_structured(const RunReport& report);

/// Parses a structured report and writes it again with the same rules.
std::string reemit_structured(std::string_view text);

std::string to_csv(const Table& table);

enum class ReportFormat { structured, tabular, both };

ReportFormat report_format_from_string(std::string_view name);

/// Writes report.json and/or one <table>.csv per table into dir. Returns the
/// paths written.
std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::filesystem::path& dir,
                                               ReportFormat format);

}  // namespace nclab
