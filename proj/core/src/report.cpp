#include "nclab/report.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "nclab/errors.hpp"
#include "nclab/text_format.hpp"

#ifndef NCLAB_VERSION
#define NCLAB_VERSION "0.0.0"
#endif

namespace nclab {

namespace {

using ojson = nlohmann::ordered_json;

void write_string(std::string& out, std::string_view s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void write_value(std::string& out, const ojson& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case ojson::value_t::null: out += "null"; break;
    case ojson::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
    case ojson::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
    case ojson::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
    case ojson::value_t::number_float: {
      const double d = v.get<double>();
      // -0 would read back as the integer 0.
      out += !std::isfinite(d) ? "null" : d == 0.0 ? "0" : format_double(d);
      break;
    }
    case ojson::value_t::string: write_string(out, v.get_ref<const std::string&>()); break;
    case ojson::value_t::array: {
      if (v.empty()) {
        out += "[]";
        break;
      }
      // Arrays of scalars stay on one line; this keeps table rows compact.
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += "\n" + inner;
        write_value(out, e, indent + 1);
        first = false;
      }
      if (!flat) out += "\n" + pad;
      out += ']';
      break;
    }
    case ojson::value_t::object: {
      if (v.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        out += "\n" + inner;
        write_string(out, it.key());
        out += ": ";
        write_value(out, it.value(), indent + 1);
        first = false;
      }
      out += "\n" + pad + '}';
      break;
    }
    default: throw IntegrityError("unsupported value in report");
  }
}

std::string write_document(const ojson& doc) {
  std::string out;
  write_value(out, doc, 0);
  out += '\n';
  return out;
}

ojson cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<V, double>) {
          return std::isfinite(v) ? ojson(v) : ojson(nullptr);
        } else {
          return v;
        }
      },
      c);
}

std::string csv_field(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<V, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<V, double>) {
          return v == 0.0 ? std::string("0") : format_double(v);
        } else {
          if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) {
            if (ch == '"') q += '"';
            q += ch;
          }
          return q + "\"";
        }
      },
      c);
}

}  // namespace

std::string tool_version() { return NCLAB_VERSION; }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != header.size()) {
    throw IntegrityError("table '" + name + "' row has " + std::to_string(row.size()) + " cells, header has " +
                         std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

bool RunReport::failed() const {
  for (const auto& t : tasks) {
    if (t.status != "ok") return true;
  }
  return false;
}

const Table* RunReport::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::string to_structured(const RunReport& report) {
  ojson doc = ojson::object();
  doc["schema"] = report.schema;
  doc["tool"] = ojson{{"name", "nclab"}, {"version", report.tool_version}};
  ojson scenario = ojson::object();
  scenario["name"] = report.scenario_name;
  scenario["digest"] = report.digest;
  scenario["seed"] = report.seed ? ojson(*report.seed) : ojson(nullptr);
  doc["scenario"] = scenario;

  ojson tasks = ojson::array();
  for (const auto& t : report.tasks) {
    ojson o = ojson::object();
    o["name"] = t.name;
    o["status"] = t.status;
    o["message"] = t.message;
    o["warnings"] = t.warnings;
    o["operations"] = ojson{{"applications", t.operations.applications},
                            {"lattice_points", t.operations.lattice_points},
                            {"weight_evaluations", t.operations.weight_evaluations}};
    if (t.seconds) o["seconds"] = *t.seconds;
    tasks.push_back(std::move(o));
  }
  doc["tasks"] = std::move(tasks);

  ojson tables = ojson::array();
  for (const auto& t : report.tables) {
    ojson o = ojson::object();
    o["name"] = t.name;
    o["header"] = t.header;
    ojson rows = ojson::array();
    for (const auto& r : t.rows) {
      ojson row = ojson::array();
      for (const auto& c : r) row.push_back(cell_json(c));
      rows.push_back(std::move(row));
    }
    o["rows"] = std::move(rows);
    tables.push_back(std::move(o));
  }
  doc["tables"] = std::move(tables);

  ojson artifacts = ojson::array();
  for (const auto& a : report.artifacts) artifacts.push_back(ojson{{"name", a.name}, {"text", a.text}});
  doc["artifacts"] = std::move(artifacts);
  return write_document(doc);
}

std::string reemit_structured(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw IntegrityError(std::string("structured report does not parse: ") + e.what());
  }
  return write_document(doc);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.header[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "structured") return ReportFormat::structured;
  if (name == "tabular") return ReportFormat::tabular;
  if (name == "both") return ReportFormat::both;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected structured, tabular or both)");
}

std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::filesystem::path& dir,
                                               ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << content;
    out.close();
    if (!out) throw IoError("write to '" + p.string() + "' failed");
    written.push_back(p);
  };
  if (format != ReportFormat::tabular) write(dir / "report.json", to_structured(report));
  if (format != ReportFormat::structured) {
    for (const auto& t : report.tables) write(dir / (t.name + ".csv"), to_csv(t));
  }
  return written;
}

}  // namespace nclab
