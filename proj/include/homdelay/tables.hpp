#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "homdelay/csv.hpp"
#include "homdelay/errors.hpp"
#include "homdelay/json_io.hpp"
#include "homdelay/krasovskii.hpp"
#include "homdelay/razumikhin.hpp"
#include "homdelay/registry.hpp"

#ifndef HOMDELAY_DATA_DIR
#define HOMDELAY_DATA_DIR "data"
#endif

namespace homdelay {

inline std::string default_fixture_path() {
  return std::string(HOMDELAY_DATA_DIR) + "/reference_tables.json";
}

struct CellResult {
  std::string key;
  double printed = 0.0;
  double computed = 0.0;
  /// Value the computed number is compared with (the printed value, or
  /// δ/c₁ for identity cells).
  double reference = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool flagged = false;
  bool pass = false;
  std::string note;
};

struct TableReport {
  int table = 0;
  std::string title;
  std::vector<CellResult> cells;
  RazumikhinCertificate razumikhin;
  KrasovskiiCertificate krasovskii;

  /// True when every cell that is not flagged passes.
  bool ok() const {
    for (const auto& c : cells) {
      if (!c.flagged && !c.pass) return false;
    }
    return true;
  }
  const CellResult& cell(const std::string& key) const {
    for (const auto& c : cells) {
      if (c.key == key) return c;
    }
    throw Error("no cell '" + key + "'");
  }
};

/// Computes every cell of a table from its preset and compares it with the
/// fixture values.
inline TableReport reproduce_table(int table,
                                   const std::string& fixture_path =
                                       default_fixture_path()) {
  const Json fixture = ReadJsonFile(fixture_path);
  const std::string id = std::to_string(table);
  if (!fixture.at("tables").contains(id)) {
    throw ConfigError("fixture has no table " + id);
  }
  const Json& spec = fixture.at("tables").at(id);
  const double default_tol = fixture.value("default_tolerance", 0.02);
  const double flagged_tol = fixture.value("flagged_tolerance", 0.10);

  const Preset p = preset(spec.at("preset").get<std::string>());
  const SystemModel model = build_example(p.example);
  TableReport report;
  report.table = table;
  report.title = spec.value("title", std::string());
  report.razumikhin = razumikhin_certificate(model, p.razumikhin);
  report.krasovskii = krasovskii_certificate(model, p.krasovskii);
  const Json lr = to_json(report.razumikhin);
  const Json lk = to_json(report.krasovskii);
  const Json mj = to_json(model.lyapunov.constants());

  for (const auto& c : spec.at("cells")) {
    CellResult cell;
    cell.key = c.at("key").get<std::string>();
    cell.printed = c.at("printed").get<double>();
    cell.flagged = c.value("flagged", false);
    cell.tolerance =
        c.value("tolerance", cell.flagged ? flagged_tol : default_tol);
    cell.note = c.value("note", std::string());
    const auto dot = cell.key.find('.');
    const std::string group = cell.key.substr(0, dot);
    const std::string field = cell.key.substr(dot + 1);
    const Json& source = group == "lr" ? lr : (group == "lk" ? lk : mj);
    if (!source.contains(field)) {
      throw ConfigError("fixture key '" + cell.key + "' is unknown");
    }
    cell.computed = source.at(field).get<double>();
    cell.reference = cell.printed;
    if (c.value("mode", std::string("relative")) == "identity") {
      cell.reference = source.at("delta").get<double>() /
                       c.at("identity_c1").get<double>();
    }
    cell.rel_error = std::abs(cell.computed - cell.reference) /
                     std::abs(cell.reference);
    cell.pass = cell.rel_error <= cell.tolerance;
    report.cells.push_back(cell);
  }
  return report;
}

/// key, printed, computed, reference, rel_error, tolerance, flagged, pass.
inline void write_table_csv(std::ostream& out, const TableReport& r) {
  out << "table,key,printed,computed,reference,rel_error,tolerance,flagged,"
         "pass\n";
  for (const auto& c : r.cells) {
    out << r.table << ',' << c.key << ',' << FormatNumber(c.printed) << ','
        << FormatNumber(c.computed) << ',' << FormatNumber(c.reference) << ','
        << FormatNumber(c.rel_error) << ',' << FormatNumber(c.tolerance) << ','
        << (c.flagged ? 1 : 0) << ',' << (c.pass ? 1 : 0) << '\n';
  }
}

}  // namespace homdelay
