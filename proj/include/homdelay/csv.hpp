#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "homdelay/comparison.hpp"
#include "homdelay/errors.hpp"
#include "homdelay/integrator.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string FormatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void WriteCsvRow(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << FormatNumber(row[i]);
  }
  out << '\n';
}

inline void WriteCsvHeader(std::ostream& out,
                           const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out << ',';
    out << names[i];
  }
  out << '\n';
}

/// Columns t, x_1..x_n, norm, V over the stored nodes.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const LyapunovData& lyap) {
  std::vector<std::string> names{"t"};
  for (std::size_t i = 1; i <= traj.dimension(); ++i) {
    names.push_back("x_" + std::to_string(i));
  }
  names.push_back("norm");
  names.push_back("V");
  WriteCsvHeader(out, names);
  std::vector<double> row;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto x = traj.state(k);
    row.assign(1, traj.time(k));
    for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(x[i]);
    row.push_back(x.norm());
    row.push_back(lyap.Value(x));
    WriteCsvRow(out, row);
  }
}

/// Columns t, norm, razumikhin, krasovskii.
inline void write_envelope_csv(std::ostream& out,
                               const std::vector<EnvelopeSample>& samples) {
  WriteCsvHeader(out, {"t", "norm", "razumikhin", "krasovskii"});
  for (const auto& s : samples) {
    WriteCsvRow(out, {s.t, s.norm, s.razumikhin, s.krasovskii});
  }
}

inline std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

}  // namespace homdelay
