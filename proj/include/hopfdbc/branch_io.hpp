#pragma once

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopfdbc/continuation.hpp"

namespace hopfdbc {

/// A branch or profile file does not follow the expected layout.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* branch_csv_header = "index,mu,omega,r,u_inf,newton_iters,residual,stability,lambda1,termination";

namespace detail {

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("branch CSV: cannot parse " + what + " from '" + s + "'");
  }
}

/// Next line that is neither empty nor a comment; false at end of input.
inline bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

inline Stability parse_stability(const std::string& s) {
  if (s == "stable") return Stability::stable;
  if (s == "unstable") return Stability::unstable;
  if (s == "unknown" || s.empty()) return Stability::unknown;
  throw SchemaError("branch CSV: unknown stability '" + s + "'");
}

inline Termination parse_termination(const std::string& s) {
  for (auto t : {Termination::completed, Termination::step_underflow, Termination::homoclinic_suspected,
                 Termination::newton_failure}) {
    if (s == to_string(t)) return t;
  }
  throw SchemaError("branch CSV: unknown termination '" + s + "'");
}

}  // namespace detail

/// Branch table, one row per point; the termination reason is on the last row.
inline void write_branch_csv(std::ostream& out, const Branch& branch, const std::string& hash) {
  out << "# config-hash: " << hash << '\n' << branch_csv_header << '\n';
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const auto& p = branch.points[i];
    out << i << ',' << detail::fmt_double(p.mu) << ',' << detail::fmt_double(p.omega) << ','
        << detail::fmt_double(p.r) << ',' << detail::fmt_double(p.u_inf) << ',' << p.newton_iters << ','
        << detail::fmt_double(p.residual) << ',' << to_string(p.stability) << ','
        << (p.lambda1 ? detail::fmt_double(*p.lambda1) : std::string()) << ','
        << (i + 1 == branch.points.size() ? to_string(branch.termination) : "") << '\n';
  }
}

/// Profile sidecar: one row of grid values (deviation from u*) per point.
inline void write_profiles_csv(std::ostream& out, const Branch& branch, const std::string& hash) {
  out << "# config-hash: " << hash << '\n';
  for (const auto& p : branch.points) {
    const auto& v = p.profile.values();
    for (std::size_t j = 0; j < v.size(); ++j) out << (j ? "," : "") << detail::fmt_double(v[j]);
    out << '\n';
  }
}

/// Reads a branch table. Profiles are left empty; see read_profiles_csv.
inline Branch read_branch_csv(std::istream& in) {
  std::string line;
  if (!detail::next_data_line(in, line)) throw SchemaError("branch CSV: empty file");
  if (line != branch_csv_header) throw SchemaError("branch CSV: unexpected header '" + line + "'");
  Branch b;
  bool have_termination = false;
  while (detail::next_data_line(in, line)) {
    const auto cells = detail::split_csv(line);
    if (cells.size() != 10) {
      throw SchemaError("branch CSV: expected 10 columns, got " + std::to_string(cells.size()));
    }
    if (have_termination) throw SchemaError("branch CSV: termination reason before the last row");
    BranchPoint p;
    p.mu = detail::parse_double(cells[1], "mu");
    p.omega = detail::parse_double(cells[2], "omega");
    p.r = detail::parse_double(cells[3], "r");
    p.u_inf = detail::parse_double(cells[4], "u_inf");
    p.newton_iters = static_cast<int>(detail::parse_double(cells[5], "newton_iters"));
    p.residual = detail::parse_double(cells[6], "residual");
    p.stability = detail::parse_stability(cells[7]);
    if (!cells[8].empty()) p.lambda1 = detail::parse_double(cells[8], "lambda1");
    if (!cells[9].empty()) {
      b.termination = detail::parse_termination(cells[9]);
      have_termination = true;
    }
    b.points.push_back(std::move(p));
  }
  if (b.points.empty()) throw SchemaError("branch CSV: no data rows");
  return b;
}

inline std::vector<std::vector<double>> read_profiles_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (detail::next_data_line(in, line)) {
    std::vector<double> row;
    for (const auto& cell : detail::split_csv(line)) row.push_back(detail::parse_double(cell, "profile value"));
    if (!rows.empty() && row.size() != rows.front().size()) throw SchemaError("profile CSV: ragged rows");
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Attaches sidecar profiles and the equilibrium data that the table omits.
template <BoundaryKinetics K>
void attach_profiles(Branch& b, const std::vector<std::vector<double>>& rows, const K& k, double sigma) {
  if (rows.size() != b.points.size()) {
    throw SchemaError("profile CSV: " + std::to_string(rows.size()) + " rows for " + std::to_string(b.points.size()) +
                      " branch points");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!is_power_of_two(rows[i].size())) throw SchemaError("profile CSV: grid size is not a power of two");
    auto& p = b.points[i];
    p.sigma = sigma;
    p.u_star = equilibrium(k, p.mu, sigma);
    p.profile = PeriodicProfile(rows[i]);
  }
}

}  // namespace hopfdbc
