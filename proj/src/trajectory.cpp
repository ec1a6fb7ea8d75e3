#include "dvi/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dvi {

namespace {

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, int line) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("csv line " + std::to_string(line) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

}  // namespace

double Trajectory::max_abs_energy_error() const {
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, row.abs_energy_error);
  return worst;
}

void Trajectory::append(long m, double h, const Vec& q, const ScalarField& energy, double reference, bool projected,
                        double pre_error) {
  TrajectoryRow row;
  row.t = static_cast<double>(m) * h;
  row.q = q;
  if (energy) {
    row.energy = energy(q);
    row.abs_energy_error = std::abs(row.energy - reference);
  } else {
    row.energy = row.abs_energy_error = std::numeric_limits<double>::quiet_NaN();
  }
  row.projected = projected;
  pre_projection_error.push_back(pre_error >= 0.0 ? pre_error : row.abs_energy_error);
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  const auto n = traj.rows.empty() ? 0 : traj.rows.front().q.size();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",q_" << i;
  out << ",H,abs_energy_error,projected\n";
  for (const auto& row : traj.rows) {
    out << format_double(row.t);
    for (Eigen::Index i = 0; i < row.q.size(); ++i) out << ',' << format_double(row.q[i]);
    out << ',' << format_double(row.energy) << ',' << format_double(row.abs_energy_error) << ','
        << (row.projected ? 1 : 0) << '\n';
  }
}

void write_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_csv(out, traj);
  if (!out) throw InputError("failed writing " + path);
}

Trajectory read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: empty input");
  const auto header = split(line);
  if (header.size() < 5 || header.front() != "t" || header[header.size() - 3] != "H" ||
      header[header.size() - 2] != "abs_energy_error" || header.back() != "projected") {
    throw InputError("csv: header does not match t,q_1..q_N,H,abs_energy_error,projected");
  }
  const auto n = static_cast<Eigen::Index>(header.size() - 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (header[i + 1] != "q_" + std::to_string(i + 1)) throw InputError("csv: unexpected column " + header[i + 1]);
  }

  Trajectory traj;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw InputError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(cells.size()));
    }
    TrajectoryRow row;
    row.t = parse_double(cells[0], line_no);
    row.q.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) row.q[i] = parse_double(cells[i + 1], line_no);
    row.energy = parse_double(cells[n + 1], line_no);
    row.abs_energy_error = parse_double(cells[n + 2], line_no);
    const std::string& flag = cells[n + 3];
    if (flag != "0" && flag != "1") throw InputError("csv line " + std::to_string(line_no) + ": bad projected flag");
    row.projected = flag == "1";
    traj.pre_projection_error.push_back(row.abs_energy_error);
    traj.rows.push_back(std::move(row));
  }
  return traj;
}

Trajectory read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_csv(in);
}

std::vector<Vec> parasitic_component_estimate(const Trajectory& traj) {
  if (traj.rows.size() < 3) throw InputError("parasitic estimate needs at least 3 trajectory rows");
  std::vector<Vec> z;
  z.reserve(traj.rows.size() - 2);
  for (std::size_t m = 1; m + 1 < traj.rows.size(); ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    z.push_back(sign * (traj.rows[m + 1].q - 2.0 * traj.rows[m].q + traj.rows[m - 1].q) / 4.0);
  }
  return z;
}

}  // namespace dvi
