#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dvi/types.hpp"

namespace dvi {

struct TrajectoryRow {
  double t = 0.0;
  Vec q;
  double energy = 0.0;
  double abs_energy_error = 0.0;
  bool projected = false;
};

struct TrajectoryMetadata {
  std::string system;
  double h = 0.0;
  long steps = 0;
  std::string projection = "off";
  std::string tableau;
  std::string engine;
};

struct SolverStatistics {
  long newton_iterations = 0;
  int max_newton_iterations = 0;  // per step
  long projection_iterations = 0;
  int max_projection_iterations = 0;
};

// Time-indexed solution points with energy diagnostics. Rows hold
// t_m = m * h, q_m, H(q_m) and |H(q_m) - H(q_0)|. When no energy function is
// available, energy and abs_energy_error are NaN.
struct Trajectory {
  std::vector<TrajectoryRow> rows;
  // |H - H_ref| before projection, one entry per row (equal to the row's
  // error when the row was not projected).
  std::vector<double> pre_projection_error;
  TrajectoryMetadata meta;
  SolverStatistics stats;

  double max_abs_energy_error() const;

  // Appends a row at t = m * h, evaluating energy when provided.
  void append(long m, double h, const Vec& q, const ScalarField& energy, double reference,
              bool projected = false, double pre_error = -1.0);
};

// CSV schema: t,q_1..q_N,H,abs_energy_error,projected. Values are written
// with 17 significant digits so that reading reproduces them exactly.
void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv(const std::string& path, const Trajectory& traj);
Trajectory read_csv(std::istream& in);
Trajectory read_csv_file(const std::string& path);

// Alternating second-difference estimate of the oscillatory parasitic mode:
// z_m = (-1)^m (q_{m+1} - 2 q_m + q_{m-1}) / 4 for m = 1 .. rows - 2.
// Entry k of the result corresponds to m = k + 1. Needs at least 3 rows.
std::vector<Vec> parasitic_component_estimate(const Trajectory& traj);

}  // namespace dvi
