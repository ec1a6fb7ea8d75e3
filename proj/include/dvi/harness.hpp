#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dvi/parasitism.hpp"
#include "dvi/projection.hpp"
#include "dvi/trajectory.hpp"

namespace dvi {

enum class Engine { direct, glm };

std::string to_string(Engine engine);
Engine parse_engine(const std::string& text);

// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitParse = 2, kExitPrecondition = 3, kExitSolver = 4 };

struct RunConfig {
  std::string system = "pendulum";
  Vec q0 = Vec{{2.3, 0.0}};
  double h = 0.1;
  long steps = 100000;
  ProjectionMode projection = ProjectionMode::off;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  double projection_tol = 1e-10;
  int projection_max_iter = 20;
  Engine engine = Engine::glm;
  std::string out;            // CSV path; empty writes nothing
  std::string parasitic_out;  // optional CSV of the parasitic-mode estimate

  void validate() const;
};

// Configuration as a JSON object with the field names above; q0 is an array
// and projection/engine are strings. Missing fields keep their defaults.
RunConfig run_config_from_json(const std::string& text, RunConfig base = {});
std::string run_config_to_json(const RunConfig& cfg);

// Built-in presets "paper-fig6" (no projection) and "paper-fig7" (iterated
// projection): pendulum, q0 = (2.3, 0), h = 0.1, 1e5 steps, GLM engine.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct RunSummary {
  std::size_t rows = 0;
  double max_abs_energy_error = 0.0;
  double final_abs_energy_error = 0.0;
  double max_pre_projection_error = 0.0;
  double max_parasitic_amplitude = 0.0;  // max |z_m|, 0 when fewer than 3 rows
  SolverStatistics stats;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
};

RunResult run_experiment(const RunConfig& cfg);
RunSummary summarize(const Trajectory& traj);
void print_summary(std::ostream& out, const RunConfig& cfg, const RunSummary& summary);

void write_parasitic_csv(const std::string& path, const Trajectory& traj);

// Human-readable report of the parasitism analysis.
void print_analysis(std::ostream& out, const Tableau& tab, const ParasitismReport& report);

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_analyze(const std::string& tableau_path, std::ostream& out, std::ostream& err);

// Entry point of the `dvi` tool; args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dvi
