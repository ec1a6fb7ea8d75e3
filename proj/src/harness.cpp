#include "dvi/harness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dvi/lagrangian.hpp"
#include "dvi/systems.hpp"
#include "dvi/tableau_io.hpp"

namespace dvi {

using nlohmann::json;

std::string to_string(Engine engine) { return engine == Engine::direct ? "direct" : "glm"; }

Engine parse_engine(const std::string& text) {
  if (text == "direct" || text == "direct-multistep") return Engine::direct;
  if (text == "glm") return Engine::glm;
  throw InputError("unknown engine '" + text + "' (expected direct or glm)");
}

void RunConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("h must be positive and finite");
  if (steps < 0) throw InputError("steps must be non-negative");
  if (!q0.allFinite()) throw InputError("q0 must be finite");
  if (!(newton_tol > 0.0) || newton_max_iter < 1) throw InputError("invalid Newton settings");
  if (!(projection_tol > 0.0) || projection_max_iter < 1) throw InputError("invalid projection settings");
  if (engine == Engine::direct && projection != ProjectionMode::off) {
    throw InputError("projection acts on GLM output; use --engine glm");
  }
}

namespace {

template <class T>
T field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config field \"") + key + "\": " + e.what());
  }
}

Vec parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InputError("cannot parse '" + text + "' as a comma-separated vector");
    }
  }
  if (values.empty()) throw InputError("empty vector '" + text + "'");
  return Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string format_complex(std::complex<double> z, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision);
  const double re = std::abs(z.real()) < 1e-14 ? 0.0 : z.real();
  const double im = std::abs(z.imag()) < 1e-14 ? 0.0 : z.imag();
  os << re;
  if (im != 0.0) os << (im < 0 ? " - " : " + ") << std::abs(im) << "i";
  return os.str();
}

}  // namespace

RunConfig run_config_from_json(const std::string& text, RunConfig cfg) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("config: document must be a JSON object");
  cfg.system = field(doc, "system", cfg.system);
  if (doc.contains("q0")) {
    const auto q = field(doc, "q0", std::vector<double>{});
    if (q.empty()) throw InputError("config field \"q0\" must be a non-empty array");
    cfg.q0 = Eigen::Map<const Vec>(q.data(), static_cast<Eigen::Index>(q.size()));
  }
  cfg.h = field(doc, "h", cfg.h);
  cfg.steps = field(doc, "steps", cfg.steps);
  if (doc.contains("projection")) cfg.projection = parse_projection_mode(field(doc, "projection", std::string{}));
  if (doc.contains("engine")) cfg.engine = parse_engine(field(doc, "engine", std::string{}));
  cfg.newton_tol = field(doc, "newton_tol", cfg.newton_tol);
  cfg.newton_max_iter = field(doc, "newton_max_iter", cfg.newton_max_iter);
  cfg.projection_tol = field(doc, "projection_tol", cfg.projection_tol);
  cfg.projection_max_iter = field(doc, "projection_max_iter", cfg.projection_max_iter);
  cfg.out = field(doc, "out", cfg.out);
  cfg.parasitic_out = field(doc, "parasitic_out", cfg.parasitic_out);
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  json doc;
  doc["system"] = cfg.system;
  doc["q0"] = std::vector<double>(cfg.q0.data(), cfg.q0.data() + cfg.q0.size());
  doc["h"] = cfg.h;
  doc["steps"] = cfg.steps;
  doc["projection"] = to_string(cfg.projection);
  doc["engine"] = to_string(cfg.engine);
  doc["newton_tol"] = cfg.newton_tol;
  doc["newton_max_iter"] = cfg.newton_max_iter;
  doc["projection_tol"] = cfg.projection_tol;
  doc["projection_max_iter"] = cfg.projection_max_iter;
  doc["out"] = cfg.out;
  if (!cfg.parasitic_out.empty()) doc["parasitic_out"] = cfg.parasitic_out;
  return doc.dump(2);
}

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  cfg.system = "pendulum";
  cfg.q0 = Vec{{2.3, 0.0}};
  cfg.h = 0.1;
  cfg.steps = 100000;
  cfg.engine = Engine::glm;
  if (name == "paper-fig6") {
    cfg.projection = ProjectionMode::off;
  } else if (name == "paper-fig7") {
    cfg.projection = ProjectionMode::iterated;
  } else {
    throw InputError("unknown preset '" + name + "'");
  }
  cfg.out = name + ".csv";
  return cfg;
}

std::vector<std::string> preset_names() { return {"paper-fig6", "paper-fig7"}; }

RunSummary summarize(const Trajectory& traj) {
  RunSummary s;
  s.rows = traj.rows.size();
  s.max_abs_energy_error = traj.max_abs_energy_error();
  if (!traj.rows.empty()) s.final_abs_energy_error = traj.rows.back().abs_energy_error;
  for (double e : traj.pre_projection_error) s.max_pre_projection_error = std::max(s.max_pre_projection_error, e);
  if (traj.rows.size() >= 3) {
    for (const Vec& z : parasitic_component_estimate(traj)) {
      s.max_parasitic_amplitude = std::max(s.max_parasitic_amplitude, z.lpNorm<Eigen::Infinity>());
    }
  }
  s.stats = traj.stats;
  return s;
}

RunResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const DegenerateLagrangianSystem sys = system_by_name(cfg.system);
  if (cfg.q0.size() != sys.dim) {
    throw InputError("q0 has " + std::to_string(cfg.q0.size()) + " components, system " + sys.name + " needs " +
                     std::to_string(sys.dim));
  }
  StepperConfig scfg{cfg.h, cfg.newton_tol, cfg.newton_max_iter};

  RunResult result;
  if (cfg.engine == Engine::direct) {
    result.trajectory = multistep_run(sys, cfg.q0, scfg, cfg.steps);
  } else {
    Vec q_prev;
    try {
      q_prev = starting_value(sys, cfg.q0, scfg);
    } catch (const SolverError& e) {
      throw SolverError(e.what(), 0);
    }
    const Tableau tab = leapfrog_tableau();
    const GlmState state0 = pack_inputs(sys, cfg.q0, q_prev, cfg.h);
    ProjectionConfig pcfg;
    pcfg.mode = cfg.projection;
    pcfg.tol = cfg.projection_tol;
    pcfg.max_iter = cfg.projection_max_iter;
    StageSolverOptions opts;
    opts.tol = cfg.newton_tol;
    opts.max_iter = cfg.newton_max_iter;
    result.trajectory = projected_glm_run(tab, make_vector_field(sys), sys, state0, cfg.steps, pcfg, opts);
  }
  result.trajectory.meta.projection = to_string(cfg.projection);
  result.summary = summarize(result.trajectory);
  return result;
}

void print_summary(std::ostream& out, const RunConfig& cfg, const RunSummary& s) {
  out << std::setprecision(6);
  out << "system            " << cfg.system << "\n";
  out << "engine            " << to_string(cfg.engine) << "\n";
  out << "projection        " << to_string(cfg.projection) << "\n";
  out << "h                 " << cfg.h << "\n";
  out << "steps             " << cfg.steps << "\n";
  out << "max |dH|          " << s.max_abs_energy_error << "\n";
  out << "final |dH|        " << s.final_abs_energy_error << "\n";
  if (cfg.projection != ProjectionMode::off) {
    out << "max pre-proj |dH| " << s.max_pre_projection_error << "\n";
    out << "projection iters  total " << s.stats.projection_iterations << ", max/step "
        << s.stats.max_projection_iterations << "\n";
  }
  out << "newton iters      total " << s.stats.newton_iterations << ", max/step " << s.stats.max_newton_iterations
      << "\n";
  out << "max parasitic |z| " << s.max_parasitic_amplitude << "\n";
}

void write_parasitic_csv(const std::string& path, const Trajectory& traj) {
  const auto z = parasitic_component_estimate(traj);
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << "t";
  for (Eigen::Index i = 1; i <= z.front().size(); ++i) out << ",z_" << i;
  out << "\n";
  char buf[32];
  for (std::size_t k = 0; k < z.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.rows[k + 1].t);
    out << buf;
    for (Eigen::Index i = 0; i < z[k].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", z[k][i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void print_analysis(std::ostream& out, const Tableau& tab, const ParasitismReport& report) {
  out << "tableau           " << (tab.id().empty() ? "(unnamed)" : tab.id()) << "\n";
  out << "s                 " << tab.stages() << "\n";
  out << "r                 " << tab.inputs() << "\n";
  out << "eigenvalues of V ";
  for (const auto& xi : report.eigenvalues) out << " " << format_complex(xi);
  out << "\n";
  out << "principal roots   " << report.principal_count << "\n";
  if (report.annihilated_count > 0) out << "zero roots        " << report.annihilated_count << "\n";
  if (report.defective) out << "warning: V has a defective eigenvalue; growth parameters are per eigenvector\n";
  if (report.growth_parameters.empty()) {
    out << "no parasitic roots\n";
    return;
  }
  for (const auto& g : report.growth_parameters) {
    out << "parasitic root    xi = " << format_complex(g.xi, 6) << ", mu = " << format_complex(g.mu, 5)
        << (g.defective ? "  (defective)" : "") << "\n";
  }
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  RunResult result;
  try {
    result = run_experiment(cfg);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SolverError& e) {
    err << "solver failure";
    if (e.step()) err << " at step " << *e.step();
    err << ": " << e.what() << "\n";
    return kExitSolver;
  }
  try {
    if (!cfg.out.empty()) write_csv(cfg.out, result.trajectory);
    if (!cfg.parasitic_out.empty()) write_parasitic_csv(cfg.parasitic_out, result.trajectory);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
  print_summary(out, cfg, result.summary);
  if (!cfg.out.empty()) out << "wrote             " << cfg.out << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& tableau_path, std::ostream& out, std::ostream& err) {
  std::optional<Tableau> tab;
  try {
    tab = load_tableau(tableau_path);
  } catch (const InputError& e) {
    err << "error: " << tableau_path << ": " << e.what() << "\n";
    return kExitParse;
  }
  try {
    print_analysis(out, *tab, parasitic_growth_parameters(*tab));
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational integrators for degenerate Lagrangians as general linear methods", "dvi"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "integrate a system and write a CSV trajectory");
  run->set_help_flag("--help", "print this help message and exit");  // -h would clash with --h
  std::string preset_name, config_path, system, q0_text, projection, engine, out_path, parasitic_path;
  double h = 0.0, newton_tol = 0.0, projection_tol = 0.0;
  long steps = 0;
  int newton_max_iter = 0, projection_max_iter = 0;
  auto* o_preset = run->add_option("--preset", preset_name, "paper-fig6 or paper-fig7");
  auto* o_config = run->add_option("--config", config_path, "JSON run configuration");
  auto* o_system = run->add_option("--system", system, "pendulum | canonical:harmonic | canonical:pendulum | "
                                                       "canonical:henon-heiles");
  auto* o_q0 = run->add_option("--q0", q0_text, "initial value, comma separated");
  auto* o_h = run->add_option("--h", h, "step size");
  auto* o_steps = run->add_option("--steps", steps, "number of steps");
  auto* o_projection = run->add_option("--projection", projection, "off | one-shot | iterated");
  auto* o_engine = run->add_option("--engine", engine, "direct | glm");
  auto* o_out = run->add_option("--out", out_path, "CSV output path");
  auto* o_parasitic = run->add_option("--parasitic-out", parasitic_path, "CSV of the parasitic-mode estimate");
  auto* o_ntol = run->add_option("--newton-tol", newton_tol);
  auto* o_nmax = run->add_option("--newton-max-iter", newton_max_iter);
  auto* o_ptol = run->add_option("--projection-tol", projection_tol);
  auto* o_pmax = run->add_option("--projection-max-iter", projection_max_iter);
  o_preset->excludes(o_config);

  auto* analyze = app.add_subcommand("analyze", "parasitic growth parameters of a tableau file");
  std::string tableau_path;
  analyze->add_option("tableau", tableau_path, "tableau JSON file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      if (run->get_help_ptr()->count()) {
        out << run->help();
      } else if (analyze->get_help_ptr()->count()) {
        out << analyze->help();
      } else {
        out << app.help();
      }
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  if (analyze->parsed()) return cmd_analyze(tableau_path, out, err);

  RunConfig cfg;
  try {
    if (o_preset->count()) cfg = preset(preset_name);
    if (o_config->count()) {
      std::ifstream in(config_path);
      if (!in) throw InputError("cannot open config " + config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      cfg = run_config_from_json(buf.str());
    }
    if (o_system->count()) cfg.system = system;
    if (o_q0->count()) cfg.q0 = parse_vector(q0_text);
    if (o_h->count()) cfg.h = h;
    if (o_steps->count()) cfg.steps = steps;
    if (o_projection->count()) cfg.projection = parse_projection_mode(projection);
    if (o_engine->count()) cfg.engine = parse_engine(engine);
    if (o_out->count()) cfg.out = out_path;
    if (o_parasitic->count()) cfg.parasitic_out = parasitic_path;
    if (o_ntol->count()) cfg.newton_tol = newton_tol;
    if (o_nmax->count()) cfg.newton_max_iter = newton_max_iter;
    if (o_ptol->count()) cfg.projection_tol = projection_tol;
    if (o_pmax->count()) cfg.projection_max_iter = projection_max_iter;
    cfg.validate();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return cmd_run(cfg, out, err);
}

}  // namespace dvi
