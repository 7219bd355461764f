#include "voronec/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "voronec/catalog.hpp"
#include "voronec/dynamics.hpp"
#include "voronec/errors.hpp"
#include "voronec/oracle.hpp"

namespace voronec::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& text, const std::string& key) {
  try {
    size_t pos = 0;
    const double value = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value '" + text + "' for key '" + key + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item), key));
  if (out.empty()) throw ConfigError("config: empty list for key '" + key + "'");
  return out;
}

sim::DynamicsPath parse_path(const std::string& text) {
  if (text == "newtonian") return sim::DynamicsPath::newtonian;
  if (text == "lagrangian") return sim::DynamicsPath::lagrangian;
  if (text == "reduced") return sim::DynamicsPath::reduced;
  if (text == "oracle-check") return sim::DynamicsPath::oracle_check;
  throw ConfigError("config: unknown dynamics path '" + text + "'");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory(const std::filesystem::path& file, const SystemSpec& spec,
                      const sim::Trajectory& traj) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open trajectory file " + file.string());
  out << "t";
  for (int i = 1; i <= spec.dims.n; ++i) out << ",q" << i;
  for (int i = 1; i <= spec.dims.m; ++i) out << ",v" << i;
  for (int i = 1; i <= spec.dims.m; ++i) out << ",a" << i;
  out << ",E,residual";
  for (size_t i = 1; i <= traj.integral_names.size(); ++i) out << ",I" << i;
  out << "\n";
  for (const auto& s : traj.samples) {
    out << fmt(s.t);
    for (int i = 0; i < s.q.size(); ++i) out << "," << fmt(s.q[i]);
    for (int i = 0; i < s.v.size(); ++i) out << "," << fmt(s.v[i]);
    for (int i = 0; i < s.a.size(); ++i) out << "," << fmt(s.a[i]);
    out << "," << fmt(s.energy) << "," << fmt(s.balance_residual);
    for (int i = 0; i < s.integrals.size(); ++i) out << "," << fmt(s.integrals[i]);
    out << "\n";
  }
  if (traj.aborted) out << "#ABORT " << traj.abort_reason << "\n";
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  bool have_system = false;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config: empty key or value in '" + line + "'");

    if (key == "system") {
      config.system = value;
      have_system = true;
    } else if (key.rfind("param.", 0) == 0) {
      config.params[key.substr(6)] = parse_number(value, key);
    } else if (key == "t_end") {
      config.t_end = parse_number(value, key);
    } else if (key == "t0") {
      config.t0 = parse_number(value, key);
    } else if (key == "tol") {
      config.tol = parse_number(value, key);
    } else if (key == "path") {
      config.path = parse_path(value);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "q0") {
      config.q0 = parse_list(value, key);
    } else if (key == "v0") {
      config.v0 = parse_list(value, key);
    } else if (key == "verbosity") {
      config.verbosity = int(parse_number(value, key));
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (!have_system) throw ConfigError("config: missing 'system' key");
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

int run(const RunConfig& config, std::ostream& log) {
  SystemSpec spec;
  KinematicState s0;
  Structure structure;
  std::vector<energy::FirstIntegral> claims;
  try {
    spec = systems::build(config.system, config.params);
    s0 = systems::default_state(config.system, config.params);
    if (config.q0) {
      if (int(config.q0->size()) != spec.dims.n)
        throw ConfigError("config: q0 needs " + std::to_string(spec.dims.n) + " entries");
      s0.q = Eigen::Map<const Eigen::VectorXd>(config.q0->data(), config.q0->size());
    }
    if (config.v0) {
      if (int(config.v0->size()) != spec.dims.m)
        throw ConfigError("config: v0 needs " + std::to_string(spec.dims.m) + " entries");
      s0.v = Eigen::Map<const Eigen::VectorXd>(config.v0->data(), config.v0->size());
    }
    s0.t = config.t0;
    if (!spec.admissible(s0))
      throw ConfigError("config: initial state violates the admissibility guard");
    if (config.tol < 1e-13 || config.tol > 1e-3)
      throw ConfigError("config: tol out of range [1e-13, 1e-3]");
    if (!(config.t_end > config.t0)) throw ConfigError("config: t_end must exceed t0");
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const SpecError& e) {
    log << "error: " << e.what() << "\n";
    return exit_config_error;
  }

  const auto samples = draw_samples(spec, 10, 2024u);
  const auto report = validate(spec, samples);
  structure = classify_constraints(spec.constraints, samples);
  claims = energy::detect_first_integrals(spec);

  sim::IntegrateOptions opts;
  opts.tol = config.tol;
  opts.path = config.path;
  sim::Trajectory traj;
  std::string integration_error;
  try {
    traj = sim::integrate(spec, s0, config.t_end, opts);
  } catch (const Error& e) {
    integration_error = e.what();
  }

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);
  write_trajectory(dir / "trajectory.csv", spec, traj);

  std::vector<double> drift;
  if (!traj.samples.empty()) drift = sim::drift_report(traj);

  double worst_residual = 0.0;
  for (const auto& s : traj.samples)
    worst_residual = std::max(worst_residual, std::abs(s.balance_residual));

  {
    std::ofstream rep(dir / "report.txt");
    rep << "system: " << config.system << "\n";
    rep << "label: " << spec.label << "\n";
    rep << "path: " << sim::to_string(config.path) << "\n";
    rep << "t_end: " << fmt(config.t_end) << "\n";
    rep << "tol: " << fmt(config.tol) << "\n";
    rep << "classification: " << to_string(structure) << "\n";
    rep << "validation: " << (report.ok() ? "pass" : "FAIL") << "\n";
    for (const auto& c : report.checks)
      rep << "  check " << c.name << ": " << (c.pass ? "pass" : "FAIL")
          << " worst_residual=" << fmt(c.worst_residual) << "\n";
    rep << "balance_form: " << energy::to_string(traj.applied_form) << "\n";
    rep << "max_balance_residual: " << fmt(worst_residual) << "\n";
    rep << "conservation_claims: " << claims.size() << "\n";
    for (size_t i = 0; i < claims.size(); ++i) {
      rep << "  claim " << claims[i].name << ": " << claims[i].note << "\n";
      if (i < drift.size()) rep << "  observed_drift: " << fmt(drift[i]) << "\n";
    }
    if (config.path == sim::DynamicsPath::oracle_check)
      rep << "max_oracle_gap: " << fmt(traj.max_oracle_gap) << "\n";
    rep << "steps_accepted: " << traj.stats.accepted << "\n";
    rep << "steps_rejected: " << traj.stats.rejected << "\n";
    rep << "rhs_evaluations: " << traj.stats.rhs_evaluations << "\n";
    rep << "h_min: " << fmt(traj.stats.h_min) << "\n";
    rep << "h_max: " << fmt(traj.stats.h_max) << "\n";
    if (traj.aborted) rep << "abort: " << traj.abort_reason << "\n";
    if (!integration_error.empty()) rep << "abort: " << integration_error << "\n";
  }

  if (config.verbosity > 0) {
    log << spec.label << ": " << traj.samples.size() << " samples, classification "
        << to_string(structure) << ", max residual " << fmt(worst_residual) << "\n";
    for (size_t i = 0; i < claims.size() && i < drift.size(); ++i)
      log << "  " << claims[i].name << " drift " << fmt(drift[i]) << "\n";
  }

  if (!report.ok()) return exit_invariant_violation;
  if (!integration_error.empty() || traj.aborted) return exit_singularity;
  if (config.path == sim::DynamicsPath::oracle_check && traj.max_oracle_gap > opts.oracle_tol)
    return exit_invariant_violation;
  return exit_ok;
}

int verify_system(const std::string& id, int state_count, std::ostream& log) {
  bool all_ok = true;
  auto check = [&](const std::string& name, bool ok, double worst) {
    log << (ok ? "[PASS] " : "[FAIL] ") << name << " (worst " << fmt(worst) << ")\n";
    all_ok &= ok;
  };

  SystemSpec spec;
  try {
    spec = systems::build(id);
  } catch (const SpecError& e) {
    log << "error: " << e.what() << "\n";
    return exit_config_error;
  }

  const auto samples = draw_samples(spec, state_count, 987654u);
  const auto report = validate(spec, samples);
  double vworst = 0.0;
  for (const auto& c : report.checks) vworst = std::max(vworst, c.worst_residual);
  check("validate", report.ok(), vworst);

  const auto structure = classify_constraints(spec.constraints, samples);
  check("classification matches declared tag (" + to_string(structure) + ")",
        structure.tag == spec.constraints.structure.tag, 0.0);

  double worst_pair = 0.0, worst_oracle = 0.0, worst_audit = 0.0, worst_b = 0.0,
         worst_bbar = 0.0, worst_balance = 0.0;
  bool spd_ok = true;
  for (const auto& s : samples) {
    const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
    const auto bundle = dynamics::coefficient_assembly(spec, s);
    spd_ok &= Eigen::LLT<Eigen::MatrixXd>(bundle.C).info() == Eigen::Success;

    const Eigen::VectorXd an = dynamics::accel_newtonian(spec, s, F);
    const Eigen::VectorXd al = dynamics::accel_lagrangian(spec, s, F);
    worst_pair = std::max(worst_pair, (an - al).norm() / std::max(1.0, an.norm()));

    const auto sol = oracle::multiplier_accel(spec, s, F);
    worst_oracle = std::max(worst_oracle, (sol.a_full.head(spec.dims.m) - an).norm() /
                                              std::max(1.0, an.norm()));
    worst_audit = std::max(worst_audit, oracle::reaction_power_audit(spec, s, sol) /
                                            std::max(1.0, sol.reaction.norm()));

    const auto bsplit = dynamics::b_coefficients(spec.constraints, s);
    const Eigen::MatrixXd b_direct = dynamics::b_assembled(bsplit, al);
    const Eigen::MatrixXd b_td = dynamics::b_total_derivative_path(spec.constraints, s, al);
    worst_b = std::max(worst_b, (b_direct - b_td).cwiseAbs().maxCoeff() /
                                    std::max(1.0, b_direct.cwiseAbs().maxCoeff()));

    const Eigen::VectorXd bb1 = energy::bar_b(spec.constraints, s, al);
    const Eigen::VectorXd bb2 = energy::bar_b_total_derivative_path(spec.constraints, s, al);
    worst_bbar = std::max(worst_bbar, (bb1 - bb2).cwiseAbs().maxCoeff() /
                                          std::max(1.0, bb1.cwiseAbs().maxCoeff()));

    const auto balance = energy::balance_residual(spec, s, al);
    worst_balance = std::max(worst_balance, std::abs(balance.residual));
    worst_balance = std::max(worst_balance, std::abs(balance.applied_residual));
  }
  check("positive definite C (Cholesky)", spd_ok, 0.0);
  check("newtonian vs lagrangian accelerations <= 1e-8", worst_pair <= 1e-8, worst_pair);
  check("multiplier oracle agreement <= 1e-8", worst_oracle <= 1e-8, worst_oracle);
  check("reaction power audit <= 1e-10", worst_audit <= 1e-10, worst_audit);
  check("Voronec coefficients both routes <= 1e-10", worst_b <= 1e-10, worst_b);
  check("bar_B both routes <= 1e-10", worst_bbar <= 1e-10, worst_bbar);
  check("pointwise balance residual <= 1e-6", worst_balance <= 1e-6, worst_balance);

  const auto expected = systems::expected_integrals(id);
  const auto detected = energy::detect_first_integrals(spec);
  check("first-integral claims match the catalog (" + std::to_string(detected.size()) + ")",
        expected.size() == detected.size(), 0.0);

  return all_ok ? exit_ok : exit_invariant_violation;
}

}  // namespace voronec::cli
