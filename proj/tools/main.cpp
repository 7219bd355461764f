// Command-line front-end: simulate catalog systems, inspect the catalog,
// verify per-system properties.
#include <CLI11.hpp>
#include <iostream>

#include "voronec/catalog.hpp"
#include "voronec/errors.hpp"
#include "voronec/runner.hpp"

using namespace voronec;

int main(int argc, char** argv) {
  CLI::App app{"voronec - simulation engine for nonlinearly constrained mechanical systems"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run one system and emit trajectory + report");
  std::string config_path, system_id, path_name = "lagrangian", out_dir = ".";
  std::vector<std::string> param_args, q0_arg, v0_arg;
  double t_end = 10.0, tol = 1e-10;
  simulate->add_option("--config", config_path, "run configuration file (key = value lines)");
  simulate->add_option("--system", system_id, "catalog system id");
  simulate->add_option("--param", param_args, "parameter override k=v (repeatable)");
  simulate->add_option("--t-end", t_end, "end time [s]");
  simulate->add_option("--tol", tol, "local error tolerance");
  simulate->add_option("--path", path_name, "newtonian|lagrangian|reduced|oracle-check");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--q0", q0_arg, "initial coordinates, comma separated");
  simulate->add_option("--v0", v0_arg, "initial independent velocities, comma separated");

  // catalog
  auto* cat = app.add_subcommand("catalog", "list or describe built-in systems");
  auto* list = cat->add_subcommand("list", "list catalog ids");
  std::string describe_id;
  auto* describe = cat->add_subcommand("describe", "describe one system");
  describe->add_option("id", describe_id, "catalog system id")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "run the property suite for one system");
  std::string verify_id;
  int verify_states = 40;
  verify->add_option("--system", verify_id, "catalog system id")->required();
  verify->add_option("--states", verify_states, "number of random admissible states");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      cli::RunConfig config;
      if (!config_path.empty()) {
        config = cli::parse_config_file(config_path);
      } else if (!system_id.empty()) {
        std::string text = "system = " + system_id + "\n";
        config = cli::parse_config_text(text);
      } else {
        std::cerr << "error: simulate needs --config or --system\n";
        return cli::exit_config_error;
      }
      // flag overrides on top of the file
      if (!system_id.empty()) config.system = system_id;
      for (const auto& kv : param_args) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          std::cerr << "error: --param expects k=v, got '" << kv << "'\n";
          return cli::exit_config_error;
        }
        config.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      }
      if (simulate->count("--t-end")) config.t_end = t_end;
      if (simulate->count("--tol")) config.tol = tol;
      if (simulate->count("--out")) config.out_dir = out_dir;
      if (simulate->count("--path")) {
        cli::RunConfig probe = cli::parse_config_text(
            "system = x\npath = " + path_name + "\n");
        config.path = probe.path;
      }
      auto parse_list_arg = [](const std::vector<std::string>& arg) {
        std::vector<double> out;
        for (const auto& chunk : arg) {
          std::stringstream ss(chunk);
          std::string item;
          while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        }
        return out;
      };
      if (!q0_arg.empty()) config.q0 = parse_list_arg(q0_arg);
      if (!v0_arg.empty()) config.v0 = parse_list_arg(v0_arg);
      return cli::run(config, std::cout);
    }

    if (cat->parsed()) {
      if (list->parsed()) {
        for (const auto& e : systems::catalog()) std::cout << e.id << "\n";
        return 0;
      }
      if (describe->parsed()) {
        for (const auto& e : systems::catalog()) {
          if (e.id != describe_id) continue;
          std::cout << e.id << ": " << e.summary << "\n";
          std::cout << "parameters (defaults):\n";
          for (const auto& [k, v] : e.defaults) std::cout << "  " << k << " = " << v << "\n";
          const auto claims = systems::expected_integrals(e.id);
          std::cout << "expected integrals: " << claims.size() << "\n";
          for (const auto& c : claims) std::cout << "  " << c.name << ": " << c.note << "\n";
          return 0;
        }
        std::cerr << "error: unknown system '" << describe_id << "'\n";
        return cli::exit_config_error;
      }
      std::cerr << "error: catalog needs 'list' or 'describe'\n";
      return cli::exit_config_error;
    }

    if (verify->parsed()) {
      return cli::verify_system(verify_id, verify_states, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_config_error;
  } catch (const GuardViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_singularity;
  } catch (const SingularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_singularity;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_invariant_violation;
  }
  return 0;
}
