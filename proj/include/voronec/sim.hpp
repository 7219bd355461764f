// Adaptive time integration of the reduced system with per-step energy and
// first-integral diagnostics.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "voronec/energy.hpp"
#include "voronec/system.hpp"

namespace voronec::sim {

enum class DynamicsPath { newtonian, lagrangian, reduced, oracle_check };

std::string to_string(DynamicsPath p);

struct IntegrateOptions {
  double tol = 1e-10;  ///< local error tolerance, within [1e-13, 1e-3]
  DynamicsPath path = DynamicsPath::lagrangian;
  double oracle_tol = 1e-8;   ///< relative disagreement triggering abort (oracle_check)
  long max_steps = 2000000;
  bool diagnostics = true;    ///< record energy/balance/integral values per step
};

struct Sample {
  double t;
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  Eigen::VectorXd a;
  double energy = 0.0;
  double balance_residual = 0.0;
  Eigen::VectorXd integrals;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
  double h_min = 0.0;
  double h_max = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;
  IntegratorStats stats;
  bool aborted = false;
  std::string abort_reason;
  double max_oracle_gap = 0.0;  ///< filled on the oracle_check path
  energy::BalanceForm applied_form = energy::BalanceForm::general;
  std::vector<std::string> integral_names;
};

/// Reduced vector field at a state: full coordinate velocities
/// (v, alpha_1..alpha_k) and independent accelerations from the selected
/// dynamics path.
std::pair<Eigen::VectorXd, Eigen::VectorXd> derivative_field(
    const SystemSpec& spec, const KinematicState& s,
    DynamicsPath path = DynamicsPath::lagrangian);

/// Embedded Dormand-Prince 5(4) integration with adaptive steps. The guard
/// is checked at every stage evaluation; violations, step underflow and
/// non-finite states abort with the partial trajectory and a reason.
Trajectory integrate(const SystemSpec& spec, const KinematicState& s0, double t_end,
                     const IntegrateOptions& opts = {});

/// Per-integral max relative drift over the trajectory samples:
/// max_t |I(t) - I(t0)| / max(1, |I(t0)|).
std::vector<double> drift_report(const Trajectory& traj);

/// Same, for integrals evaluated on the fly instead of the recorded columns.
std::vector<double> drift_report(const Trajectory& traj,
                                 std::span<const energy::FirstIntegral> integrals);

}  // namespace voronec::sim
