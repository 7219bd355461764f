// Generalized energy, the balance identity induced by the reduced equations
// of motion, its structure-specific specializations, and first-integral
// detection.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "voronec/system.hpp"

namespace voronec::energy {

enum class BalanceForm { general, caplygin, homogeneous, linear, affine };

std::string to_string(BalanceForm f);

/// Double-entry audit of the energy rate at one state: dE/dt computed
/// directly along the motion versus the balance identity's right side,
/// for both the general identity and the specialization selected by the
/// structure tag.
struct BalanceReport {
  double energy = 0.0;
  double dEdt_direct = 0.0;   ///< total derivative of the energy along the motion
  double dEdt_balance = 0.0;  ///< general-identity right side
  double term_alpha_gap = 0.0;  ///< sum_nu (bar_alpha - alpha) dL*/dq_{m+nu}
  double term_bbar = 0.0;       ///< sum_nu bar_B_nu dT/dqdot_{m+nu}
  double term_dLdt = 0.0;       ///< -dL*/dt
  double residual = 0.0;        ///< dEdt_direct - dEdt_balance
  BalanceForm applied_form = BalanceForm::general;
  double applied_rhs = 0.0;       ///< right side of the applied specialization
  double applied_residual = 0.0;  ///< dEdt_direct - applied_rhs
  bool potential_forces = true;
  double raw_power = 0.0;  ///< reduced-force power (meaningful when non-potential)
};

/// bar_alpha_nu = sum_i v_i dalpha_nu/dv_i (Euler sum); equals alpha_nu
/// exactly when alpha_nu is homogeneous of degree 1 in v.
Eigen::VectorXd bar_alpha(const ConstraintSet& constraints, const KinematicState& s);

/// bar_B_nu from its definition (velocity/position/acceleration terms).
Eigen::VectorXd bar_b(const ConstraintSet& constraints, const KinematicState& s,
                      const Eigen::VectorXd& accel);

/// Second route: bar_B_nu = d/dt(bar_alpha - alpha)
///   - sum_mu (dalpha_nu/dq_{m+mu})(bar_alpha_mu - alpha_mu) + dalpha_nu/dt.
Eigen::VectorXd bar_b_total_derivative_path(const ConstraintSet& constraints,
                                            const KinematicState& s,
                                            const Eigen::VectorXd& accel);

/// Generalized energy E = sum_i v_i dL*/dv_i - L*. Reported without the
/// potential term when no potential is declared.
double energy_value(const SystemSpec& spec, const KinematicState& s);

/// Energy as a field of (q, v, t), for drift audits and total derivatives.
ScalarField energy_field(const SystemSpec& spec);

/// Evaluates the balance identity at a state with accelerations from a
/// dynamics solve. A residual above tolerance is a finding, not an error.
BalanceReport balance_residual(const SystemSpec& spec, const KinematicState& s,
                               const Eigen::VectorXd& accel);

/// Generalized energy integral of linear stationary constraints, evaluated
/// through the quadratic kinetic form. Throws SpecError when the
/// preconditions (linear tag, stationary constraints and Lagrangian) fail.
double jacobi_integral(const SystemSpec& spec, const KinematicState& s);

struct FirstIntegral {
  std::string name;
  std::string note;  ///< which hypothesis produced the claim
  std::function<double(const KinematicState&)> eval;
};

/// Conservation claims derived from structure tags and stationarity checks
/// (never from observed drift): the generalized energy for homogeneous
/// degree-1 stationary systems, the Jacobi integral for linear stationary
/// systems, the affine-constraint energy when the Lagrangian is free of the
/// dependent coordinates.
std::vector<FirstIntegral> detect_first_integrals(const SystemSpec& spec);

}  // namespace voronec::energy
