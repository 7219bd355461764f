// Independent reference dynamics: full n-dimensional Newton equations with
// explicit constraint-reaction multipliers under the ideal-constraint
// condition. Differential-tests the reduced formulations.
#pragma once

#include <Eigen/Dense>

#include "voronec/system.hpp"

namespace voronec::oracle {

struct MultiplierSolution {
  Eigen::VectorXd a_full;    ///< accelerations of all n coordinates
  Eigen::VectorXd lambda;    ///< k multipliers
  Eigen::VectorXd reaction;  ///< generalized reaction forces, reaction_j = sum_nu lambda_nu dPhi_nu/dqdot_j
};

/// Solves the (n+k) saddle system
///   g a_full + h(q, qdot, t) = F + A^T lambda,   A a_full = b,
/// where Phi_nu = qdot_{m+nu} - alpha_nu, A = dPhi/dqdot, and b enforces
/// d(Phi)/dt = 0 along the motion. Requires an embedding.
MultiplierSolution multiplier_accel(const SystemSpec& spec, const KinematicState& s,
                                    const Eigen::VectorXd& forces);

/// Max |reaction . u| over a basis of admissible displacement directions u
/// (the lift of e_i by dalpha/dv). Zero in exact arithmetic: the literal
/// ideal-constraint condition.
double reaction_power_audit(const SystemSpec& spec, const KinematicState& s,
                            const MultiplierSolution& sol);

}  // namespace voronec::oracle
