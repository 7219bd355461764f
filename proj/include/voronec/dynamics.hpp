// Equations of motion at a state, in both formulations: the projected
// Newtonian coefficient form and the reduced Lagrangian (Voronec-type)
// form, plus the structure-specific reducers.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "voronec/system.hpp"

namespace voronec::dynamics {

/// Metric data of an embedding at (q, t):
///   g_ij   = dX^M/dq_i . dX/dq_j        xi[k](i,j) = d2X^M/dq_i dq_j . dX/dq_k
///   eta_ij = d2X^M/dq_i dt . dX/dq_j    zeta_i     = d2X^M/dt2 . dX/dq_i
///   b_i    = dX^M/dq_i . dX/dt          c          = 1/2 dX^M/dt . dX/dt
struct MetricCoefficients {
  Eigen::MatrixXd g;
  std::vector<Eigen::MatrixXd> xi;
  Eigen::MatrixXd eta;
  Eigen::VectorXd zeta;
  Eigen::VectorXd b;
  double c = 0.0;

  bool cartesian_diagonal(double tol = 1e-13) const;
};

MetricCoefficients metric_coefficients(const EmbeddingModel& emb,
                                       const Eigen::VectorXd& q, double t);

/// Coefficients of the projected Newton equations
///   sum_r C_i^r a_r + sum_{r,s} D_i^{r,s} v_r v_s + sum_r E_i^r v_r + G_i = Q_i.
/// C is symmetric positive definite at admissible states.
struct CoefficientBundle {
  Eigen::MatrixXd C;               ///< (i,r)
  std::vector<Eigen::MatrixXd> D;  ///< D[i](r,s)
  Eigen::MatrixXd E;               ///< (i,r)
  Eigen::VectorXd G;
};

enum class AssemblyPath { automatic, general, cartesian };

CoefficientBundle coefficient_assembly(const SystemSpec& spec, const KinematicState& s,
                                       AssemblyPath path = AssemblyPath::automatic);

/// Acceleration split of the Voronec correction coefficients:
/// B_i^nu = B0(i,nu) + sum_r B1[nu](i,r) a_r.
struct BSplit {
  Eigen::MatrixXd B0;               ///< (i, nu), acceleration-independent part
  std::vector<Eigen::MatrixXd> B1;  ///< B1[nu](i,r) = d2 alpha_nu / dv_i dv_r
};

BSplit b_coefficients(const ConstraintSet& constraints, const KinematicState& s);

/// B_i^nu at given accelerations.
Eigen::MatrixXd b_assembled(const BSplit& split, const Eigen::VectorXd& accel);

/// Independent evaluation of B_i^nu through the total-derivative identity
/// B_i^nu = d/dt(dalpha_nu/dv_i) - dalpha_nu/dq_i
///          - sum_mu (dalpha_mu/dv_i)(dalpha_nu/dq_{m+mu}).
Eigen::MatrixXd b_total_derivative_path(const ConstraintSet& constraints,
                                        const KinematicState& s,
                                        const Eigen::VectorXd& accel);

/// Generalized forces (F^{(q_1)}, ..., F^{(q_n)}) at the state: potential
/// gradient plus any explicit applied forces, with dependent velocities
/// substituted.
Eigen::VectorXd generalized_forces(const SystemSpec& spec, const KinematicState& s);

/// Restricted kinetic energy T*(q, v, t) as a field.
ScalarField restricted_kinetic_field(const SystemSpec& spec);

/// Values of the dependent velocities alpha_nu at the state.
Eigen::VectorXd alpha_values(const ConstraintSet& constraints, const KinematicState& s);

/// Full n-velocity vector (v, alpha_1, ..., alpha_k).
Eigen::VectorXd full_velocity(const SystemSpec& spec, const KinematicState& s);

/// Independent accelerations from the Newtonian coefficient form
/// (embedding required); SPD solve of C a = rhs.
Eigen::VectorXd accel_newtonian(const SystemSpec& spec, const KinematicState& s,
                                const Eigen::VectorXd& forces);

/// Independent accelerations from the reduced Lagrangian form; works from
/// the energy model alone. The affine-in-a structure is extracted
/// analytically, so one symmetric solve is exact.
Eigen::VectorXd accel_lagrangian(const SystemSpec& spec, const KinematicState& s,
                                 const Eigen::VectorXd& forces);

enum class Reducer { voronec_linear, caplygin, caplygin_classical };

/// Structure-specific reduced equations; agrees with the general path on
/// systems satisfying the reducer's hypotheses.
Eigen::VectorXd reduce_special(const SystemSpec& spec, const KinematicState& s,
                               const Eigen::VectorXd& forces, Reducer reducer);

/// Dispatching variant: picks the reducer from the spec's classification;
/// falls back to the general Lagrangian path when no reducer applies
/// (fell_back reports that).
Eigen::VectorXd reduce_special(const SystemSpec& spec, const KinematicState& s,
                               const Eigen::VectorXd& forces, bool* fell_back = nullptr);

/// Dependent accelerations d(alpha)/dt along the motion given the
/// independent accelerations.
Eigen::VectorXd dependent_accel(const SystemSpec& spec, const KinematicState& s,
                                const Eigen::VectorXd& accel);

}  // namespace voronec::dynamics
