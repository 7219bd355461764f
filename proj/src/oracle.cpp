#include "voronec/oracle.hpp"

#include <Eigen/LU>

#include "voronec/diff.hpp"
#include "voronec/dynamics.hpp"
#include "voronec/errors.hpp"

namespace voronec::oracle {

namespace {

std::span<const double> span_of(const Eigen::VectorXd& x) {
  return {x.data(), size_t(x.size())};
}

}  // namespace

MultiplierSolution multiplier_accel(const SystemSpec& spec, const KinematicState& s,
                                    const Eigen::VectorXd& forces) {
  if (!spec.embedding)
    throw SpecError("multiplier_accel: oracle needs an embedding model");
  spec.require_admissible(s);
  const int n = spec.dims.n;
  const int m = spec.dims.m;
  const int k = spec.dims.k;

  const auto mc = dynamics::metric_coefficients(*spec.embedding, s.q, s.t);
  const Eigen::VectorXd w = dynamics::full_velocity(spec, s);

  // velocity/time terms of the unconstrained Lagrange equations
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    h[j] = w.dot(mc.xi[j] * w) + 2.0 * mc.eta.col(j).dot(w) + mc.zeta[j];
  }

  // A(nu, j) = dPhi_nu/dqdot_j with Phi_nu = qdot_{m+nu} - alpha_nu
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, n);
  Eigen::VectorXd b(k);
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  for (int nu = 0; nu < k; ++nu) {
    const Eigen::VectorXd gv = diff::grad_v(spec.constraints.alpha[nu], q, v, s.t);
    const Eigen::VectorXd gq = diff::grad_q(spec.constraints.alpha[nu], q, v, s.t);
    A.row(nu).head(m) = -gv.transpose();
    A(nu, m + nu) = 1.0;
    b[nu] = gq.dot(w) + diff::partial_t(spec.constraints.alpha[nu], q, v, s.t);
  }

  Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(n + k, n + k);
  saddle.topLeftCorner(n, n) = mc.g;
  saddle.topRightCorner(n, k) = -A.transpose();
  saddle.bottomLeftCorner(k, n) = A;

  Eigen::VectorXd rhs(n + k);
  rhs.head(n) = forces - h;
  rhs.tail(k) = b;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(saddle);
  if (!lu.isInvertible())
    throw FormulationError(
        "multiplier_accel: saddle system singular (state near constraint degeneracy)");
  const Eigen::VectorXd sol = lu.solve(rhs);

  MultiplierSolution out;
  out.a_full = sol.head(n);
  out.lambda = sol.tail(k);
  out.reaction = A.transpose() * out.lambda;
  return out;
}

double reaction_power_audit(const SystemSpec& spec, const KinematicState& s,
                            const MultiplierSolution& sol) {
  const int m = spec.dims.m;
  const int k = spec.dims.k;
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);

  Eigen::MatrixXd lift(k, m);  // dalpha_nu/dv_i
  for (int nu = 0; nu < k; ++nu)
    lift.row(nu) = diff::grad_v(spec.constraints.alpha[nu], q, v, s.t).transpose();

  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double power = sol.reaction[i];
    for (int nu = 0; nu < k; ++nu) power += sol.reaction[m + nu] * lift(nu, i);
    worst = std::max(worst, std::abs(power));
  }
  return worst;
}

}  // namespace voronec::oracle
