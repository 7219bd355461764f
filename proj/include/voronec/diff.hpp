// First and second partial derivatives of scalar fields by dual-number
// forward differentiation (default) or central finite differences (oracle
// and fallback), plus the constrained total time derivative.
#pragma once

#include <Eigen/Dense>
#include <span>

#include "voronec/fields.hpp"
#include "voronec/state.hpp"

namespace voronec::diff {

enum class Mode { dual, finite_difference };

struct Backend {
  Mode mode = Mode::dual;
  /// Relative step for central differences; per-variable step is
  /// fd_step * max(1, |x|).
  double fd_step = 1e-5;
};

Eigen::VectorXd grad_v(const ScalarField& f, std::span<const double> q,
                       std::span<const double> v, double t, const Backend& be = {});
Eigen::VectorXd grad_q(const ScalarField& f, std::span<const double> q,
                       std::span<const double> v, double t, const Backend& be = {});
double partial_t(const ScalarField& f, std::span<const double> q,
                 std::span<const double> v, double t, const Backend& be = {});

/// Second-derivative blocks with the first index running over v.
struct SecondBlocks {
  Eigen::MatrixXd vq;  ///< (i,j) = d²f/dv_i dq_j
  Eigen::MatrixXd vv;  ///< (i,r) = d²f/dv_i dv_r, exactly symmetric in dual mode
  Eigen::VectorXd vt;  ///< (i)   = d²f/dv_i dt
};
SecondBlocks second_mixed(const ScalarField& f, std::span<const double> q,
                          std::span<const double> v, double t, const Backend& be = {});

/// d/dt of f(q, v, t) along a motion with independent accelerations `accel`,
/// dependent velocities supplied by the constraint functions `alphas`.
double total_derivative(const ScalarField& f, std::span<const ScalarField> alphas,
                        const KinematicState& s, std::span<const double> accel,
                        const Backend& be = {});

// KinematicState conveniences
inline Eigen::VectorXd grad_v(const ScalarField& f, const KinematicState& s, const Backend& be = {}) {
  return grad_v(f, {s.q.data(), size_t(s.q.size())}, {s.v.data(), size_t(s.v.size())}, s.t, be);
}
inline Eigen::VectorXd grad_q(const ScalarField& f, const KinematicState& s, const Backend& be = {}) {
  return grad_q(f, {s.q.data(), size_t(s.q.size())}, {s.v.data(), size_t(s.v.size())}, s.t, be);
}
inline double partial_t(const ScalarField& f, const KinematicState& s, const Backend& be = {}) {
  return partial_t(f, {s.q.data(), size_t(s.q.size())}, {s.v.data(), size_t(s.v.size())}, s.t, be);
}
inline SecondBlocks second_mixed(const ScalarField& f, const KinematicState& s, const Backend& be = {}) {
  return second_mixed(f, {s.q.data(), size_t(s.q.size())}, {s.v.data(), size_t(s.v.size())}, s.t, be);
}

}  // namespace voronec::diff
