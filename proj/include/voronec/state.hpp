#pragma once

#include <Eigen/Dense>

#include "voronec/errors.hpp"

namespace voronec {

/// Dimension bookkeeping for a chart with n coordinates, m independent
/// velocities and k = n - m explicit velocity constraints.
struct ChartDims {
  int n;  ///< generalized coordinates
  int m;  ///< independent velocities
  int k;  ///< constraints

  ChartDims() : ChartDims(1, 1) {}
  ChartDims(int n_, int m_) : n(n_), m(m_), k(n_ - m_) {
    if (m < 1) throw SpecError("ChartDims: need at least one independent velocity");
    if (k < 0) throw SpecError("ChartDims: more independent velocities than coordinates");
    if (k >= n) throw SpecError("ChartDims: constraint count must satisfy k < n");
  }
};

/// Phase point of the reduced system: coordinates, independent velocities, time.
struct KinematicState {
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  double t = 0.0;

  bool finite() const { return q.allFinite() && v.allFinite() && std::isfinite(t); }
};

}  // namespace voronec
