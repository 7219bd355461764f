#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "voronec/derived_fields.hpp"
#include "voronec/errors.hpp"
#include "voronec/fields.hpp"

namespace voronec {

/// Holonomic substrate: N material points located by X(q, t).
struct EmbeddingModel {
  int n = 0;           ///< generalized coordinate count
  int point_count = 0;
  int point_dim = 3;   ///< components per point (2 for planar systems)
  Eigen::VectorXd masses;  ///< per point, strictly positive [kg]
  VectorField position;    ///< (q, t) -> R^{point_count * point_dim}

  int dim() const { return point_count * point_dim; }
  double weight(int component) const { return masses[component / point_dim]; }

  void check() const {
    if (position.dim() != dim())
      throw SpecError("EmbeddingModel: position map dimension mismatch");
    if (masses.size() != point_count)
      throw SpecError("EmbeddingModel: need one mass per point");
    for (int i = 0; i < masses.size(); ++i)
      if (!(masses[i] > 0.0))
        throw SpecError("EmbeddingModel: masses must be strictly positive");
  }
};

namespace detail {

/// T(q, w, t) = 1/2 sum_d m_d Xdot_d^2 with Xdot_d = sum_j dX_d/dq_j w_j + dX_d/dt,
/// assembled at any dual level by differentiating the position map one level up.
template <class S>
S kinetic_eval(const EmbeddingModel& emb, std::span<const S> q, std::span<const S> w, S t) {
  using DS = Dual<S>;
  const int D = emb.dim();
  std::vector<DS> qq = lift(q);
  DS tt(t, S(0.0));
  std::vector<DS> out(D);
  std::vector<S> xdot(D, S(0.0));
  for (int j = 0; j < emb.n; ++j) {
    qq[j].d = S(1.0);
    emb.position(std::span<const DS>(qq), tt, std::span<DS>(out));
    qq[j].d = S(0.0);
    for (int d = 0; d < D; ++d) xdot[d] = xdot[d] + out[d].d * w[j];
  }
  tt.d = S(1.0);
  emb.position(std::span<const DS>(qq), tt, std::span<DS>(out));
  for (int d = 0; d < D; ++d) xdot[d] = xdot[d] + out[d].d;
  S e = S(0.0);
  for (int d = 0; d < D; ++d) e = e + (0.5 * emb.weight(d)) * xdot[d] * xdot[d];
  return e;
}

}  // namespace detail

/// Kinetic energy field of the embedding, over (q, w in R^n, t).
inline ScalarField make_kinetic_field(EmbeddingModel emb) {
  return ScalarField(
      [emb](std::span<const double> q, std::span<const double> w, double t) {
        return detail::kinetic_eval<double>(emb, q, w, t);
      },
      [emb](std::span<const D1> q, std::span<const D1> w, D1 t) {
        return detail::kinetic_eval<D1>(emb, q, w, t);
      },
      [emb](std::span<const D2> q, std::span<const D2> w, D2 t) {
        return detail::kinetic_eval<D2>(emb, q, w, t);
      });
}

/// Energy-level description: kinetic energy over all n velocities, optional
/// potential U with generalized forces dU/dq, optional explicit forces.
struct EnergyModel {
  ScalarField kinetic;    ///< (q, w in R^n, t) [J]
  ScalarField potential;  ///< (q, -, t) [J]; forces are +dU/dq
  std::vector<ScalarField> applied_forces;  ///< optional n fields (q, w, t)

  bool has_potential() const { return static_cast<bool>(potential); }
  bool has_applied() const { return !applied_forces.empty(); }
};

}  // namespace voronec
