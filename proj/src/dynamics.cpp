#include "voronec/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <vector>

#include "voronec/derived_fields.hpp"
#include "voronec/diff.hpp"
#include "voronec/errors.hpp"

namespace voronec::dynamics {

namespace {

std::span<const double> span_of(const Eigen::VectorXd& x) {
  return {x.data(), size_t(x.size())};
}

/// Position-map derivatives at (q, t): Jacobian, coordinate Hessians,
/// mixed q-t and t-t second derivatives, time column.
struct EmbeddingDerivatives {
  Eigen::MatrixXd J;                    // D×n, dX_d/dq_j
  std::vector<Eigen::MatrixXd> H;       // H[d](i,j) = d2X_d/dq_i dq_j
  Eigen::MatrixXd Hqt;                  // D×n, d2X_d/dq_i dt  (column i)
  Eigen::VectorXd Htt;                  // D
  Eigen::VectorXd Xt;                   // D, dX_d/dt
};

EmbeddingDerivatives embedding_derivatives(const EmbeddingModel& emb,
                                           const Eigen::VectorXd& q, double t) {
  const int n = emb.n;
  const int D = emb.dim();
  EmbeddingDerivatives out;
  out.J.resize(D, n);
  out.H.assign(D, Eigen::MatrixXd::Zero(n, n));
  out.Hqt.resize(D, n);
  out.Htt.resize(D);
  out.Xt.resize(D);

  std::vector<D2> qq(n);
  for (int j = 0; j < n; ++j) qq[j] = D2(q[j]);
  std::vector<D2> buf(D);
  D2 tt(t);

  for (int i = 0; i < n; ++i) {
    qq[i].v.d = 1.0;  // inner seed on q_i
    // pair with every q_j (outer seed), j <= i; also extracts J and Hqt
    for (int j = 0; j <= i; ++j) {
      qq[j].d.v = 1.0;
      emb.position(std::span<const D2>(qq), tt, std::span<D2>(buf));
      qq[j].d.v = 0.0;
      for (int d = 0; d < D; ++d) {
        out.H[d](i, j) = buf[d].d.d;
        out.H[d](j, i) = buf[d].d.d;
        if (j == 0) out.J(d, i) = buf[d].v.d;
      }
    }
    {
      const D2 tseed(D1(t, 0.0), D1(1.0, 0.0));
      emb.position(std::span<const D2>(qq), tseed, std::span<D2>(buf));
      for (int d = 0; d < D; ++d) out.Hqt(d, i) = buf[d].d.d;
    }
    qq[i].v.d = 0.0;
  }
  {
    // t on both levels for Htt; Xt from the first level
    const D2 tseed(D1(t, 1.0), D1(1.0, 0.0));
    emb.position(std::span<const D2>(qq), tseed, std::span<D2>(buf));
    for (int d = 0; d < D; ++d) {
      out.Htt[d] = buf[d].d.d;
      out.Xt[d] = buf[d].v.d;
    }
    for (int d = 0; d < D; ++d)
      if (!std::isfinite(out.Xt[d]) || !std::isfinite(out.Htt[d]))
        throw SpecError("embedding: non-finite position derivative");
  }
  for (int d = 0; d < D; ++d)
    for (int i = 0; i < emb.n; ++i)
      if (!std::isfinite(out.J(d, i)) || !out.H[d].allFinite())
        throw SpecError("embedding: non-finite position derivative");
  return out;
}

/// First derivatives of every constraint at a state.
struct ConstraintDerivatives {
  Eigen::VectorXd value;  // k
  Eigen::MatrixXd A;      // k×m, dalpha_nu/dv_i
  Eigen::MatrixXd dq;     // k×n
  Eigen::VectorXd dt;     // k
};

ConstraintDerivatives constraint_derivatives(const ConstraintSet& cs, const KinematicState& s) {
  const int k = cs.k();
  ConstraintDerivatives out;
  out.value.resize(k);
  out.A.resize(k, cs.m);
  out.dq.resize(k, cs.n);
  out.dt.resize(k);
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  for (int nu = 0; nu < k; ++nu) {
    const double a = cs.alpha[nu](q, v, s.t);
    if (!std::isfinite(a))
      throw SingularityError("constraint value non-finite at state", cs.m + nu);
    out.value[nu] = a;
    out.A.row(nu) = diff::grad_v(cs.alpha[nu], q, v, s.t).transpose();
    out.dq.row(nu) = diff::grad_q(cs.alpha[nu], q, v, s.t).transpose();
    out.dt[nu] = diff::partial_t(cs.alpha[nu], q, v, s.t);
  }
  return out;
}

}  // namespace

bool MetricCoefficients::cartesian_diagonal(double tol) const {
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      if (i != j && std::abs(g(i, j)) > tol * scale) return false;
  for (const auto& x : xi)
    if (x.cwiseAbs().maxCoeff() > tol * scale) return false;
  if (eta.size() > 0 && eta.cwiseAbs().maxCoeff() > tol * scale) return false;
  if (zeta.size() > 0 && zeta.cwiseAbs().maxCoeff() > tol * scale) return false;
  return true;
}

MetricCoefficients metric_coefficients(const EmbeddingModel& emb,
                                       const Eigen::VectorXd& q, double t) {
  const int n = emb.n;
  const int D = emb.dim();
  const auto der = embedding_derivatives(emb, q, t);

  MetricCoefficients mc;
  mc.g = Eigen::MatrixXd::Zero(n, n);
  mc.xi.assign(n, Eigen::MatrixXd::Zero(n, n));
  mc.eta = Eigen::MatrixXd::Zero(n, n);
  mc.zeta = Eigen::VectorXd::Zero(n);
  mc.b = Eigen::VectorXd::Zero(n);
  mc.c = 0.0;

  for (int d = 0; d < D; ++d) {
    const double w = emb.weight(d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        mc.g(i, j) += w * der.J(d, i) * der.J(d, j);
        mc.eta(i, j) += w * der.Hqt(d, i) * der.J(d, j);
        for (int kk = 0; kk < n; ++kk)
          mc.xi[kk](i, j) += w * der.H[d](i, j) * der.J(d, kk);
      }
      mc.zeta[i] += w * der.Htt[d] * der.J(d, i);
      mc.b[i] += w * der.J(d, i) * der.Xt[d];
    }
    mc.c += 0.5 * w * der.Xt[d] * der.Xt[d];
  }
  return mc;
}

ScalarField restricted_kinetic_field(const SystemSpec& spec) {
  return make_tstar_field(spec.energy.kinetic, spec.constraints.alpha, spec.dims.n,
                          spec.dims.m);
}

Eigen::VectorXd alpha_values(const ConstraintSet& cs, const KinematicState& s) {
  Eigen::VectorXd out(cs.k());
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  for (int nu = 0; nu < cs.k(); ++nu) {
    out[nu] = cs.alpha[nu](q, v, s.t);
    if (!std::isfinite(out[nu]))
      throw SingularityError("constraint value non-finite at state", cs.m + nu);
  }
  return out;
}

Eigen::VectorXd full_velocity(const SystemSpec& spec, const KinematicState& s) {
  Eigen::VectorXd w(spec.dims.n);
  w.head(spec.dims.m) = s.v;
  w.tail(spec.dims.k) = alpha_values(spec.constraints, s);
  return w;
}

CoefficientBundle coefficient_assembly(const SystemSpec& spec, const KinematicState& s,
                                       AssemblyPath path) {
  if (!spec.embedding)
    throw SpecError("coefficient_assembly: spec has no embedding model");
  spec.require_admissible(s);
  const int m = spec.dims.m;
  const int k = spec.dims.k;

  const auto mc = metric_coefficients(*spec.embedding, s.q, s.t);
  const auto cd = constraint_derivatives(spec.constraints, s);

  const bool cartesian = path == AssemblyPath::cartesian ||
                         (path == AssemblyPath::automatic && mc.cartesian_diagonal());

  CoefficientBundle out;
  out.C.resize(m, m);
  out.D.assign(m, Eigen::MatrixXd::Zero(m, m));
  out.E = Eigen::MatrixXd::Zero(m, m);
  out.G = Eigen::VectorXd::Zero(m);

  if (cartesian) {
    // diagonal stationary metric: only g_{jj} survives
    for (int i = 0; i < m; ++i)
      for (int r = 0; r < m; ++r) {
        double c = (i == r) ? mc.g(i, i) : 0.0;
        for (int nu = 0; nu < k; ++nu)
          c += mc.g(m + nu, m + nu) * cd.A(nu, i) * cd.A(nu, r);
        out.C(i, r) = c;
      }
    for (int i = 0; i < m; ++i)
      for (int r = 0; r < m; ++r) {
        double e = 0.0;
        for (int nu = 0; nu < k; ++nu)
          e += mc.g(m + nu, m + nu) * cd.A(nu, i) * cd.dq(nu, r);
        out.E(i, r) = e;
      }
    for (int i = 0; i < m; ++i) {
      double gi = 0.0;
      for (int nu = 0; nu < k; ++nu) {
        double drift = cd.dt[nu];
        for (int mu = 0; mu < k; ++mu) drift += cd.dq(nu, m + mu) * cd.value[mu];
        gi += mc.g(m + nu, m + nu) * cd.A(nu, i) * drift;
      }
      out.G[i] = gi;
    }
    return out;
  }

  // general path: collect the projection of the full Newton equations onto
  // the admissible directions X_i = dX/dq_i + sum_nu A(nu,i) dX/dq_{m+nu}
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < m; ++r) {
      double c = mc.g(r, i);
      for (int nu = 0; nu < k; ++nu)
        c += cd.A(nu, i) * mc.g(r, m + nu) + cd.A(nu, r) * mc.g(m + nu, i);
      for (int nu = 0; nu < k; ++nu)
        for (int mu = 0; mu < k; ++mu)
          c += cd.A(nu, r) * cd.A(mu, i) * mc.g(m + nu, m + mu);
      out.C(i, r) = c;
    }

    for (int r = 0; r < m; ++r)
      for (int sdx = 0; sdx < m; ++sdx) {
        double dv = mc.xi[i](r, sdx);
        for (int mu = 0; mu < k; ++mu) dv += cd.A(mu, i) * mc.xi[m + mu](r, sdx);
        out.D[i](r, sdx) = dv;
      }

    for (int r = 0; r < m; ++r) {
      double e = 0.0;
      for (int nu = 0; nu < k; ++nu) {
        double gproj = mc.g(m + nu, i);
        for (int mu = 0; mu < k; ++mu) gproj += cd.A(mu, i) * mc.g(m + nu, m + mu);
        e += gproj * cd.dq(nu, r);
        double xiproj = mc.xi[i](r, m + nu);
        for (int mu = 0; mu < k; ++mu) xiproj += cd.A(mu, i) * mc.xi[m + mu](r, m + nu);
        e += 2.0 * cd.value[nu] * xiproj;
      }
      double etaproj = mc.eta(r, i);
      for (int mu = 0; mu < k; ++mu) etaproj += cd.A(mu, i) * mc.eta(r, m + mu);
      e += 2.0 * etaproj;
      out.E(i, r) = e;
    }

    double gi = 0.0;
    for (int nu = 0; nu < k; ++nu) {
      double drift = cd.dt[nu];
      for (int mu = 0; mu < k; ++mu) drift += cd.dq(nu, m + mu) * cd.value[mu];
      double gproj = mc.g(m + nu, i);
      for (int p = 0; p < k; ++p) gproj += cd.A(p, i) * mc.g(m + nu, m + p);
      gi += drift * gproj;
      for (int mu = 0; mu < k; ++mu) {
        double xiproj = mc.xi[i](m + nu, m + mu);
        for (int p = 0; p < k; ++p) xiproj += cd.A(p, i) * mc.xi[m + p](m + nu, m + mu);
        gi += cd.value[nu] * cd.value[mu] * xiproj;
      }
      double etaproj = mc.eta(m + nu, i);
      for (int p = 0; p < k; ++p) etaproj += cd.A(p, i) * mc.eta(m + nu, m + p);
      gi += 2.0 * cd.value[nu] * etaproj;
    }
    gi += mc.zeta[i];
    for (int p = 0; p < k; ++p) gi += cd.A(p, i) * mc.zeta[m + p];
    out.G[i] = gi;
  }
  return out;
}

BSplit b_coefficients(const ConstraintSet& cs, const KinematicState& s) {
  const int m = cs.m;
  const int k = cs.k();
  const auto cd = constraint_derivatives(cs, s);

  BSplit out;
  out.B0 = Eigen::MatrixXd::Zero(m, k);
  out.B1.assign(k, Eigen::MatrixXd::Zero(m, m));

  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  for (int nu = 0; nu < k; ++nu) {
    const auto blocks = diff::second_mixed(cs.alpha[nu], q, v, s.t);
    out.B1[nu] = blocks.vv;
    for (int i = 0; i < m; ++i) {
      double b0 = blocks.vt[i] - cd.dq(nu, i);
      for (int r = 0; r < m; ++r) b0 += blocks.vq(i, r) * s.v[r];
      for (int mu = 0; mu < k; ++mu)
        b0 += blocks.vq(i, m + mu) * cd.value[mu] - cd.A(mu, i) * cd.dq(nu, m + mu);
      out.B0(i, nu) = b0;
    }
  }
  return out;
}

Eigen::MatrixXd b_assembled(const BSplit& split, const Eigen::VectorXd& accel) {
  Eigen::MatrixXd out = split.B0;
  for (size_t nu = 0; nu < split.B1.size(); ++nu)
    out.col(nu) += split.B1[nu] * accel;
  return out;
}

Eigen::MatrixXd b_total_derivative_path(const ConstraintSet& cs, const KinematicState& s,
                                        const Eigen::VectorXd& accel) {
  const int m = cs.m;
  const int k = cs.k();
  const auto cd = constraint_derivatives(cs, s);
  Eigen::MatrixXd out(m, k);
  std::span<const ScalarField> alphas{cs.alpha.data(), cs.alpha.size()};
  std::span<const double> a{accel.data(), size_t(accel.size())};
  for (int nu = 0; nu < k; ++nu) {
    for (int i = 0; i < m; ++i) {
      const ScalarField dvi = make_dv_field(cs.alpha[nu], i);
      double b = diff::total_derivative(dvi, alphas, s, a) - cd.dq(nu, i);
      for (int mu = 0; mu < k; ++mu) b -= cd.A(mu, i) * cd.dq(nu, m + mu);
      out(i, nu) = b;
    }
  }
  return out;
}

Eigen::VectorXd generalized_forces(const SystemSpec& spec, const KinematicState& s) {
  const int n = spec.dims.n;
  const auto q = span_of(s.q);
  // A declared potential is authoritative; explicit forces are the
  // non-potential route (validate() checks agreement when both exist).
  if (spec.energy.has_potential()) {
    return diff::grad_q(spec.energy.potential, q, {}, s.t);
  }
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  if (spec.energy.has_applied()) {
    const Eigen::VectorXd w = full_velocity(spec, s);
    const auto ws = span_of(w);
    for (int j = 0; j < n; ++j)
      if (spec.energy.applied_forces[j]) F[j] += spec.energy.applied_forces[j](q, ws, s.t);
  }
  return F;
}

namespace {

Eigen::VectorXd reduced_forces(const SystemSpec& spec, const Eigen::VectorXd& forces,
                               const Eigen::MatrixXd& A) {
  const int m = spec.dims.m;
  const int k = spec.dims.k;
  Eigen::VectorXd rhs = forces.head(m);
  for (int i = 0; i < m; ++i)
    for (int nu = 0; nu < k; ++nu) rhs[i] += A(nu, i) * forces[m + nu];
  return rhs;
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& C, const Eigen::VectorXd& rhs,
                          const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success)
    throw FormulationError(std::string(what) +
                           ": matrix not positive definite (inadmissible state or bad model)");
  return llt.solve(rhs);
}

}  // namespace

Eigen::VectorXd accel_newtonian(const SystemSpec& spec, const KinematicState& s,
                                const Eigen::VectorXd& forces) {
  const int m = spec.dims.m;
  const auto bundle = coefficient_assembly(spec, s);
  const auto cd = constraint_derivatives(spec.constraints, s);
  Eigen::VectorXd rhs = reduced_forces(spec, forces, cd.A);
  for (int i = 0; i < m; ++i) {
    rhs[i] -= s.v.dot(bundle.D[i] * s.v);
    rhs[i] -= bundle.E.row(i).dot(s.v);
    rhs[i] -= bundle.G[i];
  }
  return solve_spd(bundle.C, rhs, "accel_newtonian");
}

Eigen::VectorXd accel_lagrangian(const SystemSpec& spec, const KinematicState& s,
                                 const Eigen::VectorXd& forces) {
  spec.require_admissible(s);
  const int n = spec.dims.n;
  const int m = spec.dims.m;
  const int k = spec.dims.k;

  const ScalarField tstar = restricted_kinetic_field(spec);
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);

  const auto blocks = diff::second_mixed(tstar, q, v, s.t);   // d2T*/dv dq, dv dv, dv dt
  const Eigen::VectorXd tstar_q = diff::grad_q(tstar, q, v, s.t);
  const auto cd = constraint_derivatives(spec.constraints, s);
  const auto bsplit = b_coefficients(spec.constraints, s);

  // momenta conjugate to the dependent velocities, restricted
  const Eigen::VectorXd w = full_velocity(spec, s);
  const Eigen::VectorXd Tw = diff::grad_v(spec.energy.kinetic, q, span_of(w), s.t);
  const Eigen::VectorXd p = Tw.tail(k);

  Eigen::MatrixXd Amat = blocks.vv;
  for (int nu = 0; nu < k; ++nu) Amat -= p[nu] * bsplit.B1[nu];

  Eigen::VectorXd rhs = reduced_forces(spec, forces, cd.A);
  const Eigen::VectorXd qdot = w;  // full coordinate velocities
  for (int i = 0; i < m; ++i) {
    double r = rhs[i];
    for (int j = 0; j < n; ++j) r -= blocks.vq(i, j) * qdot[j];
    r -= blocks.vt[i];
    r += tstar_q[i];
    for (int nu = 0; nu < k; ++nu) r += tstar_q[m + nu] * cd.A(nu, i);
    for (int nu = 0; nu < k; ++nu) r += p[nu] * bsplit.B0(i, nu);
    rhs[i] = r;
  }

  // Amat is symmetric and equals the Newtonian C for embedding-backed
  // systems; solve with LDLT so degenerate-T* systems (rank restored by the
  // B1 term) still pass through the same symmetric route.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Amat);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw FormulationError("accel_lagrangian: reduced matrix not positive definite");
  Eigen::VectorXd a = ldlt.solve(rhs);
  if (!a.allFinite())
    throw FormulationError("accel_lagrangian: singular reduced system");
  return a;
}

Eigen::VectorXd reduce_special(const SystemSpec& spec, const KinematicState& s,
                               const Eigen::VectorXd& forces, Reducer reducer) {
  spec.require_admissible(s);
  const int n = spec.dims.n;
  const int m = spec.dims.m;
  const int k = spec.dims.k;

  const ScalarField tstar = restricted_kinetic_field(spec);
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  const auto blocks = diff::second_mixed(tstar, q, v, s.t);
  const Eigen::VectorXd tstar_q = diff::grad_q(tstar, q, v, s.t);
  const auto cd = constraint_derivatives(spec.constraints, s);

  const Eigen::VectorXd w = full_velocity(spec, s);
  const Eigen::VectorXd Tw = diff::grad_v(spec.energy.kinetic, q, span_of(w), s.t);
  const Eigen::VectorXd p = Tw.tail(k);

  Eigen::MatrixXd Amat = blocks.vv;
  Eigen::MatrixXd B0 = Eigen::MatrixXd::Zero(m, k);

  switch (reducer) {
    case Reducer::voronec_linear: {
      // B_i^nu = sum_r beta^nu_{ir} v_r + da_{nu,i}/dt with
      // beta^nu_{ir} = da_{nu,i}/dq_r - da_{nu,r}/dq_i
      //             + sum_mu (da_{nu,i}/dq_{m+mu} a_{mu,r} - da_{nu,r}/dq_{m+mu} a_{mu,i});
      // the coefficient derivatives are the mixed second derivatives of alpha.
      for (int nu = 0; nu < k; ++nu) {
        const auto ab = diff::second_mixed(spec.constraints.alpha[nu], q, v, s.t);
        for (int i = 0; i < m; ++i) {
          double b = ab.vt[i];
          for (int r = 0; r < m; ++r) {
            double beta = ab.vq(i, r) - ab.vq(r, i);
            for (int mu = 0; mu < k; ++mu)
              beta += ab.vq(i, m + mu) * cd.A(mu, r) - ab.vq(r, m + mu) * cd.A(mu, i);
            b += beta * s.v[r];
          }
          B0(i, nu) = b;
        }
      }
      break;
    }
    case Reducer::caplygin: {
      // dependent-coordinate terms dropped; acceleration terms kept
      for (int nu = 0; nu < k; ++nu) {
        const auto ab = diff::second_mixed(spec.constraints.alpha[nu], q, v, s.t);
        Amat -= p[nu] * ab.vv;
        for (int i = 0; i < m; ++i) {
          double b = ab.vt[i] - cd.dq(nu, i);
          for (int r = 0; r < m; ++r) b += ab.vq(i, r) * s.v[r];
          B0(i, nu) = b;
        }
      }
      break;
    }
    case Reducer::caplygin_classical: {
      for (int nu = 0; nu < k; ++nu) {
        const auto ab = diff::second_mixed(spec.constraints.alpha[nu], q, v, s.t);
        for (int i = 0; i < m; ++i) {
          double b = 0.0;
          for (int r = 0; r < m; ++r) b += (ab.vq(i, r) - ab.vq(r, i)) * s.v[r];
          B0(i, nu) = b;
        }
      }
      break;
    }
  }

  Eigen::VectorXd rhs = reduced_forces(spec, forces, cd.A);
  const Eigen::VectorXd& qdot = w;
  for (int i = 0; i < m; ++i) {
    double r = rhs[i];
    for (int j = 0; j < n; ++j) r -= blocks.vq(i, j) * qdot[j];
    r -= blocks.vt[i];
    r += tstar_q[i];
    for (int nu = 0; nu < k; ++nu) r += tstar_q[m + nu] * cd.A(nu, i);
    for (int nu = 0; nu < k; ++nu) r += p[nu] * B0(i, nu);
    rhs[i] = r;
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(Amat);
  if (ldlt.info() != Eigen::Success)
    throw FormulationError("reduce_special: singular reduced matrix");
  Eigen::VectorXd a = ldlt.solve(rhs);
  if (!a.allFinite()) throw FormulationError("reduce_special: singular reduced system");
  return a;
}

Eigen::VectorXd reduce_special(const SystemSpec& spec, const KinematicState& s,
                               const Eigen::VectorXd& forces, bool* fell_back) {
  const auto samples = draw_samples(spec, 8, 20240u);
  const auto structure = classify_constraints(spec.constraints, samples);
  const auto cap = caplygin_class(spec, samples);
  if (fell_back) *fell_back = false;
  if (structure.tag == StructureTag::linear) {
    if (cap == CaplyginClass::classical)
      return reduce_special(spec, s, forces, Reducer::caplygin_classical);
    return reduce_special(spec, s, forces, Reducer::voronec_linear);
  }
  if (cap != CaplyginClass::none)
    return reduce_special(spec, s, forces, Reducer::caplygin);
  if (fell_back) *fell_back = true;
  return accel_lagrangian(spec, s, forces);
}

Eigen::VectorXd dependent_accel(const SystemSpec& spec, const KinematicState& s,
                                const Eigen::VectorXd& accel) {
  const int k = spec.dims.k;
  const auto cd = constraint_derivatives(spec.constraints, s);
  Eigen::VectorXd out(k);
  for (int nu = 0; nu < k; ++nu) {
    double r = cd.dt[nu] + cd.A.row(nu).dot(accel);
    for (int j = 0; j < spec.dims.m; ++j) r += cd.dq(nu, j) * s.v[j];
    for (int mu = 0; mu < k; ++mu) r += cd.dq(nu, spec.dims.m + mu) * cd.value[mu];
    out[nu] = r;
  }
  return out;
}

}  // namespace voronec::dynamics
