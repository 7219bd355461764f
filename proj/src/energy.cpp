#include "voronec/energy.hpp"

#include <cmath>
#include <memory>

#include "voronec/derived_fields.hpp"
#include "voronec/diff.hpp"
#include "voronec/dynamics.hpp"
#include "voronec/errors.hpp"

namespace voronec::energy {

namespace {

std::span<const double> span_of(const Eigen::VectorXd& x) {
  return {x.data(), size_t(x.size())};
}

/// Pointwise difference of two fields (first dual level only).
ScalarField field_difference(ScalarField a, ScalarField b) {
  return ScalarField(
      [a, b](std::span<const double> q, std::span<const double> v, double t) {
        return a(q, v, t) - b(q, v, t);
      },
      [a, b](std::span<const D1> q, std::span<const D1> v, D1 t) {
        return a(q, v, t) - b(q, v, t);
      },
      nullptr);
}

/// Momenta conjugate to the dependent velocities, restricted by the
/// constraints: p_nu = dT/dqdot_{m+nu} at (q, (v, alpha), t).
Eigen::VectorXd dependent_momenta(const SystemSpec& spec, const KinematicState& s) {
  const Eigen::VectorXd w = dynamics::full_velocity(spec, s);
  const Eigen::VectorXd Tw =
      diff::grad_v(spec.energy.kinetic, span_of(s.q), span_of(w), s.t);
  return Tw.tail(spec.dims.k);
}

Eigen::VectorXd affine_offsets(const SystemSpec& spec, const KinematicState& s) {
  const int k = spec.dims.k;
  Eigen::VectorXd c(k);
  if (int(spec.constraints.affine_offset.size()) == k) {
    bool all = true;
    for (int nu = 0; nu < k; ++nu) all &= bool(spec.constraints.affine_offset[nu]);
    if (all) {
      for (int nu = 0; nu < k; ++nu) c[nu] = spec.constraints.affine_offset[nu]({}, {}, s.t);
      return c;
    }
  }
  // fall back on the velocity-free value of alpha
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(spec.dims.m);
  for (int nu = 0; nu < k; ++nu)
    c[nu] = spec.constraints.alpha[nu](span_of(s.q), span_of(zero), s.t);
  return c;
}

}  // namespace

std::string to_string(BalanceForm f) {
  switch (f) {
    case BalanceForm::general: return "general";
    case BalanceForm::caplygin: return "caplygin";
    case BalanceForm::homogeneous: return "homogeneous";
    case BalanceForm::linear: return "linear";
    case BalanceForm::affine: return "affine";
  }
  return "?";
}

Eigen::VectorXd bar_alpha(const ConstraintSet& constraints, const KinematicState& s) {
  const int k = constraints.k();
  Eigen::VectorXd out(k);
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  for (int nu = 0; nu < k; ++nu) {
    out[nu] = s.v.dot(diff::grad_v(constraints.alpha[nu], q, v, s.t));
  }
  return out;
}

Eigen::VectorXd bar_b(const ConstraintSet& constraints, const KinematicState& s,
                      const Eigen::VectorXd& accel) {
  const int m = constraints.m;
  const int k = constraints.k();
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);

  const Eigen::VectorXd bars = bar_alpha(constraints, s);
  Eigen::VectorXd alphas(k);
  Eigen::MatrixXd alpha_dq(k, constraints.n);
  Eigen::MatrixXd alpha_dv(k, m);
  for (int nu = 0; nu < k; ++nu) {
    alphas[nu] = constraints.alpha[nu](q, v, s.t);
    alpha_dq.row(nu) = diff::grad_q(constraints.alpha[nu], q, v, s.t).transpose();
    alpha_dv.row(nu) = diff::grad_v(constraints.alpha[nu], q, v, s.t).transpose();
  }

  Eigen::VectorXd out(k);
  for (int nu = 0; nu < k; ++nu) {
    const ScalarField bar = make_bar_alpha_field(constraints.alpha[nu]);
    const Eigen::VectorXd bar_dq = diff::grad_q(bar, q, v, s.t);
    const Eigen::VectorXd bar_dv = diff::grad_v(bar, q, v, s.t);
    const double bar_dt = diff::partial_t(bar, q, v, s.t);

    double r = bar_dt;
    for (int i = 0; i < m; ++i) {
      r += s.v[i] * (bar_dq[i] - alpha_dq(nu, i));
      r += accel[i] * (bar_dv[i] - alpha_dv(nu, i));
    }
    for (int mu = 0; mu < k; ++mu)
      r += alphas[mu] * bar_dq[m + mu] - bars[mu] * alpha_dq(nu, m + mu);
    out[nu] = r;
  }
  return out;
}

Eigen::VectorXd bar_b_total_derivative_path(const ConstraintSet& constraints,
                                            const KinematicState& s,
                                            const Eigen::VectorXd& accel) {
  const int k = constraints.k();
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  const Eigen::VectorXd bars = bar_alpha(constraints, s);
  Eigen::VectorXd alphas(k);
  for (int nu = 0; nu < k; ++nu) alphas[nu] = constraints.alpha[nu](q, v, s.t);

  std::span<const ScalarField> alpha_fields{constraints.alpha.data(),
                                            constraints.alpha.size()};
  std::span<const double> a{accel.data(), size_t(accel.size())};

  Eigen::VectorXd out(k);
  for (int nu = 0; nu < k; ++nu) {
    const ScalarField gap =
        field_difference(make_bar_alpha_field(constraints.alpha[nu]), constraints.alpha[nu]);
    double r = diff::total_derivative(gap, alpha_fields, s, a);
    const Eigen::VectorXd alpha_dq = diff::grad_q(constraints.alpha[nu], q, v, s.t);
    for (int mu = 0; mu < k; ++mu)
      r -= alpha_dq[constraints.m + mu] * (bars[mu] - alphas[mu]);
    r += diff::partial_t(constraints.alpha[nu], q, v, s.t);
    out[nu] = r;
  }
  return out;
}

ScalarField energy_field(const SystemSpec& spec) {
  return make_energy_field(dynamics::restricted_kinetic_field(spec), spec.energy.potential);
}

double energy_value(const SystemSpec& spec, const KinematicState& s) {
  spec.require_admissible(s);
  return energy_field(spec)(span_of(s.q), span_of(s.v), s.t);
}

BalanceReport balance_residual(const SystemSpec& spec, const KinematicState& s,
                               const Eigen::VectorXd& accel) {
  spec.require_admissible(s);
  const int m = spec.dims.m;
  const int k = spec.dims.k;
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  std::span<const ScalarField> alpha_fields{spec.constraints.alpha.data(),
                                            spec.constraints.alpha.size()};
  std::span<const double> a{accel.data(), size_t(accel.size())};

  BalanceReport report;
  report.potential_forces = spec.energy.has_potential();

  const ScalarField efield = energy_field(spec);
  report.energy = efield(q, v, s.t);
  report.dEdt_direct = diff::total_derivative(efield, alpha_fields, s, a);

  const ScalarField tstar = dynamics::restricted_kinetic_field(spec);
  Eigen::VectorXd lstar_dq = diff::grad_q(tstar, q, v, s.t);
  double lstar_dt = diff::partial_t(tstar, q, v, s.t);
  if (spec.energy.has_potential()) {
    lstar_dq += diff::grad_q(spec.energy.potential, q, {}, s.t);
    lstar_dt += diff::partial_t(spec.energy.potential, q, {}, s.t);
  }

  const Eigen::VectorXd bars = bar_alpha(spec.constraints, s);
  const Eigen::VectorXd alphas = dynamics::alpha_values(spec.constraints, s);
  const Eigen::VectorXd p = dependent_momenta(spec, s);
  const Eigen::VectorXd bbar = bar_b(spec.constraints, s, accel);

  report.term_alpha_gap = 0.0;
  for (int nu = 0; nu < k; ++nu)
    report.term_alpha_gap += (bars[nu] - alphas[nu]) * lstar_dq[m + nu];
  report.term_bbar = bbar.dot(p);
  report.term_dLdt = -lstar_dt;

  // reduced-force power; folds into the potential terms when U exists
  {
    const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
    Eigen::MatrixXd A(k, m);
    for (int nu = 0; nu < k; ++nu)
      A.row(nu) = diff::grad_v(spec.constraints.alpha[nu], q, v, s.t).transpose();
    double power = 0.0;
    for (int i = 0; i < m; ++i) {
      double fi = F[i];
      for (int nu = 0; nu < k; ++nu) fi += A(nu, i) * F[m + nu];
      power += s.v[i] * fi;
    }
    report.raw_power = power;
  }

  report.dEdt_balance = report.term_alpha_gap + report.term_bbar + report.term_dLdt;
  if (!report.potential_forces) report.dEdt_balance += report.raw_power;
  report.residual = report.dEdt_direct - report.dEdt_balance;

  // structure-specific form; the Chaplygin specialization additionally
  // needs the Lagrangian free of the dependent coordinates, otherwise the
  // (bar_alpha - alpha) coupling survives and only the general form holds
  const auto& st = spec.constraints.structure;
  const CaplyginClass cap = spec.caplygin_hint.value_or(CaplyginClass::none);
  const double dep_coupling =
      k > 0 ? lstar_dq.tail(k).cwiseAbs().maxCoeff() : 0.0;
  if (st.tag == StructureTag::linear)
    report.applied_form = BalanceForm::linear;
  else if (st.tag == StructureTag::affine)
    report.applied_form = BalanceForm::affine;
  else if (st.homogeneous_degree1())
    report.applied_form = BalanceForm::homogeneous;
  else if (cap != CaplyginClass::none && dep_coupling <= 1e-12)
    report.applied_form = BalanceForm::caplygin;
  else
    report.applied_form = BalanceForm::general;

  double rhs = 0.0;
  switch (report.applied_form) {
    case BalanceForm::general:
      rhs = report.dEdt_balance;
      break;
    case BalanceForm::homogeneous: {
      rhs = -lstar_dt;
      for (int nu = 0; nu < k; ++nu)
        rhs += p[nu] * diff::partial_t(spec.constraints.alpha[nu], q, v, s.t);
      break;
    }
    case BalanceForm::linear: {
      rhs = -lstar_dt;
      for (int nu = 0; nu < k; ++nu) {
        const auto blocks = diff::second_mixed(spec.constraints.alpha[nu], q, v, s.t);
        rhs += p[nu] * s.v.dot(blocks.vt);  // da_{nu,i}/dt = d2 alpha/dv_i dt
      }
      break;
    }
    case BalanceForm::affine: {
      rhs = -lstar_dt;
      const Eigen::VectorXd c = affine_offsets(spec, s);
      for (int nu = 0; nu < k; ++nu) {
        rhs -= c[nu] * lstar_dq[m + nu];
        const Eigen::VectorXd alpha_dq =
            diff::grad_q(spec.constraints.alpha[nu], q, v, s.t);
        const auto blocks = diff::second_mixed(spec.constraints.alpha[nu], q, v, s.t);
        double bb = s.v.dot(blocks.vt);
        for (int mu = 0; mu < k; ++mu) bb += c[mu] * alpha_dq[m + mu];
        rhs += p[nu] * bb;
      }
      break;
    }
    case BalanceForm::caplygin: {
      rhs = -lstar_dt;
      for (int nu = 0; nu < k; ++nu) {
        const ScalarField gap = field_difference(make_bar_alpha_field(spec.constraints.alpha[nu]),
                                                 spec.constraints.alpha[nu]);
        double term = diff::total_derivative(gap, alpha_fields, s, a);
        term += diff::partial_t(spec.constraints.alpha[nu], q, v, s.t);
        rhs += p[nu] * term;
      }
      break;
    }
  }
  if (!report.potential_forces && report.applied_form != BalanceForm::general)
    rhs += report.raw_power;
  report.applied_rhs = rhs;
  report.applied_residual = report.dEdt_direct - rhs;
  return report;
}

double jacobi_integral(const SystemSpec& spec, const KinematicState& s) {
  spec.require_admissible(s);
  const int n = spec.dims.n;
  const int m = spec.dims.m;
  const int k = spec.dims.k;

  if (spec.constraints.structure.tag != StructureTag::linear)
    throw SpecError("jacobi_integral: constraints are not tagged linear");
  if (!is_stationary(spec, s))
    throw SpecError("jacobi_integral: system is not stationary at this state");

  // quadratic kinetic data from exact second derivatives of T
  const Eigen::VectorXd w = dynamics::full_velocity(spec, s);
  const auto q = span_of(s.q);
  const auto blocks = diff::second_mixed(spec.energy.kinetic, q, span_of(w), s.t);
  const Eigen::MatrixXd& g = blocks.vv;  // n×n
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const double c = spec.energy.kinetic(q, span_of(zero), s.t);

  Eigen::MatrixXd acoef(k, m);
  for (int nu = 0; nu < k; ++nu)
    acoef.row(nu) =
        diff::grad_v(spec.constraints.alpha[nu], q, span_of(s.v), s.t).transpose();

  double integral = 0.0;
  for (int r = 0; r < m; ++r)
    for (int sdx = 0; sdx < m; ++sdx) {
      double coeff = 0.5 * g(r, sdx);
      for (int nu = 0; nu < k; ++nu) {
        for (int mu = 0; mu < k; ++mu)
          coeff += 0.5 * g(m + nu, m + mu) * acoef(nu, r) * acoef(mu, sdx);
        coeff += g(r, m + nu) * acoef(nu, sdx);
      }
      integral += coeff * s.v[r] * s.v[sdx];
    }
  integral -= c;
  if (spec.energy.has_potential()) integral -= spec.energy.potential(q, {}, s.t);
  return integral;
}

std::vector<FirstIntegral> detect_first_integrals(const SystemSpec& spec) {
  std::vector<FirstIntegral> out;
  const auto samples = draw_samples(spec, 12, 424242u);
  const auto structure = classify_constraints(spec.constraints, samples);

  const bool potential_route =
      spec.energy.has_potential() && !spec.energy.has_applied();
  if (!potential_route) return out;

  bool all_stationary = true;
  for (const auto& s : samples) all_stationary &= is_stationary(spec, s);
  if (!all_stationary) return out;

  auto shared = std::make_shared<SystemSpec>(spec);

  if (structure.tag == StructureTag::linear) {
    out.push_back({"jacobi-integral",
                   "linear stationary constraints with stationary Lagrangian",
                   [shared](const KinematicState& s) { return jacobi_integral(*shared, s); }});
    return out;
  }
  if (structure.homogeneous_degree1()) {
    out.push_back({"generalized-energy",
                   "degree-1 homogeneous stationary constraints",
                   [shared](const KinematicState& s) { return energy_value(*shared, s); }});
    return out;
  }
  if (structure.tag == StructureTag::affine) {
    // the affine energy survives when the Lagrangian ignores the dependent
    // coordinates (so the offset term and bar_B vanish)
    const ScalarField tstar = dynamics::restricted_kinetic_field(spec);
    double worst = 0.0;
    for (const auto& s : samples) {
      const auto q = span_of(s.q);
      const auto v = span_of(s.v);
      Eigen::VectorXd lstar_dq = diff::grad_q(tstar, q, v, s.t);
      lstar_dq += diff::grad_q(spec.energy.potential, q, {}, s.t);
      for (int nu = 0; nu < spec.dims.k; ++nu) {
        worst = std::max(worst, std::abs(lstar_dq[spec.dims.m + nu]));
        const Eigen::VectorXd alpha_dq =
            diff::grad_q(spec.constraints.alpha[nu], q, v, s.t);
        for (int mu = 0; mu < spec.dims.k; ++mu)
          worst = std::max(worst, std::abs(alpha_dq[spec.dims.m + mu]));
      }
    }
    if (worst <= 1e-10) {
      out.push_back({"affine-generalized-energy",
                     "stationary affine constraints with Lagrangian free of the "
                     "dependent coordinates",
                     [shared](const KinematicState& s) { return energy_value(*shared, s); }});
    }
  }
  return out;
}

}  // namespace voronec::energy
