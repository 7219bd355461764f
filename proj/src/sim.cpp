#include "voronec/sim.hpp"

#include <cmath>

#include "voronec/dynamics.hpp"
#include "voronec/errors.hpp"
#include "voronec/oracle.hpp"

namespace voronec::sim {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Resolved {
  DynamicsPath path;
  bool use_reducer = false;
  dynamics::Reducer reducer{};
};

KinematicState unpack(const SystemSpec& spec, const Eigen::VectorXd& y, double t) {
  KinematicState s;
  s.q = y.head(spec.dims.n);
  s.v = y.tail(spec.dims.m);
  s.t = t;
  return s;
}

Eigen::VectorXd accel_for(const SystemSpec& spec, const KinematicState& s,
                          const Resolved& how) {
  const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
  switch (how.path) {
    case DynamicsPath::newtonian:
      return dynamics::accel_newtonian(spec, s, F);
    case DynamicsPath::reduced:
      if (how.use_reducer) return dynamics::reduce_special(spec, s, F, how.reducer);
      return dynamics::accel_lagrangian(spec, s, F);
    case DynamicsPath::lagrangian:
    case DynamicsPath::oracle_check:
      return dynamics::accel_lagrangian(spec, s, F);
  }
  return dynamics::accel_lagrangian(spec, s, F);
}

Eigen::VectorXd rhs(const SystemSpec& spec, const Eigen::VectorXd& y, double t,
                    const Resolved& how, IntegratorStats& stats) {
  const KinematicState s = unpack(spec, y, t);
  spec.require_admissible(s);
  ++stats.rhs_evaluations;
  const Eigen::VectorXd a = accel_for(spec, s, how);
  Eigen::VectorXd dy(y.size());
  dy.head(spec.dims.n) = dynamics::full_velocity(spec, s);
  dy.tail(spec.dims.m) = a;
  if (!dy.allFinite()) throw SingularityError("non-finite derivative field");
  return dy;
}

Resolved resolve_path(const SystemSpec& spec, DynamicsPath path) {
  Resolved how{path, false, dynamics::Reducer::voronec_linear};
  if (path != DynamicsPath::reduced) return how;
  try {
    const auto samples = draw_samples(spec, 8, 1234u);
    const auto structure = classify_constraints(spec.constraints, samples);
    const auto cap = spec.caplygin_hint ? *spec.caplygin_hint
                                        : caplygin_class(spec, samples);
    if (structure.tag == StructureTag::linear) {
      how.use_reducer = true;
      how.reducer = cap == CaplyginClass::classical ? dynamics::Reducer::caplygin_classical
                                                    : dynamics::Reducer::voronec_linear;
    } else if (cap != CaplyginClass::none) {
      how.use_reducer = true;
      how.reducer = dynamics::Reducer::caplygin;
    }
  } catch (const Error&) {
    // no sampler or classification failure: general path
  }
  return how;
}

}  // namespace

std::string to_string(DynamicsPath p) {
  switch (p) {
    case DynamicsPath::newtonian: return "newtonian";
    case DynamicsPath::lagrangian: return "lagrangian";
    case DynamicsPath::reduced: return "reduced";
    case DynamicsPath::oracle_check: return "oracle-check";
  }
  return "?";
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> derivative_field(const SystemSpec& spec,
                                                             const KinematicState& s,
                                                             DynamicsPath path) {
  spec.require_admissible(s);
  const Resolved how = resolve_path(spec, path);
  const Eigen::VectorXd a = accel_for(spec, s, how);
  return {dynamics::full_velocity(spec, s), a};
}

Trajectory integrate(const SystemSpec& spec, const KinematicState& s0, double t_end,
                     const IntegrateOptions& opts) {
  if (opts.tol < 1e-13 || opts.tol > 1e-3)
    throw ConfigError("integrate: tol must lie in [1e-13, 1e-3]");
  spec.require_admissible(s0);
  if (!(t_end > s0.t)) throw ConfigError("integrate: t_end must exceed the initial time");

  const Resolved how = resolve_path(spec, opts.path);
  const double span = t_end - s0.t;
  const int dim = spec.dims.n + spec.dims.m;

  Trajectory traj;
  std::vector<energy::FirstIntegral> integrals;
  if (opts.diagnostics) {
    try {
      integrals = energy::detect_first_integrals(spec);
    } catch (const Error&) {
      // systems without a sampler still integrate; they just lose the audit
    }
    for (const auto& I : integrals) traj.integral_names.push_back(I.name);
  }

  auto record = [&](const KinematicState& s, const Eigen::VectorXd& a) {
    Sample sample;
    sample.t = s.t;
    sample.q = s.q;
    sample.v = s.v;
    sample.a = a;
    if (opts.diagnostics) {
      const auto report = energy::balance_residual(spec, s, a);
      sample.energy = report.energy;
      sample.balance_residual = report.residual;
      traj.applied_form = report.applied_form;
      sample.integrals.resize(integrals.size());
      for (size_t i = 0; i < integrals.size(); ++i) sample.integrals[i] = integrals[i].eval(s);
      if (opts.path == DynamicsPath::oracle_check) {
        const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
        const auto sol = oracle::multiplier_accel(spec, s, F);
        const double gap = (sol.a_full.head(spec.dims.m) - a).norm() /
                           std::max(1.0, a.norm());
        traj.max_oracle_gap = std::max(traj.max_oracle_gap, gap);
      }
    }
    traj.samples.push_back(std::move(sample));
  };

  Eigen::VectorXd y(dim);
  y.head(spec.dims.n) = s0.q;
  y.tail(spec.dims.m) = s0.v;
  double t = s0.t;
  double h = span * 1e-3;
  traj.stats.h_min = span;
  traj.stats.h_max = 0.0;

  Eigen::VectorXd k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  bool have_k1 = false;

  try {
    k1 = rhs(spec, y, t, how, traj.stats);
    have_k1 = true;
    record(unpack(spec, y, t), k1.tail(spec.dims.m));
  } catch (const Error& err) {
    traj.aborted = true;
    traj.abort_reason = err.what();
    return traj;
  }

  while (t < t_end) {
    if (traj.stats.accepted + traj.stats.rejected > opts.max_steps) {
      traj.aborted = true;
      traj.abort_reason = "step budget exhausted";
      return traj;
    }
    h = std::min(h, t_end - t);
    if (h < 1e-14 * span) {
      traj.aborted = true;
      traj.abort_reason = "step underflow at t = " + std::to_string(t);
      return traj;
    }

    bool stage_failed = false;
    std::string stage_error;
    double err = 0.0;
    Eigen::VectorXd ynew;
    try {
      k2 = rhs(spec, y + h * (a21 * k1), t + c2 * h, how, traj.stats);
      k3 = rhs(spec, y + h * (a31 * k1 + a32 * k2), t + c3 * h, how, traj.stats);
      k4 = rhs(spec, y + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h, how, traj.stats);
      k5 = rhs(spec, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h, how,
               traj.stats);
      k6 = rhs(spec, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h,
               how, traj.stats);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = rhs(spec, ynew, t + h, how, traj.stats);

      const Eigen::VectorXd escale = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                                          e6 * k6 + e7 * k7);
      double acc = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double sc = opts.tol + opts.tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double r = escale[i] / sc;
        acc += r * r;
      }
      err = std::sqrt(acc / dim);
      if (!std::isfinite(err)) {
        stage_failed = true;
        stage_error = "non-finite error estimate";
      }
    } catch (const Error& e) {
      stage_failed = true;
      stage_error = e.what();
    }

    if (stage_failed) {
      ++traj.stats.rejected;
      h *= 0.5;
      if (h < 1e-14 * span) {
        traj.aborted = true;
        traj.abort_reason = stage_error;
        return traj;
      }
      continue;
    }

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // first-same-as-last
      ++traj.stats.accepted;
      traj.stats.h_min = std::min(traj.stats.h_min, h);
      traj.stats.h_max = std::max(traj.stats.h_max, h);
      try {
        record(unpack(spec, y, t), k1.tail(spec.dims.m));
      } catch (const Error& e) {
        traj.aborted = true;
        traj.abort_reason = std::string("diagnostics failed: ") + e.what();
        return traj;
      }
    } else {
      ++traj.stats.rejected;
    }

    const double factor =
        err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h *= factor;
  }
  (void)have_k1;
  return traj;
}

std::vector<double> drift_report(const Trajectory& traj) {
  if (traj.samples.empty()) throw Error("drift_report: empty trajectory");
  const size_t count = traj.samples.front().integrals.size();
  std::vector<double> out(count, 0.0);
  for (size_t i = 0; i < count; ++i) {
    const double i0 = traj.samples.front().integrals[i];
    for (const auto& s : traj.samples)
      out[i] = std::max(out[i], std::abs(s.integrals[i] - i0) / std::max(1.0, std::abs(i0)));
  }
  return out;
}

std::vector<double> drift_report(const Trajectory& traj,
                                 std::span<const energy::FirstIntegral> integrals) {
  if (traj.samples.empty()) throw Error("drift_report: empty trajectory");
  std::vector<double> out(integrals.size(), 0.0);
  for (size_t i = 0; i < integrals.size(); ++i) {
    KinematicState s0{traj.samples.front().q, traj.samples.front().v,
                      traj.samples.front().t};
    const double i0 = integrals[i].eval(s0);
    for (const auto& s : traj.samples) {
      KinematicState st{s.q, s.v, s.t};
      out[i] = std::max(out[i],
                        std::abs(integrals[i].eval(st) - i0) / std::max(1.0, std::abs(i0)));
    }
  }
  return out;
}

}  // namespace voronec::sim
