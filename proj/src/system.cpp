#include "voronec/system.hpp"

#include <cmath>
#include <vector>

#include "voronec/diff.hpp"
#include "voronec/dynamics.hpp"
#include "voronec/errors.hpp"

namespace voronec {

namespace {

std::span<const double> span_of(const Eigen::VectorXd& x) {
  return {x.data(), size_t(x.size())};
}

double rel(double residual, double scale) { return std::abs(residual) / std::max(1.0, std::abs(scale)); }

}  // namespace

void SystemSpec::require_admissible(const KinematicState& s) const {
  if (s.q.size() != dims.n || s.v.size() != dims.m)
    throw SpecError("state dimension does not match the chart");
  if (!s.finite()) throw GuardViolation("state has non-finite entries");
  if (guard && !guard(s))
    throw GuardViolation("state lies on the declared singular set of '" + label + "'");
}

std::vector<KinematicState> draw_samples(const SystemSpec& spec, int count, unsigned seed) {
  if (!spec.sampler) throw SpecError("system '" + spec.label + "' declares no state sampler");
  std::mt19937 rng(seed);
  std::vector<KinematicState> out;
  out.reserve(count);
  int attempts = 0;
  while (int(out.size()) < count) {
    if (++attempts > 1000 * count)
      throw SpecError("sampler failed to produce enough admissible states");
    KinematicState s = spec.sampler(rng);
    if (spec.admissible(s)) out.push_back(std::move(s));
  }
  return out;
}

// --- classification ---------------------------------------------------------

namespace {

/// Largest v-Hessian entry of alpha relative to its first-derivative scale.
double hessian_residual(const ScalarField& alpha, const KinematicState& s) {
  const auto blocks = diff::second_mixed(alpha, s);
  const Eigen::VectorXd gv = diff::grad_v(alpha, s);
  const double scale = std::max(1.0, gv.cwiseAbs().maxCoeff());
  return blocks.vv.cwiseAbs().maxCoeff() / scale;
}

struct OffsetProbe {
  bool evaluable = false;
  double value = 0.0;
};

OffsetProbe offset_at_zero_velocity(const ScalarField& alpha, const KinematicState& s) {
  OffsetProbe probe;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(s.v.size());
  try {
    const double c = alpha(span_of(s.q), span_of(zero), s.t);
    if (std::isfinite(c)) {
      probe.evaluable = true;
      probe.value = c;
    }
  } catch (const Error&) {
  }
  return probe;
}

struct HomogeneityProbe {
  bool consistent = false;
  int degree = 0;
  double worst = 0.0;
};

HomogeneityProbe probe_homogeneity(const ScalarField& alpha,
                                   std::span<const KinematicState> samples, double tol) {
  static const double lambdas[] = {0.5, 2.0, 3.0};
  HomogeneityProbe probe;

  // estimate the degree from the first sample with a usable value
  bool have_degree = false;
  for (const auto& s : samples) {
    double a0;
    try {
      a0 = alpha(span_of(s.q), span_of(s.v), s.t);
    } catch (const Error&) {
      return probe;
    }
    if (!std::isfinite(a0) || std::abs(a0) < 1e-8) continue;
    Eigen::VectorXd vs = 2.0 * s.v;
    double a2;
    try {
      a2 = alpha(span_of(s.q), span_of(vs), s.t);
    } catch (const Error&) {
      continue;
    }
    if (!std::isfinite(a2) || a2 * a0 <= 0.0) continue;
    const double d_est = std::log(a2 / a0) / std::log(2.0);
    const double d_round = std::round(d_est);
    if (std::abs(d_est - d_round) > 1e-6) return probe;
    probe.degree = int(d_round);
    have_degree = true;
    break;
  }
  if (!have_degree) return probe;

  for (const auto& s : samples) {
    double a0;
    try {
      a0 = alpha(span_of(s.q), span_of(s.v), s.t);
    } catch (const Error&) {
      return probe;
    }
    for (double lam : lambdas) {
      Eigen::VectorXd vs = lam * s.v;
      double al;
      try {
        al = alpha(span_of(s.q), span_of(vs), s.t);
      } catch (const Error&) {
        return probe;
      }
      if (!std::isfinite(al)) return probe;
      const double expected = std::pow(lam, probe.degree) * a0;
      const double r = rel(al - expected, std::max(std::abs(al), std::abs(a0)));
      probe.worst = std::max(probe.worst, r);
      if (r > tol) return probe;
    }
  }
  probe.consistent = true;
  return probe;
}

}  // namespace

Structure classify_constraints(const ConstraintSet& constraints,
                               std::span<const KinematicState> samples, double tol) {
  if (samples.size() < 8)
    throw SpecError("classify_constraints: need at least 8 admissible samples");

  const int k = constraints.k();
  if (k == 0) return Structure{StructureTag::linear, 0, "no constraints"};

  std::vector<StructureTag> tags(k, StructureTag::general);
  std::vector<int> degrees(k, 0);
  std::string diag;

  for (int nu = 0; nu < k; ++nu) {
    const auto& alpha = constraints.alpha[nu];

    bool v_affine = true;
    double worst_h = 0.0;
    for (const auto& s : samples) {
      double r;
      try {
        r = hessian_residual(alpha, s);
      } catch (const Error&) {
        v_affine = false;
        break;
      }
      worst_h = std::max(worst_h, r);
      if (r > tol) {
        v_affine = false;
        break;
      }
    }

    if (v_affine) {
      bool offsets_ok = true;
      bool any_nonzero = false;
      for (const auto& s : samples) {
        const auto probe = offset_at_zero_velocity(alpha, s);
        if (!probe.evaluable) {
          offsets_ok = false;
          break;
        }
        if (std::abs(probe.value) > tol) any_nonzero = true;
      }
      if (offsets_ok) {
        tags[nu] = any_nonzero ? StructureTag::affine : StructureTag::linear;
        if (tags[nu] == StructureTag::linear) degrees[nu] = 1;
        continue;
      }
    }

    const auto probe = probe_homogeneity(alpha, samples, tol);
    if (probe.consistent) {
      tags[nu] = StructureTag::homogeneous;
      degrees[nu] = probe.degree;
    } else {
      tags[nu] = StructureTag::general;
      diag = "constraint " + std::to_string(nu + 1) +
             ": inconsistent scaling behaviour across samples";
    }
  }

  // meet of the per-constraint tags
  bool all_linear = true, all_lin_or_affine = true, any_affine = false;
  for (int nu = 0; nu < k; ++nu) {
    all_linear &= tags[nu] == StructureTag::linear;
    all_lin_or_affine &=
        tags[nu] == StructureTag::linear || tags[nu] == StructureTag::affine;
    any_affine |= tags[nu] == StructureTag::affine;
  }
  if (all_linear) return Structure{StructureTag::linear, 1, ""};
  if (all_lin_or_affine && any_affine) return Structure{StructureTag::affine, 0, ""};

  bool all_hom = true;
  int degree = 0;
  for (int nu = 0; nu < k; ++nu) {
    const bool hom = tags[nu] == StructureTag::homogeneous || tags[nu] == StructureTag::linear;
    all_hom &= hom;
    if (hom) {
      const int d = tags[nu] == StructureTag::linear ? 1 : degrees[nu];
      if (nu == 0) degree = d;
      all_hom &= (nu == 0 || d == degree);
    }
  }
  if (all_hom) return Structure{StructureTag::homogeneous, degree, ""};
  return Structure{StructureTag::general, 0, diag};
}

// --- Chaplygin compatibility -------------------------------------------------

namespace {

/// Whether the listed quantities change when the dependent coordinates move.
bool dependent_coords_matter(const SystemSpec& spec, const KinematicState& s,
                             std::mt19937& rng, double tol) {
  const int m = spec.dims.m;
  const int k = spec.dims.k;
  std::uniform_real_distribution<double> dist(0.15, 0.6);

  for (int trial = 0; trial < 4; ++trial) {
    KinematicState sp = s;
    for (int nu = 0; nu < k; ++nu) sp.q[m + nu] += dist(rng);
    try {
      const Eigen::VectorXd a0 = dynamics::alpha_values(spec.constraints, s);
      const Eigen::VectorXd a1 = dynamics::alpha_values(spec.constraints, sp);
      if ((a1 - a0).cwiseAbs().maxCoeff() > tol * std::max(1.0, a0.cwiseAbs().maxCoeff()))
        return true;

      const Eigen::VectorXd w0 = dynamics::full_velocity(spec, s);
      const double t0 = spec.energy.kinetic(span_of(s.q), span_of(w0), s.t);
      const double t1 = spec.energy.kinetic(span_of(sp.q), span_of(w0), sp.t);
      if (rel(t1 - t0, t0) > tol) return true;

      const Eigen::VectorXd f0 = dynamics::generalized_forces(spec, s);
      KinematicState sp_same_v = sp;
      const Eigen::VectorXd f1 = dynamics::generalized_forces(spec, sp_same_v);
      if ((f1 - f0).cwiseAbs().maxCoeff() > tol * std::max(1.0, f0.cwiseAbs().maxCoeff()))
        return true;
      return false;  // one clean probe suffices
    } catch (const Error&) {
      continue;  // perturbed state hit the singular set; try another offset
    }
  }
  return true;  // could not probe; be conservative
}

}  // namespace

bool is_stationary(const SystemSpec& spec, const KinematicState& s, double tol) {
  const auto q = span_of(s.q);
  const auto v = span_of(s.v);
  for (const auto& alpha : spec.constraints.alpha) {
    if (std::abs(diff::partial_t(alpha, q, v, s.t)) > tol) return false;
    const auto blocks = diff::second_mixed(alpha, q, v, s.t);
    if (blocks.vt.size() > 0 && blocks.vt.cwiseAbs().maxCoeff() > tol) return false;
  }
  const Eigen::VectorXd w = dynamics::full_velocity(spec, s);
  if (std::abs(diff::partial_t(spec.energy.kinetic, q, span_of(w), s.t)) > tol) return false;
  if (spec.energy.has_potential() &&
      std::abs(diff::partial_t(spec.energy.potential, q, {}, s.t)) > tol)
    return false;
  return true;
}

CaplyginClass caplygin_class(const SystemSpec& spec,
                             std::span<const KinematicState> samples, double tol) {
  if (spec.dims.k == 0) return CaplyginClass::none;
  std::mt19937 rng(97531u);
  for (const auto& s : samples)
    if (dependent_coords_matter(spec, s, rng, tol)) return CaplyginClass::none;

  const auto structure = classify_constraints(spec.constraints, samples, tol);
  if (structure.tag == StructureTag::linear) {
    bool all_stationary = true;
    for (const auto& s : samples) all_stationary &= is_stationary(spec, s, tol);
    if (all_stationary) return CaplyginClass::classical;
  }
  return CaplyginClass::nonlinear;
}

// --- validation --------------------------------------------------------------

ValidationReport validate(const SystemSpec& spec, std::span<const KinematicState> samples) {
  if (samples.empty()) throw SpecError("validate: need at least one sample state");
  for (const auto& s : samples) spec.require_admissible(s);

  ValidationReport report;
  auto add = [&](std::string name, bool pass, double worst, std::string detail = "") {
    report.checks.push_back({std::move(name), pass, worst, std::move(detail)});
  };

  // dimension bookkeeping
  {
    bool ok = spec.dims.n == spec.dims.m + spec.dims.k &&
              spec.constraints.k() == spec.dims.k && spec.constraints.n == spec.dims.n &&
              spec.constraints.m == spec.dims.m && bool(spec.energy.kinetic);
    if (spec.embedding) ok &= spec.embedding->n == spec.dims.n;
    add("dimensions", ok, 0.0);
  }

  if (spec.embedding) {
    bool ok = true;
    std::string detail;
    try {
      spec.embedding->check();
    } catch (const SpecError& e) {
      ok = false;
      detail = e.what();
    }
    add("embedding-masses-positive", ok, 0.0, detail);
  }

  // embedding-derived kinetic energy vs the quadratic metric form
  if (spec.embedding) {
    double worst = 0.0;
    std::mt19937 rng(777u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (const auto& s : samples) {
      const auto mc = dynamics::metric_coefficients(*spec.embedding, s.q, s.t);
      for (int rep = 0; rep < 3; ++rep) {
        Eigen::VectorXd w(spec.dims.n);
        if (rep == 0) {
          w = dynamics::full_velocity(spec, s);
        } else {
          for (int j = 0; j < spec.dims.n; ++j) w[j] = dist(rng);
        }
        const double t_direct = spec.energy.kinetic(span_of(s.q), span_of(w), s.t);
        const double t_quad = 0.5 * w.dot(mc.g * w) + mc.b.dot(w) + mc.c;
        worst = std::max(worst, rel(t_direct - t_quad, t_direct));
      }
    }
    add("kinetic-matches-metric-form", worst <= 1e-12, worst);
  }

  // potential vs explicit forces, when both routes are declared
  if (spec.energy.has_potential() && spec.energy.has_applied()) {
    double worst = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd gu = diff::grad_q(spec.energy.potential, span_of(s.q), {}, s.t);
      const Eigen::VectorXd w = dynamics::full_velocity(spec, s);
      for (int j = 0; j < spec.dims.n; ++j) {
        if (!spec.energy.applied_forces[j]) continue;
        const double fj = spec.energy.applied_forces[j](span_of(s.q), span_of(w), s.t);
        worst = std::max(worst, rel(fj - gu[j], gu[j]));
      }
    }
    add("potential-force-consistency", worst <= 1e-10, worst);
  }

  // structure tag against sampled behaviour
  {
    const auto& declared = spec.constraints.structure;
    if (declared.tag == StructureTag::linear || declared.tag == StructureTag::affine) {
      double worst = 0.0;
      bool offsets_fine = true;
      for (const auto& s : samples) {
        for (const auto& alpha : spec.constraints.alpha) {
          worst = std::max(worst, hessian_residual(alpha, s));
          const auto probe = offset_at_zero_velocity(alpha, s);
          if (!probe.evaluable) {
            offsets_fine = false;
            worst = std::max(worst, 1.0);
            continue;
          }
          if (declared.tag == StructureTag::linear)
            worst = std::max(worst, std::abs(probe.value));
        }
      }
      add("structure-tag(" + to_string(declared) + ")", worst <= 1e-9 && offsets_fine, worst);
    } else if (declared.tag == StructureTag::homogeneous) {
      double worst = 0.0;
      bool ok = true;
      for (const auto& alpha : spec.constraints.alpha) {
        const auto probe = probe_homogeneity(alpha, samples, 1e-9);
        ok &= probe.consistent && probe.degree == declared.degree;
        worst = std::max(worst, probe.worst);
      }
      add("structure-tag(" + to_string(declared) + ")", ok, worst);
    }
    // tag general: no structural claim, nothing to check
  }

  // declared linear coefficients reproduce alpha
  if (!spec.constraints.linear_coeff.empty()) {
    double worst = 0.0;
    for (const auto& s : samples) {
      for (int nu = 0; nu < spec.constraints.k(); ++nu) {
        double lin = 0.0;
        for (int j = 0; j < spec.dims.m; ++j) {
          const auto& coeff = spec.constraints.linear_coeff[nu][j];
          if (coeff) lin += coeff(span_of(s.q), {}, s.t) * s.v[j];
        }
        if (nu < int(spec.constraints.affine_offset.size()) &&
            spec.constraints.affine_offset[nu])
          lin += spec.constraints.affine_offset[nu]({}, {}, s.t);
        const double direct = spec.constraints.alpha[nu](span_of(s.q), span_of(s.v), s.t);
        worst = std::max(worst, rel(direct - lin, direct));
      }
    }
    add("declared-linear-coefficients", worst <= 1e-12, worst);
  }

  return report;
}

}  // namespace voronec
