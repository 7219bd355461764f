#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "voronec/constraints.hpp"
#include "voronec/models.hpp"
#include "voronec/state.hpp"

namespace voronec {

/// Chaplygin compatibility of a whole system: constraints, kinetic energy
/// and forces free of the coordinates conjugate to dependent velocities.
/// classical additionally requires linear stationary coefficients in the
/// independent coordinates only.
enum class CaplyginClass { none, nonlinear, classical };

/// Complete description of a constrained mechanical system. Immutable after
/// construction; evaluation is pure, so specs can be shared across workers.
struct SystemSpec {
  ChartDims dims;
  std::optional<EmbeddingModel> embedding;
  EnergyModel energy;
  ConstraintSet constraints;
  /// Admissibility predicate: true away from the declared singular set.
  std::function<bool(const KinematicState&)> guard;
  /// Draws admissible states; used by validation, classification and the
  /// first-integral detector.
  std::function<KinematicState(std::mt19937&)> sampler;
  std::string label;
  /// Optional author-provided Chaplygin compatibility, so per-state
  /// evaluations need not re-run the sampling check.
  std::optional<CaplyginClass> caplygin_hint;

  bool admissible(const KinematicState& s) const {
    return s.finite() && s.q.size() == dims.n && s.v.size() == dims.m &&
           (!guard || guard(s));
  }
  void require_admissible(const KinematicState& s) const;
};

std::vector<KinematicState> draw_samples(const SystemSpec& spec, int count, unsigned seed);

struct ValidationCheck {
  std::string name;
  bool pass = true;
  double worst_residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Runs every structural invariant of the spec against the sample states:
/// dimensions, guard admissibility, mass positivity, embedding/energy
/// agreement, potential-force consistency, structure-tag consistency.
ValidationReport validate(const SystemSpec& spec, std::span<const KinematicState> samples);

/// Sampling-based structural classification of the constraint functions.
/// Returns the finest tag supported by all samples within relative
/// tolerance tol: linear < homogeneous(1) < general; affine when
/// alpha(q, 0, t) is a nonzero velocity-free offset.
Structure classify_constraints(const ConstraintSet& constraints,
                               std::span<const KinematicState> samples,
                               double tol = 1e-9);

/// Sampling-based detection of Chaplygin compatibility.
CaplyginClass caplygin_class(const SystemSpec& spec,
                             std::span<const KinematicState> samples,
                             double tol = 1e-9);

/// No explicit time dependence in constraints, kinetic energy or potential
/// at this state (checked through exact dual derivatives).
bool is_stationary(const SystemSpec& spec, const KinematicState& s, double tol = 1e-10);

}  // namespace voronec
