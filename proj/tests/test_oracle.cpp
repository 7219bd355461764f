#include <doctest.h>

#include "voronec/catalog.hpp"
#include "voronec/diff.hpp"
#include "voronec/dynamics.hpp"
#include "voronec/errors.hpp"
#include "voronec/oracle.hpp"

using namespace voronec;

namespace {

KinematicState make_state(std::initializer_list<double> q, std::initializer_list<double> v,
                          double t = 0.0) {
  KinematicState s;
  s.q = Eigen::Map<const Eigen::VectorXd>(std::data(q), q.size());
  s.v = Eigen::Map<const Eigen::VectorXd>(std::data(v), v.size());
  s.t = t;
  return s;
}

}  // namespace

TEST_CASE("unforced admissible motion carries no reaction") {
  const auto spec = systems::build("perpendicular-velocities");
  const auto s = make_state({0.1, 0.2, -0.3, 0.4}, {1.0, 0.8, -0.5});
  const Eigen::VectorXd F = Eigen::VectorXd::Zero(4);
  const auto sol = oracle::multiplier_accel(spec, s, F);
  CHECK(sol.a_full.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sol.lambda.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sol.reaction.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(oracle::reaction_power_audit(spec, s, sol) <= 1e-14);
}

TEST_CASE("nonholonomic pendulum with gravity: frozen multiplier solution") {
  const auto spec = systems::build("nonholonomic-pendulum", {{"gy", 2.0}});
  const auto s = make_state({1, 2, 1, 1}, {1, 1, 1});
  const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
  const auto sol = oracle::multiplier_accel(spec, s, F);
  Eigen::Vector4d expect(5.0 / 7.0, -19.0 / 7.0, -4.0 / 7.0, -5.0 / 7.0);
  CHECK((sol.a_full - expect).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(sol.lambda[0] == doctest::Approx(-5.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("no constraints: plain Lagrange accelerations, empty multipliers") {
  // free particle in one dimension with a spring potential
  SystemSpec spec;
  spec.dims = ChartDims(1, 1);
  EmbeddingModel emb;
  emb.n = 1;
  emb.point_count = 1;
  emb.point_dim = 1;
  emb.masses = Eigen::VectorXd::Constant(1, 2.0);
  emb.position = VectorField(1, []<class S>(std::span<const S> q, S, std::span<S> out) {
    out[0] = q[0];
  });
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential = ScalarField([]<class S>(std::span<const S> q, std::span<const S>, S) {
    return -0.5 * q[0] * q[0];
  });
  spec.constraints.n = 1;
  spec.constraints.m = 1;
  spec.guard = [](const KinematicState&) { return true; };
  spec.label = "free-1d";
  const auto s = make_state({0.8}, {0.1});
  const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
  const auto sol = oracle::multiplier_accel(spec, s, F);
  CHECK(sol.lambda.size() == 0);
  CHECK(sol.a_full[0] == doctest::Approx(-0.8 / 2.0).epsilon(1e-14));
}

TEST_CASE("oracle agrees with both reduced paths across the catalog") {
  unsigned seed = 700u;
  for (const auto& entry : systems::catalog()) {
    const auto spec = systems::build(entry.id);
    const auto samples = draw_samples(spec, 15, seed++);
    double worst = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
      const auto sol = oracle::multiplier_accel(spec, s, F);
      const Eigen::VectorXd an = dynamics::accel_newtonian(spec, s, F);
      const Eigen::VectorXd al = dynamics::accel_lagrangian(spec, s, F);
      const double scale = std::max(1.0, an.norm());
      worst = std::max(worst, (sol.a_full.head(spec.dims.m) - an).norm() / scale);
      worst = std::max(worst, (sol.a_full.head(spec.dims.m) - al).norm() / scale);
    }
    CHECK_MESSAGE(worst <= 1e-8, entry.id);
  }
}

TEST_CASE("dependent accelerations track the constraint derivative") {
  unsigned seed = 800u;
  for (const auto& entry : systems::catalog()) {
    const auto spec = systems::build(entry.id);
    const auto samples = draw_samples(spec, 10, seed++);
    double worst = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
      const auto sol = oracle::multiplier_accel(spec, s, F);
      const Eigen::VectorXd adep =
          dynamics::dependent_accel(spec, s, sol.a_full.head(spec.dims.m));
      worst = std::max(worst, (sol.a_full.tail(spec.dims.k) - adep).cwiseAbs().maxCoeff() /
                                  std::max(1.0, sol.a_full.cwiseAbs().maxCoeff()));
    }
    CHECK_MESSAGE(worst <= 1e-10, entry.id);
  }
}

TEST_CASE("reaction annihilates the admissible distribution") {
  unsigned seed = 900u;
  for (const auto& entry : systems::catalog()) {
    const auto spec = systems::build(entry.id, {});
    const auto samples = draw_samples(spec, 10, seed++);
    double worst = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
      const auto sol = oracle::multiplier_accel(spec, s, F);
      const double audit = oracle::reaction_power_audit(spec, s, sol);
      worst = std::max(worst, audit / std::max(1.0, sol.reaction.norm()));
    }
    CHECK_MESSAGE(worst <= 1e-10, entry.id);
  }
}

TEST_CASE("perturbed multipliers are caught by the audit (negative control)") {
  const auto spec = systems::build("nonholonomic-pendulum", {{"gy", 2.0}});
  const auto s = make_state({1, 2, 1, 1}, {1, 1, 1});
  const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
  auto sol = oracle::multiplier_accel(spec, s, F);
  // corrupt the reaction so it no longer lies in the span of dPhi/dqdot
  sol.reaction[0] += 0.1;
  CHECK(oracle::reaction_power_audit(spec, s, sol) > 1e-3);
}

TEST_CASE("oracle requires an embedding") {
  SystemSpec spec;
  spec.dims = ChartDims(2, 1);
  spec.energy.kinetic = ScalarField([]<class S>(std::span<const S>, std::span<const S> w, S) {
    return 0.5 * (w[0] * w[0] + w[1] * w[1]);
  });
  spec.constraints.n = 2;
  spec.constraints.m = 1;
  spec.constraints.alpha.emplace_back(
      []<class S>(std::span<const S>, std::span<const S> v, S) { return 2.0 * v[0]; });
  spec.guard = [](const KinematicState&) { return true; };
  const auto s = make_state({0.0, 0.0}, {1.0});
  CHECK_THROWS_AS((void)oracle::multiplier_accel(spec, s, Eigen::Vector2d::Zero()), SpecError);
}
