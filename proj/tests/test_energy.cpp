#include <doctest.h>

#include "voronec/catalog.hpp"
#include "voronec/diff.hpp"
#include "voronec/dynamics.hpp"
#include "voronec/energy.hpp"
#include "voronec/errors.hpp"

using namespace voronec;
using energy::BalanceForm;

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

TEST_CASE("Euler sums: pendulum constraint is degree-1 homogeneous") {
  const auto spec = systems::build("nonholonomic-pendulum");
  const auto s = make_state({1, 2, 1, 1}, {1, 1, 1});
  const Eigen::VectorXd bars = energy::bar_alpha(spec.constraints, s);
  const Eigen::VectorXd alphas = dynamics::alpha_values(spec.constraints, s);
  CHECK(bars[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(bars[0] == doctest::Approx(alphas[0]).epsilon(1e-14));
}

TEST_CASE("Euler sums: constant-speed radical, positive branch") {
  const auto spec =
      systems::build("constant-speed-point", {{"C", std::sqrt(2.0)}, {"branch", 1.0}});
  const auto s = make_state({0, 0, 0}, {1.0, 0.0});
  CHECK(dynamics::alpha_values(spec.constraints, s)[0] == doctest::Approx(1.0));
  CHECK(energy::bar_alpha(spec.constraints, s)[0] == doctest::Approx(-1.0));
}

TEST_CASE("Euler sums: affine constraint drops the offset") {
  const auto spec = systems::build("affine-particle");  // c = 0.75
  const auto s = make_state({0.3, -0.2, 0.1}, {0.7, -0.4});
  const Eigen::VectorXd bars = energy::bar_alpha(spec.constraints, s);
  const Eigen::VectorXd alphas = dynamics::alpha_values(spec.constraints, s);
  CHECK(bars[0] == doctest::Approx(alphas[0] - 0.75).epsilon(1e-13));
}

TEST_CASE("degree-1 homogeneity iff Euler sum matches (sampled both ways)") {
  // forward: every homogeneous catalog system satisfies bar_alpha = alpha
  unsigned seed = 1000u;
  for (const char* id :
       {"nonholonomic-pendulum", "perpendicular-velocities", "parallel-velocities",
        "equal-speed-pair", "midpoint-knife", "orthogonal-to-join", "perp-pair-join"}) {
    const auto spec = systems::build(id);
    const auto samples = draw_samples(spec, 20, seed++);
    double worst = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd gap = energy::bar_alpha(spec.constraints, s) -
                                  dynamics::alpha_values(spec.constraints, s);
      worst = std::max(worst, gap.cwiseAbs().maxCoeff());
    }
    CHECK_MESSAGE(worst <= 1e-12, id);
  }
  // converse: where the Euler sum differs, the scaling test fails too
  const auto spec = systems::build("constant-speed-point");
  const auto samples = draw_samples(spec, 20, seed);
  for (const auto& s : samples) {
    const double gap = std::abs(energy::bar_alpha(spec.constraints, s)[0] -
                                dynamics::alpha_values(spec.constraints, s)[0]);
    CHECK(gap > 1e-6);
  }
  const auto structure = classify_constraints(spec.constraints, samples);
  CHECK(structure.tag == StructureTag::general);
}

TEST_CASE("bar_B vanishes for homogeneous stationary constraints") {
  unsigned seed = 1100u;
  for (const char* id : {"nonholonomic-pendulum", "perpendicular-velocities",
                         "parallel-velocities", "equal-speed-pair"}) {
    const auto spec = systems::build(id);
    const auto samples = draw_samples(spec, 10, seed++);
    double worst = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
      const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
      worst = std::max(worst,
                       energy::bar_b(spec.constraints, s, a).cwiseAbs().maxCoeff());
    }
    CHECK_MESSAGE(worst <= 1e-12, id);
  }
}

TEST_CASE("bar_B of the constant-speed point matches the closed form") {
  const auto spec = systems::build("constant-speed-point");  // branch -, C = 1
  const auto s = make_state({0, 0, 0}, {0.6, 0.2});
  const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
  const Eigen::VectorXd a = dynamics::accel_newtonian(spec, s, F);
  const double denom = 1.0 - 0.4;
  // branch -: +C^2 (v1 a1 + v2 a2) / (C^2 - rho^2)^{3/2}
  const double expect = (0.6 * a[0] + 0.2 * a[1]) / std::pow(denom, 1.5);
  CHECK(energy::bar_b(spec.constraints, s, a)[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("bar_B of the stationary affine particle vanishes") {
  const auto spec = systems::build("affine-particle");
  const auto s = make_state({0.2, -0.4, 0.0}, {0.5, 1.0 / 3.0});
  const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
  const Eigen::VectorXd a = dynamics::accel_newtonian(spec, s, F);
  CHECK(energy::bar_b(spec.constraints, s, a).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("both bar_B routes agree across the catalog") {
  unsigned seed = 1200u;
  for (const auto& entry : systems::catalog()) {
    const auto spec = systems::build(entry.id);
    const auto samples = draw_samples(spec, 8, seed++);
    double worst = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
      const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
      const Eigen::VectorXd b1 = energy::bar_b(spec.constraints, s, a);
      const Eigen::VectorXd b2 = energy::bar_b_total_derivative_path(spec.constraints, s, a);
      worst = std::max(worst, (b1 - b2).cwiseAbs().maxCoeff() /
                                  std::max(1.0, b1.cwiseAbs().maxCoeff()));
    }
    CHECK_MESSAGE(worst <= 1e-10, entry.id);
  }
}

TEST_CASE("energy value: pendulum golden point") {
  const auto spec = systems::build("nonholonomic-pendulum");  // gy = 0, U = 0
  const auto s = make_state({1, 2, 1, 1}, {1, 1, 1});
  CHECK(energy::energy_value(spec, s) == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("energy value: holonomic reduction is T - U") {
  // harmonic oscillator: E = 1/2 M v^2 + 1/2 k q^2
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
    return -1.5 * q[0] * q[0];  // U = -k/2 q^2 with k = 3
  });
  spec.constraints.n = 1;
  spec.constraints.m = 1;
  spec.guard = [](const KinematicState&) { return true; };
  const auto s = make_state({0.4}, {0.9});
  CHECK(energy::energy_value(spec, s) ==
        doctest::Approx(0.5 * 2.0 * 0.81 + 1.5 * 0.16).epsilon(1e-13));
}

TEST_CASE("energy value: affine particle frozen point") {
  const auto spec = systems::build("affine-particle");
  const auto s = make_state({0.2, -0.4, 0.0}, {0.5, 1.0 / 3.0});
  CHECK(energy::energy_value(spec, s) == doctest::Approx(-361.0 / 7200.0).epsilon(1e-13));
  // the closed affine form: 1/2 M v^2 + 1/2 M (w+c)(w-c) + V
  const double w = 1.0 * 0.2 * (1.0 / 3.0) + 0.5 * (-0.4) * 0.5;
  const double closed = 0.5 * (0.25 + 1.0 / 9.0) + 0.5 * (w * w - 0.75 * 0.75) +
                        0.25 * (0.04 + 0.16);
  CHECK(energy::energy_value(spec, s) == doctest::Approx(closed).epsilon(1e-13));
}

TEST_CASE("balance residual vanishes pointwise across the catalog") {
  unsigned seed = 1300u;
  for (const auto& entry : systems::catalog()) {
    const auto spec = systems::build(entry.id);
    const auto samples = draw_samples(spec, 8, seed++);
    double worst_general = 0.0, worst_applied = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
      const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
      const auto report = energy::balance_residual(spec, s, a);
      worst_general = std::max(worst_general, std::abs(report.residual));
      worst_applied = std::max(worst_applied, std::abs(report.applied_residual));
    }
    CHECK_MESSAGE(worst_general <= 1e-10, entry.id);
    CHECK_MESSAGE(worst_applied <= 1e-10, entry.id);
  }
}

TEST_CASE("applied balance form follows the structure tag") {
  auto form_of = [](const char* id) {
    const auto spec = systems::build(id);
    const auto s = systems::default_state(id);
    const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
    const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
    return energy::balance_residual(spec, s, a).applied_form;
  };
  CHECK(form_of("perpendicular-velocities") == BalanceForm::homogeneous);
  CHECK(form_of("nonholonomic-pendulum") == BalanceForm::homogeneous);
  CHECK(form_of("orthogonal-to-join") == BalanceForm::linear);
  CHECK(form_of("midpoint-knife") == BalanceForm::linear);
  CHECK(form_of("affine-particle") == BalanceForm::affine);

  // gravity on the dependent coordinate couples L* to it, so only the
  // general identity applies; dropping the force restores the Chaplygin form
  {
    const auto grav = systems::build("constant-speed-point");
    const auto free = systems::build("constant-speed-point", {{"gz", 0.0}});
    const auto s = systems::default_state("constant-speed-point");
    const Eigen::VectorXd Fg = dynamics::generalized_forces(grav, s);
    const Eigen::VectorXd ag = dynamics::accel_lagrangian(grav, s, Fg);
    CHECK(energy::balance_residual(grav, s, ag).applied_form == BalanceForm::general);
    const Eigen::VectorXd Ff = dynamics::generalized_forces(free, s);
    const Eigen::VectorXd af = dynamics::accel_lagrangian(free, s, Ff);
    CHECK(energy::balance_residual(free, s, af).applied_form == BalanceForm::caplygin);
  }
}

TEST_CASE("general and specialized balance coincide on the linear system") {
  const auto spec = systems::build("orthogonal-to-join");
  const auto samples = draw_samples(spec, 10, 77u);
  for (const auto& s : samples) {
    const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
    const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
    const auto report = energy::balance_residual(spec, s, a);
    CHECK(std::abs(report.dEdt_balance - report.applied_rhs) <= 1e-12);
  }
}

TEST_CASE("homogeneous stationary systems: balance terms vanish identically") {
  unsigned seed = 1400u;
  for (const char* id : {"nonholonomic-pendulum", "perpendicular-velocities",
                         "parallel-velocities", "equal-speed-pair"}) {
    const auto spec = systems::build(id);
    const auto samples = draw_samples(spec, 10, seed++);
    for (const auto& s : samples) {
      const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
      const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
      const auto report = energy::balance_residual(spec, s, a);
      CHECK(std::abs(report.term_alpha_gap) <= 1e-12);
      CHECK(std::abs(report.term_bbar) <= 1e-12);
    }
  }
}

TEST_CASE("rheonomic bookkeeping: time-dependent potential feeds -dL*/dt") {
  const auto spec = systems::build("orthogonal-to-join", {{"rheo_eps", 0.5}});
  const auto samples = draw_samples(spec, 8, 1500u);
  for (auto s : samples) {
    s.t = 0.37;  // away from extrema of sin
    const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
    const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
    const auto report = energy::balance_residual(spec, s, a);
    CHECK(std::abs(report.term_dLdt) > 1e-3);  // genuinely rheonomic
    CHECK(std::abs(report.dEdt_direct - report.term_dLdt) <= 1e-10);
    CHECK(std::abs(report.applied_residual) <= 1e-10);
  }
}

TEST_CASE("non-potential forcing disables claims but keeps the audit") {
  auto spec = systems::build("perpendicular-velocities");
  spec.energy.potential = ScalarField();  // drop the potential route
  spec.energy.applied_forces.resize(4);
  spec.energy.applied_forces[0] =
      ScalarField([]<class S>(std::span<const S>, std::span<const S> w, S) {
        return -0.3 * w[0];  // drag on x1: not a potential force
      });
  const auto s = make_state({0.1, 0.2, 0.3, 0.4}, {1.0, 0.9, 0.8});
  const Eigen::VectorXd F = dynamics::generalized_forces(spec, s);
  const Eigen::VectorXd a = dynamics::accel_lagrangian(spec, s, F);
  const auto report = energy::balance_residual(spec, s, a);
  CHECK(!report.potential_forces);
  CHECK(std::abs(report.raw_power) > 1e-3);
  CHECK(std::abs(report.residual) <= 1e-10);
  CHECK(energy::detect_first_integrals(spec).empty());
}

TEST_CASE("jacobi integral: knife golden value") {
  const auto spec = systems::build("midpoint-knife", {{"g", 0.0}});
  const auto s = make_state({0.0, 0.3, -0.1}, {1.0, 1.0});
  CHECK(energy::jacobi_integral(spec, s) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(energy::energy_value(spec, s) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("jacobi integral matches the closed forms of the linear pair systems") {
  unsigned seed = 1600u;
  for (const char* id : {"orthogonal-to-join", "perp-pair-join"}) {
    const auto spec = systems::build(id);
    const auto expected = systems::expected_integrals(id);
    REQUIRE(expected.size() == 1);
    const auto samples = draw_samples(spec, 10, seed++);
    for (const auto& s : samples) {
      CHECK(energy::jacobi_integral(spec, s) ==
            doctest::Approx(expected[0].eval(s)).epsilon(1e-12));
      // and the Jacobi integral is exactly the generalized energy here
      CHECK(energy::jacobi_integral(spec, s) ==
            doctest::Approx(energy::energy_value(spec, s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("jacobi integral refuses non-linear or rheonomic systems") {
  const auto hom = systems::build("perpendicular-velocities");
  CHECK_THROWS_AS((void)energy::jacobi_integral(hom, systems::default_state("perpendicular-velocities")),
                  SpecError);
  const auto rheo = systems::build("orthogonal-to-join", {{"rheo_eps", 0.4}});
  auto s = systems::default_state("orthogonal-to-join");
  CHECK_THROWS_AS((void)energy::jacobi_integral(rheo, s), SpecError);
}

TEST_CASE("first-integral detection across the catalog") {
  struct Case {
    const char* id;
    size_t count;
    const char* name;
  } cases[] = {
      {"nonholonomic-pendulum", 1, "generalized-energy"},
      {"perpendicular-velocities", 1, "generalized-energy"},
      {"parallel-velocities", 1, "generalized-energy"},
      {"equal-speed-pair", 1, "generalized-energy"},
      {"midpoint-knife", 1, "jacobi-integral"},
      {"orthogonal-to-join", 1, "jacobi-integral"},
      {"perp-pair-join", 1, "jacobi-integral"},
      {"affine-particle", 1, "affine-generalized-energy"},
      {"constant-speed-point", 0, ""},
  };
  for (const auto& c : cases) {
    const auto spec = systems::build(c.id);
    const auto claims = energy::detect_first_integrals(spec);
    CHECK_MESSAGE(claims.size() == c.count, c.id);
    if (c.count > 0 && !claims.empty()) CHECK(claims[0].name == c.name);
  }
}

TEST_CASE("negative controls make no claim") {
  // potential reaching the dependent coordinate of the affine particle
  const auto affine = systems::build("affine-particle", {{"g3", 0.8}});
  CHECK(energy::detect_first_integrals(affine).empty());
  // rheonomic potential on the linear system
  const auto rheo = systems::build("orthogonal-to-join", {{"rheo_eps", 0.4}});
  CHECK(energy::detect_first_integrals(rheo).empty());
}

TEST_CASE("detected claims equal the catalog's closed forms up to a constant") {
  unsigned seed = 1700u;
  for (const auto& entry : systems::catalog()) {
    const auto spec = systems::build(entry.id);
    const auto detected = energy::detect_first_integrals(spec);
    const auto expected = systems::expected_integrals(entry.id);
    REQUIRE_MESSAGE(detected.size() == expected.size(), entry.id);
    if (detected.empty()) continue;
    const auto samples = draw_samples(spec, 20, seed++);
    const double shift = detected[0].eval(samples[0]) - expected[0].eval(samples[0]);
    double worst = 0.0;
    for (const auto& s : samples)
      worst = std::max(worst, std::abs(detected[0].eval(s) - expected[0].eval(s) - shift));
    CHECK_MESSAGE(worst <= 1e-10, entry.id);
  }
}
