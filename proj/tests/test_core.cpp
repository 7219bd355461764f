#include <doctest.h>

#include "voronec/catalog.hpp"
#include "voronec/dynamics.hpp"
#include "voronec/errors.hpp"
#include "voronec/system.hpp"

using namespace voronec;

TEST_CASE("chart dimension invariants") {
  const ChartDims dims(4, 3);
  CHECK(dims.k == 1);
  CHECK(dims.n == dims.m + dims.k);
  CHECK_THROWS_AS(ChartDims(4, 0), SpecError);   // m >= 1
  CHECK_THROWS_AS(ChartDims(4, 5), SpecError);   // k >= 0
  CHECK_THROWS_AS(ChartDims(0, 0), SpecError);   // k < n fails for n = 0
}

TEST_CASE("construction with k = n is impossible by arithmetic") {
  // k = n would need m = 0, which the chart rejects
  CHECK_THROWS_AS(ChartDims(3, 0), SpecError);
}

TEST_CASE("validation of a consistently built catalog system") {
  const auto spec = systems::build("perpendicular-velocities");
  const auto samples = draw_samples(spec, 10, 5u);
  const auto report = validate(spec, samples);
  CHECK(report.ok());
  // tag is homogeneous; no linearity check should be present
  for (const auto& c : report.checks) CHECK(c.name.find("linear)") == std::string::npos);
}

TEST_CASE("validation flags a spec tagged linear with a nonlinear constraint") {
  auto spec = systems::build("perpendicular-velocities");
  spec.constraints.structure = Structure{StructureTag::linear, 1, ""};
  const auto samples = draw_samples(spec, 10, 6u);
  const auto report = validate(spec, samples);
  CHECK(!report.ok());
  bool found = false;
  for (const auto& c : report.checks)
    if (c.name.rfind("structure-tag", 0) == 0) {
      found = true;
      CHECK(!c.pass);
      CHECK(c.worst_residual > 0.0);
    }
  CHECK(found);
}

TEST_CASE("validation rejects inadmissible samples") {
  const auto spec = systems::build("perpendicular-velocities");
  KinematicState bad;
  bad.q = Eigen::Vector4d::Zero();
  bad.v = Eigen::Vector3d(1.0, 0.0, 1.0);  // v2 = 0 on the singular set
  std::vector<KinematicState> samples{bad};
  CHECK_THROWS_AS(validate(spec, samples), GuardViolation);
}

TEST_CASE("negative masses are rejected") {
  CHECK_THROWS_AS(systems::build("perpendicular-velocities", {{"M1", -1.0}}), SpecError);
  EmbeddingModel emb;
  emb.n = 1;
  emb.point_count = 1;
  emb.point_dim = 2;
  emb.masses = Eigen::VectorXd::Constant(1, -2.0);
  emb.position = VectorField(2, []<class S>(std::span<const S> q, S, std::span<S> out) {
    out[0] = q[0];
    out[1] = S(0.0);
  });
  CHECK_THROWS_AS(emb.check(), SpecError);
}

TEST_CASE("classification: rational quadratic constraint is homogeneous(1)") {
  const auto spec = systems::build("perpendicular-velocities");
  const auto samples = draw_samples(spec, 12, 7u);
  const auto structure = classify_constraints(spec.constraints, samples);
  CHECK(structure.tag == StructureTag::homogeneous);
  CHECK(structure.degree == 1);
}

TEST_CASE("classification: affine constraint detected through the offset") {
  const auto spec = systems::build("affine-particle");
  const auto samples = draw_samples(spec, 12, 8u);
  const auto structure = classify_constraints(spec.constraints, samples);
  CHECK(structure.tag == StructureTag::affine);
}

TEST_CASE("classification: linear coefficients give the linear tag") {
  const auto spec = systems::build("midpoint-knife");
  const auto samples = draw_samples(spec, 12, 9u);
  const auto structure = classify_constraints(spec.constraints, samples);
  CHECK(structure.tag == StructureTag::linear);
  CHECK(structure.homogeneous_degree1());
}

TEST_CASE("classification: radical constraint falls back to general") {
  const auto spec = systems::build("constant-speed-point");
  const auto samples = draw_samples(spec, 12, 10u);
  const auto structure = classify_constraints(spec.constraints, samples);
  CHECK(structure.tag == StructureTag::general);
}

TEST_CASE("classification needs at least eight samples") {
  const auto spec = systems::build("perpendicular-velocities");
  const auto samples = draw_samples(spec, 4, 11u);
  CHECK_THROWS_AS(classify_constraints(spec.constraints, samples), SpecError);
}

TEST_CASE("catalog tags are reproduced by sampling classification") {
  const struct {
    const char* id;
    StructureTag tag;
  } cases[] = {
      {"nonholonomic-pendulum", StructureTag::homogeneous},
      {"perpendicular-velocities", StructureTag::homogeneous},
      {"parallel-velocities", StructureTag::homogeneous},
      {"equal-speed-pair", StructureTag::homogeneous},
      {"midpoint-knife", StructureTag::linear},
      {"orthogonal-to-join", StructureTag::linear},
      {"perp-pair-join", StructureTag::linear},
      {"affine-particle", StructureTag::affine},
      {"constant-speed-point", StructureTag::general},
  };
  unsigned seed = 100u;
  for (const auto& c : cases) {
    const auto spec = systems::build(c.id);
    const auto samples = draw_samples(spec, 12, seed++);
    const auto structure = classify_constraints(spec.constraints, samples);
    CHECK_MESSAGE(structure.tag == c.tag, c.id);
    if (structure.tag == StructureTag::homogeneous) CHECK(structure.degree == 1);
  }
}

TEST_CASE("embedding kinetic energy equals the quadratic metric form") {
  // every embedding-backed system, random states and velocities
  std::mt19937 rng(13u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (const auto& entry : systems::catalog()) {
    const auto spec = systems::build(entry.id);
    const auto samples = draw_samples(spec, 5, 55u);
    double worst = 0.0;
    for (const auto& s : samples) {
      const auto mc = dynamics::metric_coefficients(*spec.embedding, s.q, s.t);
      Eigen::VectorXd w(spec.dims.n);
      for (int j = 0; j < spec.dims.n; ++j) w[j] = dist(rng);
      const double direct = spec.energy.kinetic({s.q.data(), size_t(s.q.size())},
                                                {w.data(), size_t(w.size())}, s.t);
      const double quad = 0.5 * w.dot(mc.g * w) + mc.b.dot(w) + mc.c;
      worst = std::max(worst,
                       std::abs(direct - quad) / std::max(1.0, std::abs(direct)));
    }
    CHECK_MESSAGE(worst <= 1e-12, entry.id);
  }
}

TEST_CASE("rational quadratic builder reproduces the perpendicular constraint") {
  // alpha = -v1 v3 / v2 as (gamma_{13} v1 v3) / (beta_2 v2)
  auto one = ScalarField([]<class S>(std::span<const S>, std::span<const S>, S) {
    return S(1.0);
  });
  auto neg_half = ScalarField([]<class S>(std::span<const S>, std::span<const S>, S) {
    return S(-0.5);
  });
  std::vector<std::vector<std::vector<ScalarField>>> gamma(1);
  gamma[0].assign(3, std::vector<ScalarField>(3));
  gamma[0][0][2] = neg_half;
  gamma[0][2][0] = neg_half;
  std::vector<std::vector<ScalarField>> beta(1);
  beta[0].assign(3, ScalarField());
  beta[0][1] = one;
  const auto cs = make_rational_quadratic_constraints(4, 3, gamma, beta);
  CHECK(cs.structure.tag == StructureTag::homogeneous);

  KinematicState s;
  s.q = Eigen::Vector4d::Zero();
  s.v = Eigen::Vector3d(0.7, 1.3, -0.4);
  const double direct = cs.alpha[0]({s.q.data(), 4}, {s.v.data(), 3}, 0.0);
  CHECK(direct == doctest::Approx(-0.7 * -0.4 / 1.3).epsilon(1e-14));
}

TEST_CASE("chaplygin compatibility detection") {
  unsigned seed = 300u;
  auto klass = [&](const char* id) {
    const auto spec = systems::build(id);
    const auto samples = draw_samples(spec, 8, seed++);
    return caplygin_class(spec, samples);
  };
  CHECK(klass("midpoint-knife") == CaplyginClass::classical);
  CHECK(klass("affine-particle") == CaplyginClass::nonlinear);
  CHECK(klass("perpendicular-velocities") == CaplyginClass::nonlinear);
  CHECK(klass("nonholonomic-pendulum") == CaplyginClass::none);
  CHECK(klass("orthogonal-to-join") == CaplyginClass::none);
}
