#include <doctest.h>

#include <random>

#include "voronec/derived_fields.hpp"
#include "voronec/diff.hpp"
#include "voronec/errors.hpp"

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

// alpha of the perpendicular-velocities system
const ScalarField perp_alpha([]<class S>(std::span<const S>, std::span<const S> v, S) {
  return -v[0] * v[2] / v[1];
});

}  // namespace

TEST_CASE("grad_v of -v1 v3 / v2 at (1,1,1)") {
  const auto s = make_state({0, 0, 0, 0}, {1, 1, 1});
  const Eigen::VectorXd g = diff::grad_v(perp_alpha, s);
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(1.0));
  CHECK(g[2] == doctest::Approx(-1.0));
}

TEST_CASE("grad_v of the constant-speed radical, positive branch") {
  const double C2 = 2.0;
  ScalarField alpha([C2]<class S>(std::span<const S>, std::span<const S> v, S) {
    return sqrt(C2 - v[0] * v[0] - v[1] * v[1]);
  });
  const auto s = make_state({0, 0, 0}, {1, 0});
  const Eigen::VectorXd g = diff::grad_v(alpha, s);
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(0.0));
}

TEST_CASE("second derivatives: f = q1 v1^2") {
  ScalarField f([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return q[0] * v[0] * v[0];
  });
  const auto s = make_state({1.5, 0.0}, {0.7});
  const auto blocks = diff::second_mixed(f, s);
  CHECK(blocks.vq(0, 0) == doctest::Approx(2 * 0.7));  // d2f/dv1 dq1 = 2 v1
  CHECK(blocks.vv(0, 0) == doctest::Approx(2 * 1.5));  // d2f/dv1 dv1 = 2 q1
  CHECK(blocks.vt[0] == doctest::Approx(0.0));
}

TEST_CASE("time-independent fields have zero v-t second derivatives") {
  const auto s = make_state({0, 0, 0, 0}, {0.9, 1.2, -0.4});
  const auto blocks = diff::second_mixed(perp_alpha, s);
  CHECK(blocks.vt.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("dual and finite differences agree on a random polynomial field") {
  // f = sum of a few mixed monomials in (q, v, t)
  ScalarField f([]<class S>(std::span<const S> q, std::span<const S> v, S t) {
    return q[0] * v[0] * v[0] + 0.5 * q[1] * q[1] * v[1] - 2.0 * v[0] * v[1] * t +
           q[0] * q[1] * t * t;
  });
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  diff::Backend fd{diff::Mode::finite_difference, 1e-5};
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    KinematicState s;
    s.q = Eigen::Vector2d(dist(rng), dist(rng));
    s.v = Eigen::Vector2d(dist(rng), dist(rng));
    s.t = dist(rng);
    const Eigen::VectorXd gd = diff::grad_v(f, s);
    const Eigen::VectorXd gf = diff::grad_v(f, s, fd);
    worst = std::max(worst, (gd - gf).cwiseAbs().maxCoeff());
    const Eigen::VectorXd qd = diff::grad_q(f, s);
    const Eigen::VectorXd qf = diff::grad_q(f, s, fd);
    worst = std::max(worst, (qd - qf).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(diff::partial_t(f, s) - diff::partial_t(f, s, fd)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("second-derivative blocks agree between backends on a constraint") {
  // alpha of the nonholonomic pendulum at a generic state
  ScalarField alpha([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return (v[2] / q[3]) * (q[1] - q[2] + q[0] * v[0] / v[1]);
  });
  const auto s = make_state({1, 2, 1, 1}, {1, 1, 1});
  const auto dual_blocks = diff::second_mixed(alpha, s);
  diff::Backend fd{diff::Mode::finite_difference, 1e-5};
  const auto fd_blocks = diff::second_mixed(alpha, s, fd);
  CHECK((dual_blocks.vv - fd_blocks.vv).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((dual_blocks.vq - fd_blocks.vq).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("vv block is exactly symmetric in dual mode") {
  ScalarField f([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return q[0] * v[0] * v[1] * v[1] + v[2] * v[0] / (1.0 + v[1] * v[1]);
  });
  const auto s = make_state({0.3}, {0.9, -1.1, 0.4});
  const auto blocks = diff::second_mixed(f, s);
  CHECK((blocks.vv - blocks.vv.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("differentiation is linear") {
  ScalarField f([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return q[0] * v[0] * v[0];
  });
  ScalarField g([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return sin(q[0]) * v[0];
  });
  ScalarField fg([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return q[0] * v[0] * v[0] + sin(q[0]) * v[0];
  });
  const auto s = make_state({0.8}, {1.3});
  const Eigen::VectorXd sum = diff::grad_v(f, s) + diff::grad_v(g, s);
  CHECK((diff::grad_v(fg, s) - sum).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("singularity raises with the offending index") {
  const auto s = make_state({0, 0, 0, 0}, {1.0, 0.0, 1.0});  // v2 = 0
  CHECK_THROWS_AS((void)diff::grad_v(perp_alpha, s), SingularityError);
}

TEST_CASE("total derivative of coordinate functions") {
  std::vector<ScalarField> alphas;
  alphas.emplace_back(perp_alpha);
  const auto s = make_state({0, 0, 0, 0}, {3.0, 1.0, 2.0});
  const double accel[] = {0.0, 0.0, 0.0};

  ScalarField q1([]<class S>(std::span<const S> q, std::span<const S>, S) { return q[0]; });
  CHECK(diff::total_derivative(q1, alphas, s, accel) == doctest::Approx(3.0));

  // the first dependent coordinate moves with alpha_1
  ScalarField q4([]<class S>(std::span<const S> q, std::span<const S>, S) { return q[3]; });
  CHECK(diff::total_derivative(q4, alphas, s, accel) ==
        doctest::Approx(-3.0 * 2.0 / 1.0));
}

TEST_CASE("derived fields: restricted kinetic energy composes through alpha") {
  // T = 1/2 (v1^2 + v2^2 + v3^2 + w4^2) restricted by w4 = -v1 v3 / v2
  ScalarField kinetic([]<class S>(std::span<const S>, std::span<const S> w, S) {
    S acc = S(0.0);
    for (size_t i = 0; i < w.size(); ++i) acc = acc + 0.5 * w[i] * w[i];
    return acc;
  });
  std::vector<ScalarField> alphas{perp_alpha};
  const ScalarField tstar = make_tstar_field(kinetic, alphas, 4, 3);
  const auto s = make_state({0, 0, 0, 0}, {1.0, 2.0, 1.0});
  const double expect = 0.5 * (1 + 4 + 1) + 0.5 * 0.25;  // alpha = -1/2
  std::span<const double> q{s.q.data(), 4}, v{s.v.data(), 3};
  CHECK(tstar(q, v, 0.0) == doctest::Approx(expect).epsilon(1e-14));

  // mixed second derivatives exist (level 2)
  const auto blocks = diff::second_mixed(tstar, s);
  CHECK(blocks.vv.rows() == 3);
}

TEST_CASE("bar-alpha field is the Euler sum") {
  const ScalarField bar = make_bar_alpha_field(perp_alpha);
  const auto s = make_state({0, 0, 0, 0}, {1.0, 1.0, 1.0});
  std::span<const double> q{s.q.data(), 4}, v{s.v.data(), 3};
  // degree-1 homogeneous: Euler sum equals the value
  CHECK(bar(q, v, 0.0) == doctest::Approx(perp_alpha(q, v, 0.0)).epsilon(1e-14));
  // and it is differentiable one level deep
  const Eigen::VectorXd g = diff::grad_v(bar, s);
  CHECK(g.size() == 3);
}
