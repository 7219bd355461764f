#include "voronec/catalog.hpp"

#include <cmath>
#include <random>

#include "voronec/errors.hpp"

namespace voronec::systems {

namespace {

using std::cos;
using std::sin;
using std::sqrt;
using std::tan;

double get(const ParamMap& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw SpecError("catalog: missing parameter '" + key + "'");
  return it->second;
}

ParamMap merged(const ParamMap& defaults, const ParamMap& overrides,
                const std::string& id) {
  ParamMap out = defaults;
  for (const auto& [key, value] : overrides) {
    if (!out.count(key))
      throw SpecError("catalog: unknown parameter '" + key + "' for system '" + id + "'");
    out[key] = value;
  }
  return out;
}

void require_positive(const ParamMap& p, const std::string& key) {
  if (!(get(p, key) > 0.0))
    throw SpecError("catalog: parameter '" + key + "' must be positive");
}

double rsign(std::mt19937& rng) {
  return (rng() & 1u) ? 1.0 : -1.0;
}

KinematicState state_of(std::initializer_list<double> q, std::initializer_list<double> v) {
  KinematicState s;
  s.q = Eigen::Map<const Eigen::VectorXd>(std::data(q), q.size());
  s.v = Eigen::Map<const Eigen::VectorXd>(std::data(v), v.size());
  s.t = 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Example systems. Coordinates, constraints and guards are stated with each
// builder; every system carries an embedding, the derived kinetic field, a
// potential (possibly identically zero, so conservation claims stay active),
// a sampler with margins away from the singular set, and structure tags.
// ---------------------------------------------------------------------------

// Two planar points; the lines orthogonal to the velocities meet on the
// y-axis. Chart (q1,q2,q3,q4) = (x1,y1,y2,x2), dependent qdot4 = xdot2.
SystemSpec build_pendulum(const ParamMap& p) {
  require_positive(p, "M1");
  require_positive(p, "M2");
  const double M1 = get(p, "M1"), M2 = get(p, "M2"), gy = get(p, "gy");

  SystemSpec spec;
  spec.dims = ChartDims(4, 3);
  EmbeddingModel emb;
  emb.n = 4;
  emb.point_count = 2;
  emb.point_dim = 2;
  emb.masses = Eigen::Vector2d(M1, M2);
  emb.position = VectorField(4, []<class S>(std::span<const S> q, S, std::span<S> out) {
    out[0] = q[0];  // P1 = (q1, q2)
    out[1] = q[1];
    out[2] = q[3];  // P2 = (q4, q3)
    out[3] = q[2];
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential =
      ScalarField([M1, M2, gy]<class S>(std::span<const S> q, std::span<const S>, S) {
        return (-gy) * (M1 * q[1] + M2 * q[2]);
      });

  ConstraintSet cs;
  cs.n = 4;
  cs.m = 3;
  cs.structure = Structure{StructureTag::homogeneous, 1, ""};
  cs.alpha.emplace_back([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return (v[2] / q[3]) * (q[1] - q[2] + q[0] * v[0] / v[1]);
  });
  spec.constraints = cs;

  spec.guard = [](const KinematicState& s) {
    return std::abs(s.v[1]) > 1e-9 && std::abs(s.q[3]) > 1e-9;
  };
  spec.sampler = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> box(0.5, 1.5), vel(0.3, 1.2);
    KinematicState s;
    s.q = Eigen::Vector4d(box(rng), box(rng), box(rng), box(rng));
    s.v = Eigen::Vector3d(rsign(rng) * vel(rng), rsign(rng) * vel(rng), rsign(rng) * vel(rng));
    s.t = 0.0;
    return s;
  };
  spec.label = "nonholonomic-pendulum";
  spec.caplygin_hint = CaplyginClass::none;  // alpha involves the dependent q4
  return spec;
}

// Two planar points with perpendicular velocities.
// Chart (q1,q2,q3,q4) = (x1,y1,x2,y2), dependent qdot4 = ydot2.
SystemSpec build_perpendicular(const ParamMap& p) {
  require_positive(p, "M1");
  require_positive(p, "M2");
  const double M1 = get(p, "M1"), M2 = get(p, "M2"), gy = get(p, "gy");

  SystemSpec spec;
  spec.dims = ChartDims(4, 3);
  EmbeddingModel emb;
  emb.n = 4;
  emb.point_count = 2;
  emb.point_dim = 2;
  emb.masses = Eigen::Vector2d(M1, M2);
  emb.position = VectorField(4, []<class S>(std::span<const S> q, S, std::span<S> out) {
    for (int i = 0; i < 4; ++i) out[i] = q[i];
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential =
      ScalarField([M1, M2, gy]<class S>(std::span<const S> q, std::span<const S>, S) {
        return (-gy) * (M1 * q[1] + M2 * q[3]);
      });

  ConstraintSet cs;
  cs.n = 4;
  cs.m = 3;
  cs.structure = Structure{StructureTag::homogeneous, 1, ""};
  cs.alpha.emplace_back([]<class S>(std::span<const S>, std::span<const S> v, S) {
    return -v[0] * v[2] / v[1];
  });
  spec.constraints = cs;

  spec.guard = [](const KinematicState& s) { return std::abs(s.v[1]) > 1e-9; };
  spec.sampler = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> box(-1.0, 1.0), vel(0.3, 1.2);
    KinematicState s;
    s.q = Eigen::Vector4d(box(rng), box(rng), box(rng), box(rng));
    s.v = Eigen::Vector3d(rsign(rng) * vel(rng), rsign(rng) * vel(rng), rsign(rng) * vel(rng));
    s.t = 0.0;
    return s;
  };
  spec.label = "perpendicular-velocities";
  spec.caplygin_hint = CaplyginClass::nonlinear;
  return spec;
}

// One spatial point whose speed is constant; the radical's sign is fixed at
// construction from the initial conditions. Chart (x, y, z), m = 2.
SystemSpec build_constant_speed(const ParamMap& p) {
  require_positive(p, "M");
  require_positive(p, "C");
  const double M = get(p, "M"), C = get(p, "C"), gz = get(p, "gz");
  const double branch = get(p, "branch");
  if (branch != 1.0 && branch != -1.0)
    throw SpecError("catalog: branch must be +1 or -1");

  SystemSpec spec;
  spec.dims = ChartDims(3, 2);
  EmbeddingModel emb;
  emb.n = 3;
  emb.point_count = 1;
  emb.point_dim = 3;
  emb.masses = Eigen::VectorXd::Constant(1, M);
  emb.position = VectorField(3, []<class S>(std::span<const S> q, S, std::span<S> out) {
    for (int i = 0; i < 3; ++i) out[i] = q[i];
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential =
      ScalarField([M, gz]<class S>(std::span<const S> q, std::span<const S>, S) {
        return (-M * gz) * q[2];
      });

  ConstraintSet cs;
  cs.n = 3;
  cs.m = 2;
  cs.structure = Structure{StructureTag::general, 0, ""};
  cs.alpha.emplace_back([C, branch]<class S>(std::span<const S>, std::span<const S> v, S) {
    return branch * sqrt(C * C - v[0] * v[0] - v[1] * v[1]);
  });
  spec.constraints = cs;

  spec.guard = [C](const KinematicState& s) {
    // abort rather than switch branch when the radicand closes
    return C * C - s.v.squaredNorm() > 1e-12 * C * C;
  };
  spec.sampler = [C](std::mt19937& rng) {
    std::uniform_real_distribution<double> box(-1.0, 1.0), rad(0.1, 0.8),
        ang(0.0, 2.0 * M_PI);
    KinematicState s;
    s.q = Eigen::Vector3d(box(rng), box(rng), box(rng));
    const double r = rad(rng) * C, th = ang(rng);
    s.v = Eigen::Vector2d(r * cos(th), r * sin(th));
    s.t = 0.0;
    return s;
  };
  spec.label = "constant-speed-point";
  spec.caplygin_hint = CaplyginClass::nonlinear;
  return spec;
}

// N planar points moving with parallel velocities.
// Chart (x1..xN, y1 | y2..yN); m = N+1, alpha_nu = v_{nu+1} v_m / v_1.
SystemSpec build_parallel(const ParamMap& p) {
  const int N = int(get(p, "N"));
  if (N < 2 || N != get(p, "N")) throw SpecError("catalog: N must be an integer >= 2");
  Eigen::VectorXd masses(N);
  for (int i = 0; i < N; ++i) {
    const std::string key = "M" + std::to_string(i + 1);
    masses[i] = p.count(key) ? get(p, key) : 1.0;
    if (!(masses[i] > 0.0)) throw SpecError("catalog: masses must be positive");
  }
  const double kappa = get(p, "kappa");
  const int n = 2 * N, m = N + 1;

  SystemSpec spec;
  spec.dims = ChartDims(n, m);
  EmbeddingModel emb;
  emb.n = n;
  emb.point_count = N;
  emb.point_dim = 2;
  emb.masses = masses;
  emb.position = VectorField(n, [N, m]<class S>(std::span<const S> q, S, std::span<S> out) {
    for (int i = 0; i < N; ++i) {
      out[2 * i] = q[i];                              // x_i
      out[2 * i + 1] = (i == 0) ? q[m - 1] : q[m + i - 1];  // y_i
    }
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential =
      ScalarField([N, m, kappa]<class S>(std::span<const S> q, std::span<const S>, S) {
        // pairwise attractive springs between all points
        S u = S(0.0);
        for (int i = 0; i < N; ++i)
          for (int j = i + 1; j < N; ++j) {
            S dx = q[i] - q[j];
            S yi = (i == 0) ? q[m - 1] : q[m + i - 1];
            S yj = q[m + j - 1];
            S dy = yi - yj;
            u = u + dx * dx + dy * dy;
          }
        return (-0.5 * kappa) * u;
      });

  ConstraintSet cs;
  cs.n = n;
  cs.m = m;
  cs.structure = Structure{StructureTag::homogeneous, 1, ""};
  for (int nu = 0; nu < N - 1; ++nu) {
    cs.alpha.emplace_back([nu, m]<class S>(std::span<const S>, std::span<const S> v, S) {
      return v[nu + 1] * v[m - 1] / v[0];
    });
  }
  spec.constraints = cs;

  spec.guard = [](const KinematicState& s) { return std::abs(s.v[0]) > 1e-9; };
  spec.sampler = [n, m](std::mt19937& rng) {
    std::uniform_real_distribution<double> box(-1.0, 1.0), vel(0.3, 1.2), v1(0.4, 1.2);
    KinematicState s;
    s.q.resize(n);
    s.v.resize(m);
    for (int i = 0; i < n; ++i) s.q[i] = box(rng);
    s.v[0] = rsign(rng) * v1(rng);
    for (int i = 1; i < m; ++i) s.v[i] = rsign(rng) * vel(rng);
    s.t = 0.0;
    return s;
  };
  spec.label = "parallel-velocities";
  spec.caplygin_hint = kappa == 0.0 ? CaplyginClass::nonlinear : CaplyginClass::none;
  return spec;
}

// Two spatial points sharing the norm of the velocity.
// Chart (x1,y1,z1,x2,y2,z2); m = 5, dependent qdot6 = zdot2.
SystemSpec build_equal_speed(const ParamMap& p) {
  require_positive(p, "M1");
  require_positive(p, "M2");
  const double M1 = get(p, "M1"), M2 = get(p, "M2"), gz = get(p, "gz"),
               kappa = get(p, "kappa");
  const double branch = get(p, "branch");
  if (branch != 1.0 && branch != -1.0)
    throw SpecError("catalog: branch must be +1 or -1");

  SystemSpec spec;
  spec.dims = ChartDims(6, 5);
  EmbeddingModel emb;
  emb.n = 6;
  emb.point_count = 2;
  emb.point_dim = 3;
  emb.masses = Eigen::Vector2d(M1, M2);
  emb.position = VectorField(6, []<class S>(std::span<const S> q, S, std::span<S> out) {
    for (int i = 0; i < 6; ++i) out[i] = q[i];
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential = ScalarField(
      [M1, M2, gz, kappa]<class S>(std::span<const S> q, std::span<const S>, S) {
        S d2 = S(0.0);
        for (int i = 0; i < 3; ++i) {
          S d = q[i] - q[i + 3];
          d2 = d2 + d * d;
        }
        return (-gz) * (M1 * q[2] + M2 * q[5]) - (0.5 * kappa) * d2;
      });

  ConstraintSet cs;
  cs.n = 6;
  cs.m = 5;
  cs.structure = Structure{StructureTag::homogeneous, 1, ""};
  cs.alpha.emplace_back([branch]<class S>(std::span<const S>, std::span<const S> v, S) {
    return branch * sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - v[3] * v[3] - v[4] * v[4]);
  });
  spec.constraints = cs;

  spec.guard = [](const KinematicState& s) {
    const double rad = s.v.head(3).squaredNorm() - s.v.segment(3, 2).squaredNorm();
    return rad > 1e-12 * std::max(1.0, s.v.head(3).squaredNorm());
  };
  spec.sampler = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> box(-1.0, 1.0), fast(0.6, 1.2), slow(0.1, 0.4);
    KinematicState s;
    s.q.resize(6);
    s.v.resize(5);
    for (int i = 0; i < 6; ++i) s.q[i] = box(rng);
    for (int i = 0; i < 3; ++i) s.v[i] = rsign(rng) * fast(rng);
    for (int i = 3; i < 5; ++i) s.v[i] = rsign(rng) * slow(rng);
    s.t = 0.0;
    return s;
  };
  spec.label = "equal-speed-pair";
  spec.caplygin_hint = kappa == 0.0 ? CaplyginClass::nonlinear : CaplyginClass::none;
  return spec;
}

// Rigid pair of points whose midpoint velocity is aligned with the rod.
// Chart (q1,q2,q3) = (angle, x_mid, y_mid); linear qdot3 = tan(q1) qdot2.
SystemSpec build_midpoint_knife(const ParamMap& p) {
  require_positive(p, "M1");
  require_positive(p, "M2");
  require_positive(p, "l");
  const double M1 = get(p, "M1"), M2 = get(p, "M2"), l = get(p, "l"), g = get(p, "g");

  SystemSpec spec;
  spec.dims = ChartDims(3, 2);
  EmbeddingModel emb;
  emb.n = 3;
  emb.point_count = 2;
  emb.point_dim = 2;
  emb.masses = Eigen::Vector2d(M1, M2);
  emb.position = VectorField(4, [l]<class S>(std::span<const S> q, S, std::span<S> out) {
    out[0] = q[1] + l * cos(q[0]);
    out[1] = q[2] + l * sin(q[0]);
    out[2] = q[1] - l * cos(q[0]);
    out[3] = q[2] - l * sin(q[0]);
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential =
      ScalarField([M1, M2, g]<class S>(std::span<const S> q, std::span<const S>, S) {
        return (-(M1 + M2) * g) * q[2];
      });

  ConstraintSet cs;
  cs.n = 3;
  cs.m = 2;
  cs.structure = Structure{StructureTag::linear, 1, ""};
  cs.alpha.emplace_back([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return tan(q[0]) * v[1];
  });
  cs.linear_coeff = {{ScalarField(), ScalarField([]<class S>(std::span<const S> q,
                                                             std::span<const S>, S) {
                        return tan(q[0]);
                      })}};
  spec.constraints = cs;

  spec.guard = [](const KinematicState& s) { return std::abs(cos(s.q[0])) > 0.05; };
  spec.sampler = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> ang(0.1, 1.0), box(-1.0, 1.0), vel(0.3, 1.0);
    KinematicState s;
    s.q = Eigen::Vector3d(rsign(rng) * ang(rng), box(rng), box(rng));
    s.v = Eigen::Vector2d(rsign(rng) * vel(rng), rsign(rng) * vel(rng));
    s.t = 0.0;
    return s;
  };
  spec.label = "midpoint-knife";
  spec.caplygin_hint = CaplyginClass::classical;
  return spec;
}

// Two planar points, both velocities orthogonal to the joining line.
// Chart (q1,q2,q3,q4) = (x1,x2,y1,y2); linear, m = k = 2.
SystemSpec build_orthogonal_join(const ParamMap& p) {
  require_positive(p, "M1");
  require_positive(p, "M2");
  const double M1 = get(p, "M1"), M2 = get(p, "M2"), kappa = get(p, "kappa"),
               rheo = get(p, "rheo_eps");

  SystemSpec spec;
  spec.dims = ChartDims(4, 2);
  EmbeddingModel emb;
  emb.n = 4;
  emb.point_count = 2;
  emb.point_dim = 2;
  emb.masses = Eigen::Vector2d(M1, M2);
  emb.position = VectorField(4, []<class S>(std::span<const S> q, S, std::span<S> out) {
    out[0] = q[0];  // P1 = (x1, y1) = (q1, q3)
    out[1] = q[2];
    out[2] = q[1];  // P2 = (x2, y2) = (q2, q4)
    out[3] = q[3];
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential =
      ScalarField([kappa, rheo]<class S>(std::span<const S> q, std::span<const S>, S t) {
        S dx = q[1] - q[0];
        S dy = q[3] - q[2];
        S k = kappa * (1.0 + rheo * sin(t));
        return (-0.5) * k * (dx * dx + dy * dy);
      });

  auto coeff = ScalarField([]<class S>(std::span<const S> q, std::span<const S>, S) {
    return (q[1] - q[0]) / (q[2] - q[3]);
  });
  ConstraintSet cs;
  cs.n = 4;
  cs.m = 2;
  cs.structure = Structure{StructureTag::linear, 1, ""};
  cs.alpha.emplace_back([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return (q[1] - q[0]) / (q[2] - q[3]) * v[0];
  });
  cs.alpha.emplace_back([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return (q[1] - q[0]) / (q[2] - q[3]) * v[1];
  });
  cs.linear_coeff = {{coeff, ScalarField()}, {ScalarField(), coeff}};
  spec.constraints = cs;

  spec.guard = [](const KinematicState& s) { return std::abs(s.q[2] - s.q[3]) > 1e-6; };
  spec.sampler = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> box(-1.0, 1.0), gap(1.5, 2.5), y0(-0.5, 0.5),
        vel(0.3, 1.2);
    KinematicState s;
    const double y1 = y0(rng);
    s.q = Eigen::Vector4d(box(rng), box(rng), y1, y1 + rsign(rng) * gap(rng));
    s.v = Eigen::Vector2d(rsign(rng) * vel(rng), rsign(rng) * vel(rng));
    s.t = 0.0;
    return s;
  };
  spec.label = "orthogonal-to-join";
  spec.caplygin_hint = CaplyginClass::none;  // coefficients involve y1, y2
  return spec;
}

// Perpendicular velocities with P1 also orthogonal to the joining line,
// taken as the equivalent pair of linear constraints.
// Chart (q1,q2,q3,q4) = (x1,x2,y1,y2); m = k = 2.
SystemSpec build_perp_pair_join(const ParamMap& p) {
  require_positive(p, "M1");
  require_positive(p, "M2");
  const double M1 = get(p, "M1"), M2 = get(p, "M2"), kappa = get(p, "kappa");

  SystemSpec spec;
  spec.dims = ChartDims(4, 2);
  EmbeddingModel emb;
  emb.n = 4;
  emb.point_count = 2;
  emb.point_dim = 2;
  emb.masses = Eigen::Vector2d(M1, M2);
  emb.position = VectorField(4, []<class S>(std::span<const S> q, S, std::span<S> out) {
    out[0] = q[0];
    out[1] = q[2];
    out[2] = q[1];
    out[3] = q[3];
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  spec.energy.potential =
      ScalarField([kappa]<class S>(std::span<const S> q, std::span<const S>, S) {
        S dx = q[1] - q[0];
        S dy = q[3] - q[2];
        return (-0.5 * kappa) * (dx * dx + dy * dy);
      });

  ConstraintSet cs;
  cs.n = 4;
  cs.m = 2;
  cs.structure = Structure{StructureTag::linear, 1, ""};
  cs.alpha.emplace_back([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return -(q[1] - q[0]) / (q[3] - q[2]) * v[0];
  });
  cs.alpha.emplace_back([]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return (q[3] - q[2]) / (q[1] - q[0]) * v[1];
  });
  cs.linear_coeff = {
      {ScalarField([]<class S>(std::span<const S> q, std::span<const S>, S) {
         return -(q[1] - q[0]) / (q[3] - q[2]);
       }),
       ScalarField()},
      {ScalarField(),
       ScalarField([]<class S>(std::span<const S> q, std::span<const S>, S) {
         return (q[3] - q[2]) / (q[1] - q[0]);
       })}};
  spec.constraints = cs;

  spec.guard = [](const KinematicState& s) {
    return std::abs(s.q[1] - s.q[0]) > 1e-6 && std::abs(s.q[3] - s.q[2]) > 1e-6;
  };
  spec.sampler = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> x0(-0.5, 0.5), gap(1.0, 2.0), vel(0.3, 1.2);
    KinematicState s;
    const double x1 = x0(rng), y1 = x0(rng);
    s.q = Eigen::Vector4d(x1, x1 + rsign(rng) * gap(rng), y1, y1 + rsign(rng) * gap(rng));
    s.v = Eigen::Vector2d(rsign(rng) * vel(rng), rsign(rng) * vel(rng));
    s.t = 0.0;
    return s;
  };
  spec.label = "perp-pair-join";
  spec.caplygin_hint = CaplyginClass::none;
  return spec;
}

// One spatial particle under the affine constraint
// zdot = a x ydot + b y xdot + c. Chart (x, y, z); m = 2.
SystemSpec build_affine_particle(const ParamMap& p) {
  require_positive(p, "M");
  const double M = get(p, "M"), a = get(p, "a"), b = get(p, "b"), c = get(p, "c");
  const double kappa = get(p, "kappa"), g3 = get(p, "g3");

  SystemSpec spec;
  spec.dims = ChartDims(3, 2);
  EmbeddingModel emb;
  emb.n = 3;
  emb.point_count = 1;
  emb.point_dim = 3;
  emb.masses = Eigen::VectorXd::Constant(1, M);
  emb.position = VectorField(3, []<class S>(std::span<const S> q, S, std::span<S> out) {
    for (int i = 0; i < 3; ++i) out[i] = q[i];
  });
  emb.check();
  spec.embedding = emb;
  spec.energy.kinetic = make_kinetic_field(emb);
  // V = kappa/2 (x^2 + y^2) + g3 z; U = -V
  spec.energy.potential =
      ScalarField([kappa, g3]<class S>(std::span<const S> q, std::span<const S>, S) {
        return (-0.5 * kappa) * (q[0] * q[0] + q[1] * q[1]) - g3 * q[2];
      });

  ConstraintSet cs;
  cs.n = 3;
  cs.m = 2;
  cs.structure = Structure{StructureTag::affine, 0, ""};
  cs.alpha.emplace_back([a, b, c]<class S>(std::span<const S> q, std::span<const S> v, S) {
    return a * q[0] * v[1] + b * q[1] * v[0] + c;
  });
  cs.linear_coeff = {{ScalarField([b]<class S>(std::span<const S> q, std::span<const S>, S) {
                        return b * q[1];
                      }),
                      ScalarField([a]<class S>(std::span<const S> q, std::span<const S>, S) {
                        return a * q[0];
                      })}};
  cs.affine_offset = {ScalarField([c]<class S>(std::span<const S>, std::span<const S>, S) {
    return S(0.0) + c;
  })};
  spec.constraints = cs;

  spec.guard = [](const KinematicState&) { return true; };
  spec.sampler = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> box(-1.0, 1.0), vel(0.2, 1.2);
    KinematicState s;
    s.q = Eigen::Vector3d(box(rng), box(rng), box(rng));
    s.v = Eigen::Vector2d(rsign(rng) * vel(rng), rsign(rng) * vel(rng));
    s.t = 0.0;
    return s;
  };
  spec.label = "affine-particle";
  spec.caplygin_hint = CaplyginClass::nonlinear;
  return spec;
}

const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> table = {
      {"nonholonomic-pendulum",
       "two planar points, velocity normals meeting on the y-axis (n=4, m=3)",
       {{"M1", 1.0}, {"M2", 1.0}, {"gy", 0.0}}},
      {"perpendicular-velocities",
       "two planar points with perpendicular velocities (n=4, m=3)",
       {{"M1", 1.0}, {"M2", 1.0}, {"gy", 0.0}}},
      {"constant-speed-point",
       "one spatial point with constant speed (n=3, m=2)",
       {{"M", 1.0}, {"C", 1.0}, {"gz", 9.81}, {"branch", -1.0}}},
      {"parallel-velocities",
       "N planar points with parallel velocities (n=2N, m=N+1)",
       {{"N", 3.0}, {"M1", 1.0}, {"M2", 1.0}, {"M3", 1.0}, {"kappa", 0.0}}},
      {"equal-speed-pair",
       "two spatial points sharing the velocity norm (n=6, m=5)",
       {{"M1", 1.0}, {"M2", 1.0}, {"gz", 0.0}, {"kappa", 0.0}, {"branch", -1.0}}},
      {"midpoint-knife",
       "rigid point pair, midpoint velocity along the rod (n=3, m=2)",
       {{"M1", 1.0}, {"M2", 1.0}, {"l", 1.0}, {"g", 1.0}}},
      {"orthogonal-to-join",
       "two planar points orthogonal to the joining line (n=4, m=2)",
       {{"M1", 1.0}, {"M2", 1.0}, {"kappa", 0.3}, {"rheo_eps", 0.0}}},
      {"perp-pair-join",
       "perpendicular velocities with P1 orthogonal to the join (n=4, m=2)",
       {{"M1", 1.0}, {"M2", 1.0}, {"kappa", 0.0}}},
      {"affine-particle",
       "spatial particle under an affine velocity constraint (n=3, m=2)",
       {{"M", 1.0}, {"a", 1.0}, {"b", 0.5}, {"c", 0.75}, {"kappa", 0.5}, {"g3", 0.0}}},
  };
  return table;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() { return entries(); }

bool has_system(const std::string& id) {
  for (const auto& e : entries())
    if (e.id == id) return true;
  return false;
}

SystemSpec build(const std::string& id, const ParamMap& params) {
  const CatalogEntry* entry = nullptr;
  for (const auto& e : entries())
    if (e.id == id) entry = &e;
  if (!entry) throw SpecError("catalog: unknown system '" + id + "'");

  ParamMap p;
  if (id == "parallel-velocities") {
    // mass keys depend on N; accept M1..MN
    p = entry->defaults;
    const int N = params.count("N") ? int(params.at("N")) : int(p.at("N"));
    for (int i = 1; i <= N; ++i) p.emplace("M" + std::to_string(i), 1.0);
    for (const auto& [key, value] : params) {
      if (!p.count(key))
        throw SpecError("catalog: unknown parameter '" + key + "' for system '" + id + "'");
      p[key] = value;
    }
  } else {
    p = merged(entry->defaults, params, id);
  }

  if (id == "nonholonomic-pendulum") return build_pendulum(p);
  if (id == "perpendicular-velocities") return build_perpendicular(p);
  if (id == "constant-speed-point") return build_constant_speed(p);
  if (id == "parallel-velocities") return build_parallel(p);
  if (id == "equal-speed-pair") return build_equal_speed(p);
  if (id == "midpoint-knife") return build_midpoint_knife(p);
  if (id == "orthogonal-to-join") return build_orthogonal_join(p);
  if (id == "perp-pair-join") return build_perp_pair_join(p);
  if (id == "affine-particle") return build_affine_particle(p);
  throw SpecError("catalog: unknown system '" + id + "'");
}

KinematicState default_state(const std::string& id, const ParamMap& params) {
  if (id == "nonholonomic-pendulum") return state_of({1.0, 2.0, 1.0, 1.0}, {0.8, 1.0, 0.6});
  if (id == "perpendicular-velocities") return state_of({0.0, 0.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
  if (id == "constant-speed-point") {
    const double C = params.count("C") ? params.at("C") : 1.0;
    return state_of({0.0, 0.0, 0.0}, {0.6 * C, 0.0});
  }
  if (id == "parallel-velocities") {
    const int N = params.count("N") ? int(params.at("N")) : 3;
    KinematicState s;
    s.q.resize(2 * N);
    s.v.resize(N + 1);
    for (int i = 0; i < N; ++i) {
      s.q[i] = double(i);                      // x_i spread out
      s.q[i == 0 ? N : N + i] = 0.5 * double(i);  // y_i
    }
    s.v[0] = 1.0;
    for (int i = 1; i < N; ++i) s.v[i] = 0.8 + 0.2 * double(i);
    s.v[N] = 0.5;
    s.t = 0.0;
    return s;
  }
  if (id == "equal-speed-pair")
    return state_of({0.0, 0.0, 0.0, 1.0, 1.0, 1.0}, {1.0, 0.3, 0.2, 0.4, 0.3});
  if (id == "midpoint-knife") return state_of({0.2, 0.0, 0.0}, {0.3, 0.4});
  if (id == "orthogonal-to-join") return state_of({0.0, 0.2, 0.0, 2.0}, {1.0, 0.9});
  if (id == "perp-pair-join") return state_of({0.0, 1.5, 0.0, 1.2}, {0.05, 0.3});
  if (id == "affine-particle") return state_of({0.2, -0.4, 0.0}, {0.5, 1.0 / 3.0});
  throw SpecError("catalog: unknown system '" + id + "'");
}

std::vector<energy::FirstIntegral> expected_integrals(const std::string& id,
                                                      const ParamMap& params) {
  const CatalogEntry* entry = nullptr;
  for (const auto& e : entries())
    if (e.id == id) entry = &e;
  if (!entry) throw SpecError("catalog: unknown system '" + id + "'");
  ParamMap p = entry->defaults;
  if (id == "parallel-velocities") {
    const int N = params.count("N") ? int(params.at("N")) : int(p.at("N"));
    for (int i = 1; i <= N; ++i) p.emplace("M" + std::to_string(i), 1.0);
  }
  for (const auto& [key, value] : params) {
    if (!p.count(key)) throw SpecError("catalog: unknown parameter '" + key + "'");
    p[key] = value;
  }

  std::vector<energy::FirstIntegral> out;
  using energy::FirstIntegral;

  if (id == "nonholonomic-pendulum") {
    const double M1 = p.at("M1"), M2 = p.at("M2"), gy = p.at("gy");
    out.push_back({"generalized-energy", "closed-form restricted energy",
                   [=](const KinematicState& s) {
                     const double psi =
                         (s.q[1] - s.q[2] + s.q[0] * s.v[0] / s.v[1]) / s.q[3];
                     return 0.5 * M1 * (s.v[0] * s.v[0] + s.v[1] * s.v[1]) +
                            0.5 * M2 * s.v[2] * s.v[2] * (1.0 + psi * psi) +
                            gy * (M1 * s.q[1] + M2 * s.q[2]);
                   }});
  } else if (id == "perpendicular-velocities") {
    const double M1 = p.at("M1"), M2 = p.at("M2"), gy = p.at("gy");
    out.push_back({"generalized-energy", "closed-form restricted energy",
                   [=](const KinematicState& s) {
                     const double r = s.v[0] / s.v[1];
                     return 0.5 * M1 * (s.v[0] * s.v[0] + s.v[1] * s.v[1]) +
                            0.5 * M2 * s.v[2] * s.v[2] * (1.0 + r * r) +
                            gy * (M1 * s.q[1] + M2 * s.q[3]);
                   }});
  } else if (id == "parallel-velocities") {
    const int N = int(p.at("N"));
    std::vector<double> masses(N);
    for (int i = 0; i < N; ++i) masses[i] = p.at("M" + std::to_string(i + 1));
    const double kappa = p.at("kappa");
    const int m = N + 1;
    out.push_back({"generalized-energy", "closed-form restricted energy",
                   [=](const KinematicState& s) {
                     double e = 0.0;
                     const double ratio2 = (s.v[m - 1] / s.v[0]) * (s.v[m - 1] / s.v[0]);
                     for (int i = 0; i < N; ++i)
                       e += 0.5 * masses[i] * s.v[i] * s.v[i] * (1.0 + ratio2);
                     double u = 0.0;
                     for (int i = 0; i < N; ++i)
                       for (int j = i + 1; j < N; ++j) {
                         const double dx = s.q[i] - s.q[j];
                         const double yi = (i == 0) ? s.q[m - 1] : s.q[m + i - 1];
                         const double dy = yi - s.q[m + j - 1];
                         u += dx * dx + dy * dy;
                       }
                     return e + 0.5 * kappa * u;
                   }});
  } else if (id == "equal-speed-pair") {
    const double M1 = p.at("M1"), M2 = p.at("M2"), gz = p.at("gz"), kappa = p.at("kappa");
    out.push_back({"generalized-energy", "closed-form restricted energy",
                   [=](const KinematicState& s) {
                     double d2 = 0.0;
                     for (int i = 0; i < 3; ++i) {
                       const double d = s.q[i] - s.q[i + 3];
                       d2 += d * d;
                     }
                     return 0.5 * (M1 + M2) * s.v.head(3).squaredNorm() +
                            gz * (M1 * s.q[2] + M2 * s.q[5]) + 0.5 * kappa * d2;
                   }});
  } else if (id == "midpoint-knife") {
    const double M1 = p.at("M1"), M2 = p.at("M2"), l = p.at("l"), g = p.at("g");
    out.push_back({"jacobi-integral", "closed-form generalized energy integral",
                   [=](const KinematicState& s) {
                     const double tn = std::tan(s.q[0]);
                     return 0.5 * (M1 + M2) *
                                (l * l * s.v[0] * s.v[0] +
                                 (1.0 + tn * tn) * s.v[1] * s.v[1]) +
                            (M1 + M2) * g * s.q[2];
                   }});
  } else if (id == "orthogonal-to-join") {
    const double M1 = p.at("M1"), M2 = p.at("M2"), kappa = p.at("kappa"),
                 rheo = p.at("rheo_eps");
    if (rheo == 0.0) {
      out.push_back({"jacobi-integral", "closed-form generalized energy integral",
                     [=](const KinematicState& s) {
                       const double a = (s.q[1] - s.q[0]) / (s.q[2] - s.q[3]);
                       const double dx = s.q[1] - s.q[0], dy = s.q[3] - s.q[2];
                       return 0.5 * (M1 * s.v[0] * s.v[0] + M2 * s.v[1] * s.v[1]) *
                                  (1.0 + a * a) +
                              0.5 * kappa * (dx * dx + dy * dy);
                     }});
    }
  } else if (id == "perp-pair-join") {
    const double M1 = p.at("M1"), M2 = p.at("M2"), kappa = p.at("kappa");
    out.push_back({"jacobi-integral", "closed-form generalized energy integral",
                   [=](const KinematicState& s) {
                     const double r1 = (s.q[1] - s.q[0]) / (s.q[3] - s.q[2]);
                     const double r2 = (s.q[3] - s.q[2]) / (s.q[1] - s.q[0]);
                     const double dx = s.q[1] - s.q[0], dy = s.q[3] - s.q[2];
                     return 0.5 * M1 * s.v[0] * s.v[0] * (1.0 + r1 * r1) +
                            0.5 * M2 * s.v[1] * s.v[1] * (1.0 + r2 * r2) +
                            0.5 * kappa * (dx * dx + dy * dy);
                   }});
  } else if (id == "affine-particle") {
    const double M = p.at("M"), a = p.at("a"), b = p.at("b"), c = p.at("c"),
                 kappa = p.at("kappa"), g3 = p.at("g3");
    if (g3 == 0.0) {
      out.push_back(
          {"affine-generalized-energy",
           "generalized energy of the affine constraint (differs from the "
           "mechanical energy by the offset coupling)",
           [=](const KinematicState& s) {
             const double w = a * s.q[0] * s.v[1] + b * s.q[1] * s.v[0];
             return 0.5 * M * (s.v[0] * s.v[0] + s.v[1] * s.v[1]) +
                    0.5 * M * (w + c) * (w - c) +
                    0.5 * kappa * (s.q[0] * s.q[0] + s.q[1] * s.q[1]);
           }});
    }
  }
  // constant-speed-point: no conservation claim (no degree-1 homogeneity)
  return out;
}

}  // namespace voronec::systems
