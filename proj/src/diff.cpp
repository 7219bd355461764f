#include "voronec/diff.hpp"

#include <cmath>
#include <vector>

#include "voronec/errors.hpp"

namespace voronec::diff {

namespace {

std::vector<D1> lift1(std::span<const double> x) {
  std::vector<D1> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = D1(x[i], 0.0);
  return out;
}

std::vector<D2> lift2(std::span<const double> x) {
  std::vector<D2> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = D2(x[i]);
  return out;
}

void check_finite(double r, int index, const char* what) {
  if (!std::isfinite(r))
    throw SingularityError(std::string("diff: non-finite ") + what +
                               " at variable index " + std::to_string(index),
                           index);
}

double fd_step_for(double h, double x) { return h * std::max(1.0, std::abs(x)); }

// central difference of f over one entry of a copied argument vector
template <class Eval>
double central(Eval&& eval, std::vector<double>& x, size_t i, double h) {
  const double x0 = x[i];
  const double hi = fd_step_for(h, x0);
  x[i] = x0 + hi;
  const double fp = eval();
  x[i] = x0 - hi;
  const double fm = eval();
  x[i] = x0;
  return (fp - fm) / (2.0 * hi);
}

}  // namespace

Eigen::VectorXd grad_v(const ScalarField& f, std::span<const double> q,
                       std::span<const double> v, double t, const Backend& be) {
  Eigen::VectorXd out(v.size());
  if (be.mode == Mode::dual) {
    std::vector<D1> qq = lift1(q), vv = lift1(v);
    const D1 tt(t, 0.0);
    for (size_t i = 0; i < v.size(); ++i) {
      vv[i].d = 1.0;
      const D1 r = f(std::span<const D1>(qq), std::span<const D1>(vv), tt);
      vv[i].d = 0.0;
      check_finite(r.d, int(i), "velocity gradient");
      out[i] = r.d;
    }
  } else {
    std::vector<double> qc(q.begin(), q.end()), vc(v.begin(), v.end());
    auto eval = [&] { return f(std::span<const double>(qc), std::span<const double>(vc), t); };
    for (size_t i = 0; i < v.size(); ++i) {
      out[i] = central(eval, vc, i, be.fd_step);
      check_finite(out[i], int(i), "velocity gradient");
    }
  }
  return out;
}

Eigen::VectorXd grad_q(const ScalarField& f, std::span<const double> q,
                       std::span<const double> v, double t, const Backend& be) {
  Eigen::VectorXd out(q.size());
  if (be.mode == Mode::dual) {
    std::vector<D1> qq = lift1(q), vv = lift1(v);
    const D1 tt(t, 0.0);
    for (size_t j = 0; j < q.size(); ++j) {
      qq[j].d = 1.0;
      const D1 r = f(std::span<const D1>(qq), std::span<const D1>(vv), tt);
      qq[j].d = 0.0;
      check_finite(r.d, int(j), "coordinate gradient");
      out[j] = r.d;
    }
  } else {
    std::vector<double> qc(q.begin(), q.end()), vc(v.begin(), v.end());
    auto eval = [&] { return f(std::span<const double>(qc), std::span<const double>(vc), t); };
    for (size_t j = 0; j < q.size(); ++j) {
      out[j] = central(eval, qc, j, be.fd_step);
      check_finite(out[j], int(j), "coordinate gradient");
    }
  }
  return out;
}

double partial_t(const ScalarField& f, std::span<const double> q,
                 std::span<const double> v, double t, const Backend& be) {
  if (be.mode == Mode::dual) {
    std::vector<D1> qq = lift1(q), vv = lift1(v);
    const D1 r = f(std::span<const D1>(qq), std::span<const D1>(vv), D1(t, 1.0));
    check_finite(r.d, -1, "time derivative");
    return r.d;
  }
  const double h = fd_step_for(be.fd_step, t);
  const double fp = f(q, v, t + h);
  const double fm = f(q, v, t - h);
  const double r = (fp - fm) / (2.0 * h);
  check_finite(r, -1, "time derivative");
  return r;
}

SecondBlocks second_mixed(const ScalarField& f, std::span<const double> q,
                          std::span<const double> v, double t, const Backend& be) {
  const int m = int(v.size());
  const int n = int(q.size());
  SecondBlocks blocks;
  blocks.vq.resize(m, n);
  blocks.vv.resize(m, m);
  blocks.vt.resize(m);

  if (be.mode == Mode::dual) {
    std::vector<D2> qq = lift2(q), vv = lift2(v);
    D2 tt(t);
    for (int i = 0; i < m; ++i) {
      vv[i].v.d = 1.0;  // outer seed: d/dv_i
      for (int j = 0; j < n; ++j) {
        qq[j].d.v = 1.0;  // inner seed: d/dq_j
        const D2 r = f(std::span<const D2>(qq), std::span<const D2>(vv), tt);
        qq[j].d.v = 0.0;
        check_finite(r.d.d, j, "second derivative (v,q)");
        blocks.vq(i, j) = r.d.d;
      }
      for (int r2 = 0; r2 <= i; ++r2) {
        vv[r2].d.v += 1.0;  // += so r2 == i seeds value-and-derivative correctly
        const D2 r = f(std::span<const D2>(qq), std::span<const D2>(vv), tt);
        vv[r2].d.v -= 1.0;
        check_finite(r.d.d, r2, "second derivative (v,v)");
        blocks.vv(i, r2) = r.d.d;
        blocks.vv(r2, i) = r.d.d;  // mirrored; exact symmetry by construction
      }
      {
        const D2 tseed(D1(t, 0.0), D1(1.0, 0.0));
        const D2 r = f(std::span<const D2>(qq), std::span<const D2>(vv), tseed);
        check_finite(r.d.d, -1, "second derivative (v,t)");
        blocks.vt[i] = r.d.d;
      }
      vv[i].v.d = 0.0;
    }
  } else {
    // nested central differences over a finite-difference inner gradient;
    // the outer step balances truncation against the amplified inner
    // roundoff eps/(h*H), which gives H ~ (eps/h)^(1/3)
    std::vector<double> qc(q.begin(), q.end()), vc(v.begin(), v.end());
    Backend inner = be;
    const double outer_step = std::cbrt(1.0e-16 / be.fd_step);
    auto gv = [&](int i) {
      return grad_v(f, std::span<const double>(qc), std::span<const double>(vc), t, inner)[i];
    };
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x0 = qc[j];
        const double h = fd_step_for(outer_step, x0);
        qc[j] = x0 + h;
        const double gp = gv(i);
        qc[j] = x0 - h;
        const double gm = gv(i);
        qc[j] = x0;
        blocks.vq(i, j) = (gp - gm) / (2.0 * h);
      }
      for (int r2 = 0; r2 < m; ++r2) {
        const double x0 = vc[r2];
        const double h = fd_step_for(outer_step, x0);
        vc[r2] = x0 + h;
        const double gp = gv(i);
        vc[r2] = x0 - h;
        const double gm = gv(i);
        vc[r2] = x0;
        blocks.vv(i, r2) = (gp - gm) / (2.0 * h);
      }
      const double h = fd_step_for(outer_step, t);
      const double gp = grad_v(f, std::span<const double>(qc), std::span<const double>(vc), t + h, inner)[i];
      const double gm = grad_v(f, std::span<const double>(qc), std::span<const double>(vc), t - h, inner)[i];
      blocks.vt[i] = (gp - gm) / (2.0 * h);
    }
  }
  return blocks;
}

double total_derivative(const ScalarField& f, std::span<const ScalarField> alphas,
                        const KinematicState& s, std::span<const double> accel,
                        const Backend& be) {
  const int m = int(s.v.size());
  const int k = int(alphas.size());
  std::span<const double> q{s.q.data(), size_t(s.q.size())};
  std::span<const double> v{s.v.data(), size_t(s.v.size())};

  const Eigen::VectorXd fq = grad_q(f, q, v, s.t, be);
  const Eigen::VectorXd fv = grad_v(f, q, v, s.t, be);
  const double ft = partial_t(f, q, v, s.t, be);

  double r = ft;
  for (int i = 0; i < m; ++i) r += fq[i] * s.v[i] + fv[i] * accel[i];
  for (int nu = 0; nu < k; ++nu) {
    const double a = alphas[nu](q, v, s.t);
    check_finite(a, m + nu, "dependent velocity");
    r += fq[m + nu] * a;
  }
  return r;
}

}  // namespace voronec::diff
