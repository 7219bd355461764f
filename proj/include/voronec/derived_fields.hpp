// Fields built on top of other fields: the restricted kinetic energy T*,
// the generalized energy, Euler-weighted constraint sums, and single
// partial derivatives exposed as fields. Derived fields that differentiate
// their base internally support one dual level less than the base.
#pragma once

#include <span>
#include <vector>

#include "voronec/fields.hpp"

namespace voronec {

namespace detail {

template <class S>
std::vector<Dual<S>> lift(std::span<const S> x) {
  std::vector<Dual<S>> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = Dual<S>(x[i], S(0.0));
  return out;
}

/// T*(q,v,t) = T(q, v, alpha_1, ..., alpha_k, t): plain composition, same
/// dual level throughout.
template <class S>
S tstar_eval(const ScalarField& kinetic, const std::vector<ScalarField>& alphas,
             int n, int m, std::span<const S> q, std::span<const S> v, S t) {
  std::vector<S> w(n);
  for (int i = 0; i < m; ++i) w[i] = v[i];
  for (size_t nu = 0; nu < alphas.size(); ++nu)
    w[m + nu] = alphas[nu].eval(q, v, t);
  return kinetic.eval(q, std::span<const S>(w), t);
}

/// sum_i v_i * df/dv_i - (subtract_value ? f : 0), evaluated by promoting all
/// arguments one dual level and seeding each v_i in turn.
template <class S>
S euler_weighted_eval(const ScalarField& f, std::span<const S> q, std::span<const S> v,
                      S t, bool subtract_value) {
  using DS = Dual<S>;
  std::vector<DS> qq = lift(q);
  std::vector<DS> vv = lift(v);
  DS tt(t, S(0.0));
  S acc = S(0.0);
  S value = S(0.0);
  for (size_t i = 0; i < v.size(); ++i) {
    vv[i].d = S(1.0);
    DS r = f.eval(std::span<const DS>(qq), std::span<const DS>(vv), tt);
    vv[i].d = S(0.0);
    acc = acc + v[i] * r.d;
    value = r.v;
  }
  if (v.empty()) value = f.eval(q, v, t);
  return subtract_value ? acc - value : acc;
}

/// df/dv_index as a function of (q, v, t).
template <class S>
S dv_eval(const ScalarField& f, int index, std::span<const S> q, std::span<const S> v, S t) {
  using DS = Dual<S>;
  std::vector<DS> qq = lift(q);
  std::vector<DS> vv = lift(v);
  vv[index].d = S(1.0);
  return f.eval(std::span<const DS>(qq), std::span<const DS>(vv), DS(t, S(0.0))).d;
}

}  // namespace detail

/// Restricted kinetic energy T*(q, v, t); supports all dual levels of its bases.
inline ScalarField make_tstar_field(ScalarField kinetic, std::vector<ScalarField> alphas,
                                    int n, int m) {
  return ScalarField(
      [=](std::span<const double> q, std::span<const double> v, double t) {
        return detail::tstar_eval<double>(kinetic, alphas, n, m, q, v, t);
      },
      [=](std::span<const D1> q, std::span<const D1> v, D1 t) {
        return detail::tstar_eval<D1>(kinetic, alphas, n, m, q, v, t);
      },
      [=](std::span<const D2> q, std::span<const D2> v, D2 t) {
        return detail::tstar_eval<D2>(kinetic, alphas, n, m, q, v, t);
      });
}

/// Generalized energy sum_i v_i dL*/dv_i - L* with L* = T* + U. First dual
/// level only (it differentiates T* internally).
inline ScalarField make_energy_field(ScalarField tstar, ScalarField potential) {
  auto make = [tstar, potential]<class S>(std::span<const S> q, std::span<const S> v, S t) {
    S e = detail::euler_weighted_eval<S>(tstar, q, v, t, /*subtract_value=*/true);
    if (potential) e = e - potential.eval(q, std::span<const S>(), t);
    return e;
  };
  return ScalarField(
      [make](std::span<const double> q, std::span<const double> v, double t) {
        return make(q, v, t);
      },
      [make](std::span<const D1> q, std::span<const D1> v, D1 t) { return make(q, v, t); },
      nullptr);
}

/// Euler sum of a constraint: sum_i v_i dalpha/dv_i. First dual level only.
inline ScalarField make_bar_alpha_field(ScalarField alpha) {
  return ScalarField(
      [alpha](std::span<const double> q, std::span<const double> v, double t) {
        return detail::euler_weighted_eval<double>(alpha, q, v, t, false);
      },
      [alpha](std::span<const D1> q, std::span<const D1> v, D1 t) {
        return detail::euler_weighted_eval<D1>(alpha, q, v, t, false);
      },
      nullptr);
}

/// df/dv_index as a field. First dual level only.
inline ScalarField make_dv_field(ScalarField f, int index) {
  return ScalarField(
      [f, index](std::span<const double> q, std::span<const double> v, double t) {
        return detail::dv_eval<double>(f, index, q, v, t);
      },
      [f, index](std::span<const D1> q, std::span<const D1> v, D1 t) {
        return detail::dv_eval<D1>(f, index, q, v, t);
      },
      nullptr);
}

}  // namespace voronec
