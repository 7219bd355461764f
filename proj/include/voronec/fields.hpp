// Type-erased scalar and vector fields evaluable at double and at nested
// dual numbers. System authors write one generic lambda; the engine picks
// the level it needs for first or second derivatives.
#pragma once

#include <functional>
#include <span>
#include <type_traits>
#include <utility>

#include "voronec/dual.hpp"
#include "voronec/errors.hpp"

namespace voronec {

/// Scalar function of (q, v, t). The v block is whatever velocity-like
/// arguments the field takes: independent velocities for constraints,
/// all n velocities for a kinetic energy, empty for a potential.
class ScalarField {
 public:
  using Fn0 = std::function<double(std::span<const double>, std::span<const double>, double)>;
  using Fn1 = std::function<D1(std::span<const D1>, std::span<const D1>, D1)>;
  using Fn2 = std::function<D2(std::span<const D2>, std::span<const D2>, D2)>;

  ScalarField() = default;

  /// Wrap a generic functor; instantiated at every dual level.
  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, ScalarField>)
  ScalarField(F f) : f0_(f), f1_(f), f2_(std::move(f)) {}

  /// Assemble from per-level callables (derived fields that cannot support
  /// second-level duals pass nullptr for f2).
  ScalarField(Fn0 f0, Fn1 f1, Fn2 f2)
      : f0_(std::move(f0)), f1_(std::move(f1)), f2_(std::move(f2)) {}

  explicit operator bool() const { return static_cast<bool>(f0_); }
  bool has_second_level() const { return static_cast<bool>(f2_); }

  double operator()(std::span<const double> q, std::span<const double> v, double t) const {
    return f0_(q, v, t);
  }
  D1 operator()(std::span<const D1> q, std::span<const D1> v, D1 t) const {
    return f1_(q, v, t);
  }
  D2 operator()(std::span<const D2> q, std::span<const D2> v, D2 t) const {
    if (!f2_) throw Error("ScalarField: second dual level not available for this derived field");
    return f2_(q, v, t);
  }

  template <class S>
  S eval(std::span<const S> q, std::span<const S> v, S t) const {
    return (*this)(q, v, t);
  }

 private:
  Fn0 f0_;
  Fn1 f1_;
  Fn2 f2_;
};

/// Vector-valued map (q, t) -> R^dim, used for embeddings X. Supports one
/// more dual level than ScalarField because kinetic energies differentiate
/// through it.
class VectorField {
 public:
  using Fn0 = std::function<void(std::span<const double>, double, std::span<double>)>;
  using Fn1 = std::function<void(std::span<const D1>, D1, std::span<D1>)>;
  using Fn2 = std::function<void(std::span<const D2>, D2, std::span<D2>)>;
  using Fn3 = std::function<void(std::span<const D3>, D3, std::span<D3>)>;

  VectorField() = default;

  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, VectorField>)
  VectorField(int dim, F f) : dim_(dim), f0_(f), f1_(f), f2_(f), f3_(std::move(f)) {}

  int dim() const { return dim_; }
  explicit operator bool() const { return static_cast<bool>(f0_); }

  void operator()(std::span<const double> q, double t, std::span<double> out) const { f0_(q, t, out); }
  void operator()(std::span<const D1> q, D1 t, std::span<D1> out) const { f1_(q, t, out); }
  void operator()(std::span<const D2> q, D2 t, std::span<D2> out) const { f2_(q, t, out); }
  void operator()(std::span<const D3> q, D3 t, std::span<D3> out) const { f3_(q, t, out); }

 private:
  int dim_ = 0;
  Fn0 f0_;
  Fn1 f1_;
  Fn2 f2_;
  Fn3 f3_;
};

}  // namespace voronec
