// Forward-mode dual numbers, nestable for exact second derivatives.
#pragma once

#include <cmath>
#include <type_traits>

namespace voronec {

/// First-order dual number a + b·ε with ε² = 0. Nesting Dual<Dual<double>>
/// yields exact mixed second derivatives without step-size noise.
template <class T>
struct Dual {
  T v{};  ///< value
  T d{};  ///< derivative part

  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}  // NOLINT: implicit lift of constants
  Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

// --- value extraction / finiteness ---------------------------------------

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

inline bool all_finite(double x) { return std::isfinite(x); }
template <class T>
bool all_finite(const Dual<T>& x) { return all_finite(x.v) && all_finite(x.d); }

// --- arithmetic -----------------------------------------------------------

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator+(const Dual<T>& a) { return a; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + T(b), a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {T(a) + b.v, b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - T(b), a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {T(a) - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * T(b), a.d * T(b)}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {T(a) * b.v, T(a) * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / T(b), a.d / T(b)}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(a) / b; }

template <class T> Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { a = a + b; return a; }
template <class T> Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) { a = a - b; return a; }
template <class T> Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) { a = a * b; return a; }
template <class T> Dual<T>& operator/=(Dual<T>& a, const Dual<T>& b) { a = a / b; return a; }

// --- elementary functions ---------------------------------------------------

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tan;

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}
template <class T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.v), a.d * cos(a.v)}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -a.d * sin(a.v)}; }
template <class T>
Dual<T> tan(const Dual<T>& a) {
  T c = cos(a.v);
  return {tan(a.v), a.d / (c * c)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }

/// Integer power; the only pow the constraint catalog needs.
template <class T>
Dual<T> pow(const Dual<T>& a, int n) {
  if (n == 0) return Dual<T>(1.0);
  T p = pow(a.v, n - 1);
  return {p * a.v, double(n) * p * a.d};
}
inline double pow(double a, int n) { return std::pow(a, n); }

}  // namespace voronec
