#include "voronec/constraints.hpp"

#include "voronec/errors.hpp"

namespace voronec {

std::string to_string(StructureTag tag) {
  switch (tag) {
    case StructureTag::general: return "general";
    case StructureTag::homogeneous: return "homogeneous";
    case StructureTag::linear: return "linear";
    case StructureTag::affine: return "affine";
  }
  return "?";
}

std::string to_string(const Structure& s) {
  if (s.tag == StructureTag::homogeneous)
    return "homogeneous(" + std::to_string(s.degree) + ")";
  return to_string(s.tag);
}

namespace {

template <class S>
S rational_quadratic_eval(const std::vector<std::vector<ScalarField>>& gamma,
                          const std::vector<ScalarField>& beta,
                          std::span<const S> q, std::span<const S> v, S t) {
  const int m = int(v.size());
  std::span<const S> no_v;
  S num = S(0.0);
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < m; ++s) {
      const ScalarField& g = gamma[r][s];
      if (g) num = num + g.eval(q, no_v, t) * v[r] * v[s];
    }
  S den = S(0.0);
  for (int i = 0; i < m; ++i)
    if (beta[i]) den = den + beta[i].eval(q, no_v, t) * v[i];
  return num / den;
}

}  // namespace

ConstraintSet make_rational_quadratic_constraints(
    int n, int m, std::vector<std::vector<std::vector<ScalarField>>> gamma,
    std::vector<std::vector<ScalarField>> beta) {
  if (gamma.size() != beta.size())
    throw SpecError("rational quadratic constraints: gamma/beta count mismatch");
  ConstraintSet cs;
  cs.n = n;
  cs.m = m;
  cs.structure = Structure{StructureTag::homogeneous, 1, ""};
  for (size_t nu = 0; nu < gamma.size(); ++nu) {
    auto g = gamma[nu];
    auto b = beta[nu];
    if (int(g.size()) != m || int(b.size()) != m)
      throw SpecError("rational quadratic constraints: coefficient arity mismatch");
    cs.alpha.emplace_back(
        [g, b](std::span<const double> q, std::span<const double> v, double t) {
          return rational_quadratic_eval<double>(g, b, q, v, t);
        },
        [g, b](std::span<const D1> q, std::span<const D1> v, D1 t) {
          return rational_quadratic_eval<D1>(g, b, q, v, t);
        },
        [g, b](std::span<const D2> q, std::span<const D2> v, D2 t) {
          return rational_quadratic_eval<D2>(g, b, q, v, t);
        });
  }
  return cs;
}

}  // namespace voronec
