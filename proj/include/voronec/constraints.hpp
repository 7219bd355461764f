#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voronec/fields.hpp"

namespace voronec {

enum class StructureTag { general, homogeneous, linear, affine };

std::string to_string(StructureTag tag);

/// Structural classification of the constraint functions in the independent
/// velocities. linear implies homogeneous of degree 1.
struct Structure {
  StructureTag tag = StructureTag::general;
  int degree = 0;          ///< homogeneity degree when tag == homogeneous
  std::string diagnostic;  ///< non-empty when sampling behaviour was inconsistent

  bool homogeneous_degree1() const {
    return tag == StructureTag::linear ||
           (tag == StructureTag::homogeneous && degree == 1);
  }
};

std::string to_string(const Structure& s);

/// k explicit velocity constraints qdot_{m+nu} = alpha_nu(q, v, t).
struct ConstraintSet {
  int n = 0;  ///< coordinate count of the ambient chart
  int m = 0;  ///< independent velocity count
  std::vector<ScalarField> alpha;  ///< k fields over (q in R^n, v in R^m, t)
  Structure structure;

  /// Declared coefficients for linear/affine constraints:
  /// alpha_nu = sum_j linear_coeff[nu][j](q,t) * v_j + affine_offset[nu](t).
  std::vector<std::vector<ScalarField>> linear_coeff;
  std::vector<ScalarField> affine_offset;

  int k() const { return static_cast<int>(alpha.size()); }
};

/// Builds the explicit form of rational homogeneous-quadratic constraints
///   alpha_nu = (sum_{r,s} gamma[nu][r][s] v_r v_s) / (sum_i beta[nu][i] v_i)
/// from coefficient fields over (q, t). The result is homogeneous of
/// degree 1 in v by construction.
ConstraintSet make_rational_quadratic_constraints(
    int n, int m,
    std::vector<std::vector<std::vector<ScalarField>>> gamma,
    std::vector<std::vector<ScalarField>> beta);

}  // namespace voronec
