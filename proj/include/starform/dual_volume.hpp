#pragma once

#include <functional>
#include <span>
#include <vector>

#include "starform/star_body.hpp"

namespace starform {

/// An m-linear evaluator on (signed) grid functions.
struct MultilinearForm {
  int arity;
  std::function<double(std::span<const GridFunction>)> eval;

  double operator()(std::span<const GridFunction> fs) const;
};

/// A homogeneous evaluator of the given degree on (signed) grid functions.
struct HomogeneousPolynomial {
  int degree;
  std::function<double(const GridFunction&)> eval;

  double operator()(const GridFunction& f) const { return eval(f); }
};

/// (1/n) * sum_i w_i * prod_j fs_j(i), n = grid dimension = fs.size().
double dual_mixed_volume(std::span<const RadialFunction> fs);

/// The same integral over signed grid functions; the multilinear extension.
double dual_mixed_form(std::span<const GridFunction> fs);

/// dual_mixed_form as an evaluator on `grid`.
MultilinearForm dual_mixed_volume_form(const GridPtr& grid);

/// f -> (1/n) * sum_i w_i f_i^n, the volume extended to signed functions.
HomogeneousPolynomial volume_polynomial(const GridPtr& grid);

struct LutwakReport {
  double direct;
  double expanded;
  double abs_diff;
};

/// Volume of the radial combination sum_i lambda_i L_i, computed directly
/// and through the expansion over all m^n ordered index tuples.
LutwakReport lutwak_check(std::span<const StarBodySpec> bodies, std::span<const double> lambdas,
                          const GridPtr& grid);

/// T(f, ..., f).
double polynomial_value(const MultilinearForm& form, const GridFunction& f);
double polynomial_value(const MultilinearForm& form, const RadialFunction& f);

/// Symmetric multilinear form recovered from an n-homogeneous P:
/// 1 / (n! 2^n) * sum over eps in {-1,1}^n of eps_1...eps_n * P(sum_j eps_j f_j).
/// Equal arguments return P(f).
double polarize(const HomogeneousPolynomial& poly, std::span<const GridFunction> fs);
double polarize(const HomogeneousPolynomial& poly, std::span<const RadialFunction> fs);

}  // namespace starform
