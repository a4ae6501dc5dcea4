#include "starform/dual_volume.hpp"

#include <cmath>

#include "starform/error.hpp"
#include "starform/summation.hpp"

namespace starform {

namespace {

template <class F>
double mixed_integral(std::span<const F> fs) {
  if (fs.empty()) throw InvalidArgument("dual mixed volume needs at least one argument");
  const GridPtr& grid = fs.front().grid();
  const int n = grid->dim();
  if (static_cast<int>(fs.size()) != n) {
    throw InvalidArgument("dual mixed volume in dimension " + std::to_string(n) + " takes " +
                          std::to_string(n) + " arguments, got " + std::to_string(fs.size()));
  }
  for (const auto& f : fs) {
    if (!same_grid(f.grid(), grid)) throw GridMismatch();
  }
  CompensatedSum s;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double p = 1.0;
    for (const auto& f : fs) p *= f[i];
    s.add(grid->weight(i) * p);
  }
  return s.value() / n;
}

std::vector<GridFunction> to_signed(std::span<const RadialFunction> fs) {
  std::vector<GridFunction> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(f.as_signed());
  return out;
}

}  // namespace

double MultilinearForm::operator()(std::span<const GridFunction> fs) const {
  if (static_cast<int>(fs.size()) != arity) {
    throw InvalidArgument("form of arity " + std::to_string(arity) + " called with " +
                          std::to_string(fs.size()) + " arguments");
  }
  return eval(fs);
}

double dual_mixed_volume(std::span<const RadialFunction> fs) { return mixed_integral(fs); }

double dual_mixed_form(std::span<const GridFunction> fs) { return mixed_integral(fs); }

MultilinearForm dual_mixed_volume_form(const GridPtr& grid) {
  return {grid->dim(), [](std::span<const GridFunction> fs) { return dual_mixed_form(fs); }};
}

HomogeneousPolynomial volume_polynomial(const GridPtr& grid) {
  const int n = grid->dim();
  return {n, [grid, n](const GridFunction& f) {
            if (!same_grid(f.grid(), grid)) throw GridMismatch();
            CompensatedSum s;
            for (std::size_t i = 0; i < f.size(); ++i) {
              double p = 1.0;
              for (int k = 0; k < n; ++k) p *= f[i];
              s.add(grid->weight(i) * p);
            }
            return s.value() / n;
          }};
}

LutwakReport lutwak_check(std::span<const StarBodySpec> bodies, std::span<const double> lambdas,
                          const GridPtr& grid) {
  const std::size_t m = bodies.size();
  if (m == 0) throw InvalidArgument("Lutwak expansion needs at least one body");
  if (lambdas.size() != m) {
    throw InvalidArgument("got " + std::to_string(m) + " bodies but " +
                          std::to_string(lambdas.size()) + " scales");
  }
  std::vector<RadialFunction> samples;
  samples.reserve(m);
  RadialFunction combined = RadialFunction::zero(grid);
  for (std::size_t i = 0; i < m; ++i) {
    samples.push_back(sample(bodies[i], grid));
    combined = radial_sum(combined, scale(samples.back(), lambdas[i]));
  }
  const double direct = volume(combined);

  // Every ordered tuple (i_1, ..., i_n) in [0, m)^n, odometer order.
  const int n = grid->dim();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<RadialFunction> args(static_cast<std::size_t>(n), samples.front());
  CompensatedSum expanded;
  while (true) {
    double coeff = 1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      coeff *= lambdas[idx[j]];
      args[j] = samples[idx[j]];
    }
    expanded.add(coeff * dual_mixed_volume(args));
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == m) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  const double exp_value = expanded.value();
  return {direct, exp_value, std::abs(direct - exp_value)};
}

double polynomial_value(const MultilinearForm& form, const GridFunction& f) {
  const std::vector<GridFunction> args(static_cast<std::size_t>(form.arity), f);
  return form(args);
}

double polynomial_value(const MultilinearForm& form, const RadialFunction& f) {
  return polynomial_value(form, f.as_signed());
}

double polarize(const HomogeneousPolynomial& poly, std::span<const GridFunction> fs) {
  const int n = poly.degree;
  if (n < 1 || static_cast<int>(fs.size()) != n) {
    throw InvalidArgument("polarization of a degree-" + std::to_string(n) + " polynomial needs " +
                          std::to_string(n) + " arguments, got " + std::to_string(fs.size()));
  }
  const GridPtr& grid = fs.front().grid();
  for (const auto& f : fs) {
    if (!same_grid(f.grid(), grid)) throw GridMismatch();
  }
  const std::size_t size = grid->size();
  CompensatedSum total;
  std::vector<double> combo(size);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    int sign = 1;
    std::fill(combo.begin(), combo.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      const bool negative = (mask >> j) & 1u;
      if (negative) sign = -sign;
      const auto& f = fs[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < size; ++i) combo[i] += negative ? -f[i] : f[i];
    }
    total.add(sign * poly(GridFunction(grid, combo)));
  }
  double norm = std::ldexp(1.0, n);
  for (int k = 2; k <= n; ++k) norm *= k;
  return total.value() / norm;
}

double polarize(const HomogeneousPolynomial& poly, std::span<const RadialFunction> fs) {
  const auto signed_fs = to_signed(fs);
  return polarize(poly, signed_fs);
}

}  // namespace starform
