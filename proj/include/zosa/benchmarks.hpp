#pragma once

#include <cstddef>
#include <string_view>

#include "zosa/objective.hpp"
#include "zosa/vector.hpp"

namespace zosa::bench {

enum class FunctionKind { quadratic, cubic, levy, rosenbrock };

std::string_view to_string(FunctionKind kind) noexcept;
FunctionKind parse_function_kind(std::string_view name);

// Minimum dimension the formula needs (2 for levy and rosenbrock, else 1).
std::size_t min_dimension(FunctionKind kind) noexcept;

/// One of the four synthetic test functions. Every kind has minimum value 0:
/// quadratic and cubic at the origin, levy and rosenbrock at all-ones.
struct SyntheticFunction {
  FunctionKind kind;
  std::size_t dimension;

  // Throws ConfigError when dimension is below min_dimension(kind).
  SyntheticFunction(FunctionKind kind, std::size_t dimension);
};

// quadratic   1/2 sum theta_i^2
// cubic       sum |theta_i|^3 + theta_i^2 / 2
// levy        sin^2(pi w_1) + sum_{i=2}^{d-1} (w_i - 1)^2 [1 + 10 sin^2(pi w_{i+1})]
//               + (w_d - 1)^2 [1 + sin^2(2 pi w_d)],    w_i = 1 + (theta_i - 1) / 4
// rosenbrock  sum_{i=1}^{d-1} 100 (theta_{i+1} - theta_i^2)^2 + (1 - theta_i)^2
double eval_function(const SyntheticFunction& f, const Vector& theta);
Vector eval_gradient(const SyntheticFunction& f, const Vector& theta);

// F(theta) - min F, where min F = 0 for every kind.
double optimality_gap(const SyntheticFunction& f, const Vector& theta);

// log10 of a gap for display, floored at `floor` first.
double log10_gap(double gap, double floor = 1e-30) noexcept;

// Objective with analytic gradient and optimum_value() == 0.
Objective make_objective(const SyntheticFunction& f);

}  // namespace zosa::bench
