#include "zosa/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "zosa/errors.hpp"

namespace zosa::bench {

namespace {

constexpr double kPi = std::numbers::pi;

void check(const SyntheticFunction& f, const Vector& theta) {
  if (theta.size() != f.dimension) {
    throw DimensionError(fmt::format("{} expects dimension {}, got {}", to_string(f.kind),
                                     f.dimension, theta.size()));
  }
}

// sin(pi x) with exact zeros at integers; x - round(x) is exact.
double sin_pi(double x) {
  const double n = std::round(x);
  const double s = std::sin(kPi * (x - n));
  return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

double sin2_pi(double x) {
  const double s = sin_pi(x);
  return s * s;
}

double levy_w(double theta) { return 1.0 + (theta - 1.0) / 4.0; }

double levy(const Vector& theta) {
  const std::size_t d = theta.size();
  const double w1 = levy_w(theta[0]);
  double sum = sin2_pi(w1);
  // middle sum over 1-based i = 2 .. d-1
  for (std::size_t i = 1; i + 1 < d; ++i) {
    const double wi = levy_w(theta[i]);
    const double wn = levy_w(theta[i + 1]);
    sum += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * sin2_pi(wn));
  }
  const double wd = levy_w(theta[d - 1]);
  sum += (wd - 1.0) * (wd - 1.0) * (1.0 + sin2_pi(2.0 * wd));
  return sum;
}

std::vector<double> levy_grad(const Vector& theta) {
  const std::size_t d = theta.size();
  std::vector<double> g(d, 0.0);
  // dw/dtheta = 1/4 throughout; accumulate d/dw then scale.
  const double w1 = levy_w(theta[0]);
  g[0] += kPi * sin_pi(2.0 * w1);
  for (std::size_t i = 1; i + 1 < d; ++i) {
    const double wi = levy_w(theta[i]);
    const double wn = levy_w(theta[i + 1]);
    g[i] += 2.0 * (wi - 1.0) * (1.0 + 10.0 * sin2_pi(wn));
    g[i + 1] += (wi - 1.0) * (wi - 1.0) * 10.0 * kPi * sin_pi(2.0 * wn);
  }
  const double wd = levy_w(theta[d - 1]);
  g[d - 1] += 2.0 * (wd - 1.0) * (1.0 + sin2_pi(2.0 * wd)) +
              (wd - 1.0) * (wd - 1.0) * 2.0 * kPi * sin_pi(4.0 * wd);
  for (double& gi : g) gi *= 0.25;
  return g;
}

}  // namespace

std::string_view to_string(FunctionKind kind) noexcept {
  switch (kind) {
    case FunctionKind::quadratic: return "quadratic";
    case FunctionKind::cubic: return "cubic";
    case FunctionKind::levy: return "levy";
    case FunctionKind::rosenbrock: return "rosenbrock";
  }
  return "unknown";
}

FunctionKind parse_function_kind(std::string_view name) {
  for (auto kind : {FunctionKind::quadratic, FunctionKind::cubic, FunctionKind::levy,
                    FunctionKind::rosenbrock}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("function", fmt::format("unknown synthetic function '{}'", name));
}

std::size_t min_dimension(FunctionKind kind) noexcept {
  return (kind == FunctionKind::levy || kind == FunctionKind::rosenbrock) ? 2 : 1;
}

SyntheticFunction::SyntheticFunction(FunctionKind kind_, std::size_t dimension_)
    : kind(kind_), dimension(dimension_) {
  if (dimension < min_dimension(kind)) {
    throw ConfigError("dimension", fmt::format("{} needs dimension >= {}, got {}",
                                               to_string(kind), min_dimension(kind), dimension));
  }
}

double eval_function(const SyntheticFunction& f, const Vector& theta) {
  check(f, theta);
  const std::size_t d = theta.size();
  double sum = 0.0;
  switch (f.kind) {
    case FunctionKind::quadratic:
      for (double x : theta) sum += x * x;
      return 0.5 * sum;
    case FunctionKind::cubic:
      for (double x : theta) sum += std::abs(x) * x * x + 0.5 * x * x;
      return sum;
    case FunctionKind::levy:
      return levy(theta);
    case FunctionKind::rosenbrock:
      for (std::size_t i = 0; i + 1 < d; ++i) {
        const double a = theta[i + 1] - theta[i] * theta[i];
        const double b = 1.0 - theta[i];
        sum += 100.0 * a * a + b * b;
      }
      return sum;
  }
  return sum;
}

Vector eval_gradient(const SyntheticFunction& f, const Vector& theta) {
  check(f, theta);
  const std::size_t d = theta.size();
  std::vector<double> g(d, 0.0);
  switch (f.kind) {
    case FunctionKind::quadratic:
      for (std::size_t i = 0; i < d; ++i) g[i] = theta[i];
      break;
    case FunctionKind::cubic:
      for (std::size_t i = 0; i < d; ++i) {
        const double x = theta[i];
        g[i] = 3.0 * std::abs(x) * x + x;  // 3 sign(x) x^2 + x
      }
      break;
    case FunctionKind::levy:
      g = levy_grad(theta);
      break;
    case FunctionKind::rosenbrock:
      for (std::size_t i = 0; i + 1 < d; ++i) {
        const double a = theta[i + 1] - theta[i] * theta[i];
        g[i] += -400.0 * theta[i] * a - 2.0 * (1.0 - theta[i]);
        g[i + 1] += 200.0 * a;
      }
      break;
  }
  return Vector(std::move(g));
}

double optimality_gap(const SyntheticFunction& f, const Vector& theta) {
  return eval_function(f, theta) - 0.0;
}

double log10_gap(double gap, double floor) noexcept { return std::log10(std::max(gap, floor)); }

Objective make_objective(const SyntheticFunction& f) {
  return Objective(std::string(to_string(f.kind)), f.dimension,
                   [f](const Vector& theta) { return eval_function(f, theta); })
      .with_gradient([f](const Vector& theta) { return eval_gradient(f, theta); })
      .with_optimum(0.0);
}

}  // namespace zosa::bench
