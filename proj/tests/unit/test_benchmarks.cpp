#include <cmath>
#include <vector>

#include "doctest.h"
#include "zosa/benchmarks.hpp"
#include "zosa/errors.hpp"
#include "zosa/rng.hpp"

using namespace zosa;
using namespace zosa::bench;

namespace {

constexpr FunctionKind kKinds[] = {FunctionKind::quadratic, FunctionKind::cubic,
                                   FunctionKind::levy, FunctionKind::rosenbrock};

double at(FunctionKind kind, std::vector<double> theta) {
  const std::size_t d = theta.size();
  return eval_function(SyntheticFunction(kind, d), Vector(std::move(theta)));
}

Vector central_difference(const SyntheticFunction& f, const Vector& theta, double h) {
  std::vector<double> g(theta.size());
  std::vector<double> x(theta.values().begin(), theta.values().end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double up = eval_function(f, Vector(x));
    x[i] = xi - h;
    const double down = eval_function(f, Vector(x));
    x[i] = xi;
    g[i] = (up - down) / (2.0 * h);
  }
  return Vector(std::move(g));
}

}  // namespace

TEST_CASE("hand-computed function values") {
  CHECK(at(FunctionKind::quadratic, std::vector<double>(10, 0.0)) == 0.0);
  CHECK(at(FunctionKind::quadratic, {1.0, 1.0}) == 1.0);
  CHECK(at(FunctionKind::rosenbrock, std::vector<double>(50, 1.0)) == 0.0);
  CHECK(at(FunctionKind::rosenbrock, {0.0, 0.0}) == 1.0);
  CHECK(at(FunctionKind::rosenbrock, {0.5, -1.0, 2.0}) == doctest::Approx(260.5));
  CHECK(at(FunctionKind::cubic, {1.0}) == 1.5);
  CHECK(at(FunctionKind::cubic, {-2.0, 0.0}) == 10.0);
  for (std::size_t d : {2, 3, 7, 100}) CHECK(at(FunctionKind::levy, std::vector<double>(d, 1.0)) == 0.0);
  // Reference values from an independent high-precision evaluation.
  CHECK(at(FunctionKind::levy, {0.5, -1.0, 2.0}) == doctest::Approx(1.7714466094067262).epsilon(1e-13));
  CHECK(at(FunctionKind::levy, {3.0, 0.0, 0.0, 0.0}) == doctest::Approx(1.875).epsilon(1e-13));
  // d = 2: the middle sum is empty.
  CHECK(at(FunctionKind::levy, {0.0, 0.0}) == doctest::Approx(0.625).epsilon(1e-13));
}

TEST_CASE("optimality gap") {
  const SyntheticFunction quad(FunctionKind::quadratic, 2);
  CHECK(optimality_gap(quad, Vector::zeros(2)) == 0.0);
  CHECK(optimality_gap(quad, Vector{2.0, 0.0}) == 2.0);
  CHECK(optimality_gap(SyntheticFunction(FunctionKind::rosenbrock, 4), Vector::filled(4, 1.0)) == 0.0);
  CHECK(log10_gap(0.0) == -30.0);
  CHECK(log10_gap(100.0) == doctest::Approx(2.0));
}

TEST_CASE("known minimizers have zero gradient") {
  CHECK(eval_gradient(SyntheticFunction(FunctionKind::quadratic, 5), Vector::zeros(5)) == Vector::zeros(5));
  CHECK(eval_gradient(SyntheticFunction(FunctionKind::cubic, 5), Vector::zeros(5)) == Vector::zeros(5));
  CHECK(eval_gradient(SyntheticFunction(FunctionKind::rosenbrock, 5), Vector::filled(5, 1.0)) ==
        Vector::zeros(5));
  const Vector levy_g = eval_gradient(SyntheticFunction(FunctionKind::levy, 5), Vector::filled(5, 1.0));
  CHECK(norm(levy_g) <= 1e-15);
  const Vector theta{0.3, -2.0, 1.5};
  CHECK(eval_gradient(SyntheticFunction(FunctionKind::quadratic, 3), theta) == theta);
}

TEST_CASE("analytic gradients agree with central differences") {
  RngStream rng(2024);
  for (FunctionKind kind : kKinds) {
    for (std::size_t d : {2, 10, 100}) {
      CAPTURE(to_string(kind));
      CAPTURE(d);
      const SyntheticFunction f(kind, d);
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const Vector theta = sample_gaussian(d, rng);
        const Vector analytic = eval_gradient(f, theta);
        const Vector fd = central_difference(f, theta, 1e-6);
        worst = std::max(worst, norm(fd - analytic) / std::max(norm(analytic), 1e-12));
      }
      CHECK(worst <= 1e-5);
    }
  }
}

TEST_CASE("functions are non-negative") {
  RngStream rng(31);
  for (FunctionKind kind : kKinds) {
    const SyntheticFunction f(kind, 20);
    for (int k = 0; k < 1000; ++k) {
      const Vector theta = 3.0 * sample_gaussian(20, rng);
      REQUIRE(eval_function(f, theta) >= 0.0);
    }
  }
}

TEST_CASE("dimension checks") {
  CHECK_THROWS_AS(SyntheticFunction(FunctionKind::levy, 1), ConfigError);
  CHECK_THROWS_AS(SyntheticFunction(FunctionKind::rosenbrock, 1), ConfigError);
  CHECK_THROWS_AS(SyntheticFunction(FunctionKind::quadratic, 0), ConfigError);
  CHECK_THROWS_AS(eval_function(SyntheticFunction(FunctionKind::cubic, 3), Vector::zeros(2)),
                  DimensionError);
  CHECK_THROWS_AS(parse_function_kind("sphere"), ConfigError);
}

TEST_CASE("objective wrapper exposes gradient and optimum") {
  const Objective obj = make_objective(SyntheticFunction(FunctionKind::rosenbrock, 3));
  CHECK(obj.dimension() == 3);
  CHECK(obj.has_gradient());
  CHECK(obj.optimum_value() == 0.0);
  CHECK(obj.name() == "rosenbrock");
}
