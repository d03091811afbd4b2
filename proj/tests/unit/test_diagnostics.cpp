#include <cmath>
#include <vector>

#include "doctest.h"
#include "zosa/benchmarks.hpp"
#include "zosa/diagnostics.hpp"
#include "zosa/errors.hpp"

using namespace zosa;
using namespace zosa::diag;

namespace {

Objective bench_objective(bench::FunctionKind kind, std::size_t d) {
  return bench::make_objective(bench::SyntheticFunction(kind, d));
}

}  // namespace

TEST_CASE("cosine similarity") {
  CHECK(cosine_similarity(Vector{1.0, 2.0}, Vector{1.0, 2.0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity(Vector{1.0, 0.0}, Vector{0.0, 1.0}) == 0.0);
  CHECK(cosine_similarity(Vector{1.0, 1.0}, Vector{1.0, 0.0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(cosine_similarity(Vector::zeros(2), Vector{1.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(Vector{1.0}, Vector{1.0, 0.0}), DimensionError);
}

TEST_CASE("law report relative error") {
  CHECK(make_law_report(1.1, 1.0, 5).relative_error == doctest::Approx(0.1));
  CHECK(make_law_report(0.0, 0.0, 5).relative_error == 0.0);
  CHECK(predicted_alignment(1000, 100) == doctest::Approx(std::sqrt(1000.0 / 1099.0)));
  CHECK(predicted_alignment(1, 1) == 1.0);
}

TEST_CASE("alignment in one dimension is always +-1") {
  QueryCounter counter;
  const GradientAlignment r = gradient_alignment_study(
      bench_objective(bench::FunctionKind::quadratic, 1), EstimatorConfig{1e-3, 1}, 1e-5, 50, 3,
      counter);
  CHECK(r.initial.predicted_cos == 1.0);
  CHECK(r.initial.max_cos == doctest::Approx(1.0));
  CHECK(std::abs(r.initial.mean_cos) <= 1.0);
  CHECK(r.initial.mean_cos <= r.initial.max_cos);
  CHECK(counter.optimization() == 0);
  CHECK(counter.diagnostic() == 50 * 4);
}

TEST_CASE("alignment grows with m") {
  QueryCounter counter;
  const Objective q = bench_objective(bench::FunctionKind::quadratic, 100);
  const double low = gradient_alignment_study(q, EstimatorConfig{1e-3, 8}, 1e-5, 50, 1, counter)
                         .initial.mean_cos;
  const double high = gradient_alignment_study(q, EstimatorConfig{1e-3, 128}, 1e-5, 50, 1, counter)
                          .initial.mean_cos;
  CHECK(high > low);
}

TEST_CASE("sigma law is exact on the constant objective") {
  QueryCounter counter;
  const LawReport r = sigma_law_study(constant_objective(5, 2.0), EstimatorConfig{1e-3, 8},
                                      Vector::filled(5, 1.0), 100, 0, counter);
  CHECK(r.empirical == 0.0);
  CHECK(r.predicted == 0.0);
  CHECK(r.relative_error == 0.0);
}

TEST_CASE("sigma law on the quadratic") {
  QueryCounter counter;
  const LawReport r = sigma_law_study(bench_objective(bench::FunctionKind::quadratic, 10),
                                      EstimatorConfig{1e-3, 32}, Vector::filled(10, 1.0), 10000,
                                      0, counter);
  CHECK(r.predicted == doctest::Approx(1e-5));
  CHECK(r.relative_error <= 0.02);
}

TEST_CASE("sigma squared scales with epsilon squared on the cubic") {
  QueryCounter counter;
  const Objective cubic = bench_objective(bench::FunctionKind::cubic, 10);
  const Vector theta{0.5, -1.0, 0.3, 1.2, -0.7, 0.9, -0.2, 0.4, -1.5, 0.8};
  std::vector<double> eps, sig;
  for (double e : {4e-3, 2e-3, 1e-3, 5e-4}) {
    eps.push_back(e);
    sig.push_back(sigma_law_study(cubic, EstimatorConfig{e, 32}, theta, 2000, 4, counter).empirical);
  }
  CHECK(loglog_slope(eps, sig) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("mse law on a linear objective") {
  QueryCounter counter;
  const Objective lin = linear_objective(Vector::filled(20, 1.0));
  const LawReport r = mse_law_study(lin, EstimatorConfig{1e-3, 5}, Vector::zeros(20), 10000, 0, counter);
  CHECK(r.predicted == doctest::Approx(19.0 * 20.0 / 5.0));
  CHECK(r.relative_error <= 0.05);
}

TEST_CASE("mse halves when m doubles on the quadratic") {
  QueryCounter counter;
  const Objective q = bench_objective(bench::FunctionKind::quadratic, 50);
  const Vector theta = Vector::filled(50, 0.5);
  const double m10 = mse_law_study(q, EstimatorConfig{1e-3, 10}, theta, 10000, 1, counter).empirical;
  const double m20 = mse_law_study(q, EstimatorConfig{1e-3, 20}, theta, 10000, 2, counter).empirical;
  CHECK(m10 / m20 >= 1.8);
  CHECK(m10 / m20 <= 2.2);
}

TEST_CASE("mse is tiny where the gradient vanishes") {
  QueryCounter counter;
  const LawReport r = mse_law_study(bench_objective(bench::FunctionKind::quadratic, 10),
                                    EstimatorConfig{1e-3, 8}, Vector::zeros(10), 1000, 0, counter);
  CHECK(r.empirical <= 1e-4);
}

TEST_CASE("sam direction aligns with the normalized gradient") {
  QueryCounter counter;
  const Objective q = bench_objective(bench::FunctionKind::quadratic, 100);
  const SamAlignmentReport few = sam_alignment_study(q, EstimatorConfig{1e-3, 4}, 1e-5, 30, 0, counter);
  const SamAlignmentReport many = sam_alignment_study(q, EstimatorConfig{1e-3, 1000}, 1e-5, 30, 0, counter);
  CHECK(many.alignment.mean_cos > few.alignment.mean_cos);
  CHECK(many.alignment.mean_cos >= 0.9);
  // |eps_sam| = rho |g| / sigma ~ rho / epsilon, since sigma ~ epsilon |grad L|.
  CHECK(many.mean_scaled_radius_ratio == doctest::Approx(1.0).epsilon(0.25));
  CHECK(many.mean_radius_ratio == doctest::Approx(many.mean_scaled_radius_ratio / 1e-3));

  const SamAlignmentReport one_d = sam_alignment_study(
      bench_objective(bench::FunctionKind::quadratic, 1), EstimatorConfig{1e-3, 32}, 1e-5, 20, 0, counter);
  CHECK(std::abs(one_d.alignment.mean_cos) == doctest::Approx(1.0));
}

TEST_CASE("studies are independent of the worker count") {
  QueryCounter counter;
  const Objective q = bench_objective(bench::FunctionKind::levy, 20);
  const GradientAlignment serial =
      gradient_alignment_study(q, EstimatorConfig{1e-3, 16}, 1e-5, 40, 6, counter, 1);
  const GradientAlignment threaded =
      gradient_alignment_study(q, EstimatorConfig{1e-3, 16}, 1e-5, 40, 6, counter, 4);
  CHECK(serial.initial.mean_cos == threaded.initial.mean_cos);
  CHECK(serial.perturbed.max_cos == threaded.perturbed.max_cos);
}

TEST_CASE("loglog slope of a power law") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  const std::vector<double> y{3.0, 12.0, 48.0, 192.0};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
}
