#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "zosa/benchmarks.hpp"
#include "zosa/errors.hpp"
#include "zosa/objective.hpp"
#include "zosa/parallel.hpp"
#include "zosa/rng.hpp"
#include "zosa/vector.hpp"

using namespace zosa;

TEST_CASE("vector rejects non-finite entries and mismatched lengths") {
  CHECK_THROWS_AS(Vector({1.0, std::nan("")}), NonFiniteError);
  CHECK_THROWS_AS(Vector({INFINITY}), NonFiniteError);
  const Vector a{1.0, 2.0};
  const Vector b{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(a + b, DimensionError);
  CHECK_THROWS_AS(dot(a, b), DimensionError);
  // Overflow in a library operation is caught as well.
  CHECK_THROWS_AS(10.0 * Vector{1e308}, NonFiniteError);
}

TEST_CASE("vector arithmetic") {
  const Vector a{1.0, 2.0};
  const Vector b{3.0, -1.0};
  CHECK(a + b == Vector{4.0, 1.0});
  CHECK(a - b == Vector{-2.0, 3.0});
  CHECK(2.0 * a == Vector{2.0, 4.0});
  CHECK(axpy(2.0, a, b) == Vector{5.0, 3.0});
  CHECK(dot(a, b) == 1.0);
  CHECK(squared_norm(a) == 5.0);
  CHECK(fingerprint(a) == fingerprint(Vector{1.0, 2.0}));
  CHECK(fingerprint(a) != fingerprint(b));
}

TEST_CASE("philox known-answer vectors") {
  using Block = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu}) ==
        Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u}) ==
        Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("rng streams replay and split deterministically") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, 7);
  c.seek(5);
  RngStream d(42, 7);
  for (int i = 0; i < 5; ++i) d.next_block();
  CHECK(c.next_block() == d.next_block());

  const RngStream root(3);
  CHECK(root.split(1) == root.split(1));
  std::set<std::uint64_t> ids;
  for (std::uint64_t k = 0; k < 1000; ++k) ids.insert(root.split(k).stream_id());
  CHECK(ids.size() == 1000);
  RngStream s1 = root.split(1);
  RngStream s2 = root.split(2);
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("uniform draws lie in [0, 1)") {
  RngStream rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("rademacher samples") {
  RngStream rng(11);
  const Vector u = sample_rademacher(5, rng);
  for (double x : u.values()) CHECK((x == 1.0 || x == -1.0));
  CHECK(dot(u, u) == 5.0);

  RngStream again(11);
  CHECK(sample_rademacher(5, again) == u);

  // Per-coordinate means over 1e5 draws: standard error 1/sqrt(1e5) ~ 0.0032.
  const std::size_t d = 100, n = 100000;
  std::vector<double> mean(d, 0.0);
  RngStream many(12);
  for (std::size_t k = 0; k < n; ++k) {
    const Vector v = sample_rademacher(d, many);
    for (std::size_t i = 0; i < d; ++i) mean[i] += v[i];
  }
  for (double m : mean) CHECK(std::abs(m / n) <= 0.02);

  CHECK_THROWS_AS(sample_rademacher(0, rng), ConfigError);
}

TEST_CASE("gaussian samples") {
  RngStream rng(5);
  const std::size_t d = 100000;
  const Vector z = sample_gaussian(d, rng);
  double mean = 0.0;
  for (double x : z.values()) mean += x;
  mean /= d;
  double var = 0.0;
  for (double x : z.values()) var += (x - mean) * (x - mean);
  var /= d - 1;
  CHECK(std::abs(mean) <= 0.02);
  CHECK(var >= 0.98);
  CHECK(var <= 1.02);

  RngStream again(5);
  CHECK(sample_gaussian(d, again) == z);
  CHECK_THROWS_AS(sample_gaussian(0, rng), ConfigError);
}

TEST_CASE("evaluate counts queries and checks its inputs") {
  const Objective quad =
      bench::make_objective(bench::SyntheticFunction(bench::FunctionKind::quadratic, 2));
  QueryCounter counter;
  CHECK(evaluate(quad, Vector{1.0, 1.0}, counter) == 1.0);
  CHECK(evaluate(quad, Vector{1.0, 1.0}, counter) == 1.0);
  CHECK(evaluate(quad, Vector::zeros(2), counter, Tally::diagnostic) == 0.0);
  CHECK(counter.optimization() == 2);
  CHECK(counter.diagnostic() == 1);

  CHECK_THROWS_AS(evaluate(quad, Vector::zeros(3), counter), DimensionError);

  const Objective bad("bad", 1, [](const Vector&) { return std::nan(""); });
  try {
    evaluate(bad, Vector{2.0}, counter);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(e.theta_hash() == fingerprint(Vector{2.0}));
  }
}

TEST_CASE("quadratic is zero at the origin") {
  const Objective quad =
      bench::make_objective(bench::SyntheticFunction(bench::FunctionKind::quadratic, 10));
  QueryCounter counter;
  CHECK(evaluate(quad, Vector::zeros(10), counter) == 0.0);
}

TEST_CASE("query budget is never exceeded") {
  const Objective quad =
      bench::make_objective(bench::SyntheticFunction(bench::FunctionKind::quadratic, 2));
  QueryCounter counter(3);
  for (int i = 0; i < 3; ++i) evaluate(quad, Vector{1.0, 0.0}, counter);
  CHECK(counter.remaining() == 0);
  CHECK_THROWS_AS(evaluate(quad, Vector{1.0, 0.0}, counter), BudgetExceeded);
  CHECK(counter.optimization() == 3);
  // Diagnostics do not draw on the budget.
  CHECK_NOTHROW(evaluate(quad, Vector{1.0, 0.0}, counter, Tally::diagnostic));
}

TEST_CASE("counter is safe under concurrent increments") {
  QueryCounter counter;
  parallel_for(1000, 4, [&](std::size_t) { counter.record(Tally::optimization); });
  CHECK(counter.optimization() == 1000);
}

TEST_CASE("parallel_for fills every slot and rethrows the lowest failure") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 3, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);

  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 17 || i == 33) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected a rethrow");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}
