#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zosa/vector.hpp"

namespace zosa {

/// Black-box loss with an optional analytic gradient and known minimum.
///
/// The evaluation callbacks must be deterministic and thread-safe; Objective
/// itself is an immutable, cheaply copyable handle.
class Objective {
 public:
  using EvalFn = std::function<double(const Vector&)>;
  using BatchEvalFn = std::function<std::vector<double>(std::span<const Vector>)>;
  using GradFn = std::function<Vector(const Vector&)>;

  Objective(std::string name, std::size_t dimension, EvalFn eval);

  // Same objective with an analytic gradient / known optimum / native batch path.
  Objective with_gradient(GradFn grad) const;
  Objective with_optimum(double optimum_value) const;
  Objective with_batch(BatchEvalFn batch) const;

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }
  bool has_gradient() const noexcept { return static_cast<bool>(grad_); }
  const std::optional<double>& optimum_value() const noexcept { return optimum_; }

  // Unchecked, uncounted calls. Use evaluate()/evaluate_batch() in algorithms.
  double raw_eval(const Vector& theta) const { return eval_(theta); }
  std::vector<double> raw_eval_batch(std::span<const Vector> thetas) const;

  // Analytic gradient; throws Error when none is attached.
  Vector gradient(const Vector& theta) const;

 private:
  std::string name_;
  std::size_t dimension_;
  EvalFn eval_;
  BatchEvalFn batch_;
  GradFn grad_;
  std::optional<double> optimum_;
};

enum class Tally { optimization, diagnostic };

/// Thread-safe evaluation counter with a separate diagnostic tally.
///
/// When a budget is set, optimization-tallied evaluations beyond it are
/// refused with BudgetExceeded before the objective is called.
class QueryCounter {
 public:
  explicit QueryCounter(std::optional<std::uint64_t> budget = std::nullopt) : budget_(budget) {}
  QueryCounter(const QueryCounter&) = delete;
  QueryCounter& operator=(const QueryCounter&) = delete;

  void record(Tally tally, std::uint64_t n = 1);

  std::uint64_t optimization() const noexcept { return optimization_.load(); }
  std::uint64_t diagnostic() const noexcept { return diagnostic_.load(); }
  const std::optional<std::uint64_t>& budget() const noexcept { return budget_; }
  // Optimization evaluations still allowed; unbounded when no budget is set.
  std::uint64_t remaining() const noexcept;

 private:
  std::atomic<std::uint64_t> optimization_{0};
  std::atomic<std::uint64_t> diagnostic_{0};
  std::optional<std::uint64_t> budget_;
};

// Counted, checked evaluation. Throws DimensionError on a length mismatch and
// EvaluationError (with the theta fingerprint) on a non-finite loss.
double evaluate(const Objective& obj, const Vector& theta, QueryCounter& counter,
                Tally tally = Tally::optimization);

// As evaluate(), for a batch sent through the objective's batch path in one
// call. Losses come back in input order.
std::vector<double> evaluate_batch(const Objective& obj, std::span<const Vector> thetas,
                                   QueryCounter& counter, Tally tally = Tally::optimization);

}  // namespace zosa
