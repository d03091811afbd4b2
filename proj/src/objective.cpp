#include "zosa/objective.hpp"

#include <cmath>

#include <fmt/format.h>

#include "zosa/errors.hpp"

namespace zosa {

Objective::Objective(std::string name, std::size_t dimension, EvalFn eval)
    : name_(std::move(name)), dimension_(dimension), eval_(std::move(eval)) {
  if (dimension_ == 0) throw ConfigError("dimension", "objective dimension must be positive");
  if (!eval_) throw ConfigError("eval", "objective needs an evaluation function");
}

Objective Objective::with_gradient(GradFn grad) const {
  Objective copy = *this;
  copy.grad_ = std::move(grad);
  return copy;
}

Objective Objective::with_optimum(double optimum_value) const {
  Objective copy = *this;
  copy.optimum_ = optimum_value;
  return copy;
}

Objective Objective::with_batch(BatchEvalFn batch) const {
  Objective copy = *this;
  copy.batch_ = std::move(batch);
  return copy;
}

std::vector<double> Objective::raw_eval_batch(std::span<const Vector> thetas) const {
  if (batch_) return batch_(thetas);
  std::vector<double> out;
  out.reserve(thetas.size());
  for (const Vector& theta : thetas) out.push_back(eval_(theta));
  return out;
}

Vector Objective::gradient(const Vector& theta) const {
  if (!grad_) throw Error(fmt::format("objective '{}' has no analytic gradient", name_));
  if (theta.size() != dimension_) {
    throw DimensionError(fmt::format("theta has length {}, objective '{}' expects {}",
                                     theta.size(), name_, dimension_));
  }
  Vector g = grad_(theta);
  if (g.size() != dimension_) {
    throw DimensionError(fmt::format("gradient of '{}' has length {}, expected {}", name_,
                                     g.size(), dimension_));
  }
  return g;
}

void QueryCounter::record(Tally tally, std::uint64_t n) {
  if (tally == Tally::diagnostic) {
    diagnostic_.fetch_add(n);
    return;
  }
  if (!budget_) {
    optimization_.fetch_add(n);
    return;
  }
  std::uint64_t current = optimization_.load();
  do {
    if (current + n > *budget_) {
      throw BudgetExceeded(fmt::format("query budget {} exhausted ({} used, {} requested)",
                                       *budget_, current, n));
    }
  } while (!optimization_.compare_exchange_weak(current, current + n));
}

std::uint64_t QueryCounter::remaining() const noexcept {
  if (!budget_) return UINT64_MAX;
  const std::uint64_t used = optimization_.load();
  return used >= *budget_ ? 0 : *budget_ - used;
}

namespace {

void check_dimension(const Objective& obj, const Vector& theta) {
  if (theta.size() != obj.dimension()) {
    throw DimensionError(fmt::format("theta has length {}, objective '{}' expects {}",
                                     theta.size(), obj.name(), obj.dimension()));
  }
}

void check_loss(const Objective& obj, const Vector& theta, double loss) {
  if (!std::isfinite(loss)) {
    throw EvaluationError(fmt::format("objective '{}' returned non-finite loss {}", obj.name(), loss),
                          fingerprint(theta));
  }
}

}  // namespace

double evaluate(const Objective& obj, const Vector& theta, QueryCounter& counter, Tally tally) {
  check_dimension(obj, theta);
  counter.record(tally);
  const double loss = obj.raw_eval(theta);
  check_loss(obj, theta, loss);
  return loss;
}

std::vector<double> evaluate_batch(const Objective& obj, std::span<const Vector> thetas,
                                   QueryCounter& counter, Tally tally) {
  for (const Vector& theta : thetas) check_dimension(obj, theta);
  counter.record(tally, thetas.size());
  std::vector<double> losses = obj.raw_eval_batch(thetas);
  if (losses.size() != thetas.size()) {
    throw EvaluationError(fmt::format("objective '{}' returned {} losses for {} points",
                                      obj.name(), losses.size(), thetas.size()),
                          thetas.empty() ? 0 : fingerprint(thetas.front()));
  }
  for (std::size_t i = 0; i < thetas.size(); ++i) check_loss(obj, thetas[i], losses[i]);
  return losses;
}

}  // namespace zosa
