#include "zosa/errors.hpp"

#include <fmt/format.h>

namespace zosa {

namespace {

std::string describe(const std::string& message, std::uint64_t theta_hash,
                     const std::optional<std::uint64_t>& iteration) {
  if (iteration) {
    return fmt::format("{} (theta #{:016x}, iteration {})", message, theta_hash, *iteration);
  }
  return fmt::format("{} (theta #{:016x})", message, theta_hash);
}

}  // namespace

EvaluationError::EvaluationError(const std::string& message, std::uint64_t theta_hash,
                                 std::optional<std::uint64_t> iteration)
    : Error(describe(message, theta_hash, iteration)),
      detail_(message),
      theta_hash_(theta_hash),
      iteration_(iteration) {}

EvaluationError EvaluationError::at_iteration(std::uint64_t t) const {
  return EvaluationError(detail_, theta_hash_, t);
}

DivergenceError::DivergenceError(std::uint64_t iteration, double step_size)
    : Error(fmt::format("update diverged at iteration {} (step size {:.17g})", iteration,
                        step_size)),
      iteration_(iteration),
      step_size_(step_size) {}

}  // namespace zosa
