#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace zosa {

// Root of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration. `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Vector length mismatch between operands, or against an objective's dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A vector was constructed from, or an operation produced, NaN/Inf entries.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Objective evaluation failed: non-finite loss or a misbehaving external peer.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& message, std::uint64_t theta_hash,
                  std::optional<std::uint64_t> iteration = std::nullopt);

  std::uint64_t theta_hash() const noexcept { return theta_hash_; }
  const std::optional<std::uint64_t>& iteration() const noexcept { return iteration_; }
  const std::string& detail() const noexcept { return detail_; }

  // Copy of this error annotated with the optimizer iteration it occurred in.
  EvaluationError at_iteration(std::uint64_t t) const;

 private:
  std::string detail_;
  std::uint64_t theta_hash_;
  std::optional<std::uint64_t> iteration_;
};

// Peer-protocol failures of the external objective adapter (timeout,
// malformed reply, peer-reported error).
class PeerError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

// An optimizer update produced a non-finite parameter vector.
class DivergenceError : public Error {
 public:
  DivergenceError(std::uint64_t iteration, double step_size);

  std::uint64_t iteration() const noexcept { return iteration_; }
  double step_size() const noexcept { return step_size_; }

 private:
  std::uint64_t iteration_;
  double step_size_;
};

// An optimization-tallied evaluation would exceed the configured query budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace zosa
