#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "zosa/harness/config.hpp"
#include "zosa/objective.hpp"

namespace zosa::harness {

/// Line-delimited JSON request/response channel to an objective peer.
///
///   request   {"id": <int>, "thetas": [[<float>...], ...]}
///   response  {"id": <int>, "losses": [<float>, ...]}
///          or {"id": <int>, "error": "<msg>"}
///
/// One response line per request line, losses in the order of thetas. Bare
/// NaN / Infinity tokens in a reply are accepted and decoded as non-finite
/// losses so that the evaluation layer can reject them. Any protocol
/// violation or timeout raises PeerError and leaves the session closed.
/// Requests are serialized; the session is safe to share between threads.
class PeerSession {
 public:
  explicit PeerSession(const ExternalAddress& address);
  ~PeerSession();
  PeerSession(const PeerSession&) = delete;
  PeerSession& operator=(const PeerSession&) = delete;

  std::vector<double> request(std::span<const Vector> thetas);

  std::size_t requests_sent() const noexcept;
  std::string describe() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Encodes a request line (without the trailing newline).
std::string encode_request(std::uint64_t id, std::span<const Vector> thetas);

// Decodes a response line for request `id` expecting `count` losses.
std::vector<double> decode_response(const std::string& line, std::uint64_t id, std::size_t count);

// Objective whose evaluations go to the peer; batches travel as one request.
Objective external_objective(const ExternalAddress& address, std::size_t dimension,
                             std::optional<double> optimum = std::nullopt);

}  // namespace zosa::harness
