#include "zosa/harness/external.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <regex>

#include <fmt/format.h>

#include "zosa/errors.hpp"

extern char** environ;

namespace zosa::harness {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void fail(const std::string& message) { throw PeerError(message, 0); }

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

// Owns a file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

}  // namespace

struct PeerSession::Impl {
  std::string context;
  std::chrono::milliseconds timeout;
  Fd to_peer;
  Fd from_peer;
  pid_t child = -1;
  std::string buffer;
  std::uint64_t next_id = 0;
  std::size_t sent = 0;
  bool broken = false;
  std::mutex mutex;

  void spawn(const std::vector<std::string>& command) {
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
      fail(fmt::format("pipe failed: {}", std::strerror(errno)));
    }
    Fd child_stdin(in_pipe[0]), parent_out(in_pipe[1]);
    Fd parent_in(out_pipe[0]), child_stdout(out_pipe[1]);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, child_stdin.get(), STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, child_stdout.get(), STDOUT_FILENO);

    std::vector<char*> argv;
    for (const std::string& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);
    const int rc = ::posix_spawnp(&child, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) fail(fmt::format("cannot start peer: {}", std::strerror(rc)));
    to_peer = std::move(parent_out);
    from_peer = std::move(parent_in);
  }

  void connect_tcp(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0) {
      fail(fmt::format("cannot resolve: {}", ::gai_strerror(rc)));
    }
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, &::freeaddrinfo);
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
      Fd sock(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
      if (sock.get() < 0) continue;
      if (::connect(sock.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
        from_peer = Fd(::dup(sock.get()));
        to_peer = std::move(sock);
        return;
      }
    }
    fail(fmt::format("cannot connect: {}", std::strerror(errno)));
  }

  void write_all(const std::string& data, Clock::time_point deadline) {
    std::size_t done = 0;
    while (done < data.size()) {
      pollfd p{to_peer.get(), POLLOUT, 0};
      const int rc = ::poll(&p, 1, remaining_ms(deadline));
      if (rc == 0) fail(fmt::format("timed out after {} ms writing request", timeout.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        fail(fmt::format("poll failed: {}", std::strerror(errno)));
      }
      const ssize_t n = ::write(to_peer.get(), data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        fail(fmt::format("write failed: {}", std::strerror(errno)));
      }
      done += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(Clock::time_point deadline) {
    while (true) {
      if (const std::size_t nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      pollfd p{from_peer.get(), POLLIN, 0};
      const int rc = ::poll(&p, 1, remaining_ms(deadline));
      if (rc == 0) fail(fmt::format("timed out after {} ms waiting for reply", timeout.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        fail(fmt::format("poll failed: {}", std::strerror(errno)));
      }
      char chunk[65536];
      const ssize_t n = ::read(from_peer.get(), chunk, sizeof chunk);
      if (n == 0) fail("peer closed the connection");
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        fail(fmt::format("read failed: {}", std::strerror(errno)));
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }

  static int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return static_cast<int>(std::max<std::int64_t>(0, left.count()));
  }

  void shutdown() {
    to_peer.reset();
    from_peer.reset();
    if (child > 0) {
      // Give a well-behaved peer a moment to exit on EOF, then kill it.
      for (int i = 0; i < 50; ++i) {
        int status = 0;
        if (::waitpid(child, &status, WNOHANG) == child) {
          child = -1;
          return;
        }
        ::usleep(2000);
      }
      ::kill(child, SIGKILL);
      ::waitpid(child, nullptr, 0);
      child = -1;
    }
  }
};

PeerSession::PeerSession(const ExternalAddress& address) : impl_(std::make_unique<Impl>()) {
  ignore_sigpipe();
  impl_->timeout = address.timeout;
  impl_->context = address.is_process()
                       ? fmt::format("peer process '{}'", address.command.front())
                       : fmt::format("peer {}:{}", address.host, address.port);
  try {
    if (address.is_process()) {
      impl_->spawn(address.command);
    } else {
      impl_->connect_tcp(address.host, address.port);
    }
  } catch (const PeerError& e) {
    throw PeerError(impl_->context + ": " + e.detail(), 0);
  }
}

PeerSession::~PeerSession() { impl_->shutdown(); }

std::size_t PeerSession::requests_sent() const noexcept { return impl_->sent; }

std::string PeerSession::describe() const { return impl_->context; }

std::vector<double> PeerSession::request(std::span<const Vector> thetas) {
  std::lock_guard lock(impl_->mutex);
  if (impl_->broken) {
    throw PeerError(impl_->context + ": session closed after an earlier protocol error", 0);
  }
  const std::uint64_t id = impl_->next_id++;
  const auto deadline = Clock::now() + impl_->timeout;
  try {
    impl_->write_all(encode_request(id, thetas) + "\n", deadline);
    ++impl_->sent;
    const std::string line = impl_->read_line(deadline);
    return decode_response(line, id, thetas.size());
  } catch (const PeerError& e) {
    impl_->broken = true;
    const std::uint64_t hash = thetas.empty() ? 0 : fingerprint(thetas.front());
    throw PeerError(fmt::format("{}: {}", impl_->context, e.detail()), hash);
  }
}

std::string encode_request(std::uint64_t id, std::span<const Vector> thetas) {
  json thetas_json = json::array();
  for (const Vector& t : thetas) thetas_json.push_back(t.data());
  return json{{"id", id}, {"thetas", std::move(thetas_json)}}.dump();
}

std::vector<double> decode_response(const std::string& line, std::uint64_t id, std::size_t count) {
  // JSON has no NaN/Infinity; peers written in Python emit them anyway.
  static const std::regex non_finite(R"((-?)\b(NaN|Infinity)\b)");
  const std::string cleaned = std::regex_replace(line, non_finite, "null");
  json reply;
  try {
    reply = json::parse(cleaned);
  } catch (const json::parse_error&) {
    fail(fmt::format("malformed response line '{}'", line.substr(0, 200)));
  }
  if (!reply.is_object() || !reply.contains("id") || !reply.at("id").is_number_integer()) {
    fail("response lacks an integer \"id\"");
  }
  if (reply.at("id").get<std::uint64_t>() != id) {
    fail(fmt::format("response id {} does not match request id {}",
                             reply.at("id").dump(), id));
  }
  if (reply.contains("error")) {
    const json& err = reply.at("error");
    fail(fmt::format("peer reported failure: {}", err.is_string() ? err.get<std::string>() : err.dump()));
  }
  if (!reply.contains("losses") || !reply.at("losses").is_array()) {
    fail("response lacks a \"losses\" array");
  }
  const json& losses = reply.at("losses");
  if (losses.size() != count) {
    fail(fmt::format("expected {} losses, got {}", count, losses.size()));
  }
  std::vector<double> out;
  out.reserve(count);
  for (const json& l : losses) {
    if (l.is_null()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    } else if (l.is_number()) {
      out.push_back(l.get<double>());
    } else {
      fail(fmt::format("loss value {} is not a number", l.dump()));
    }
  }
  return out;
}

Objective external_objective(const ExternalAddress& address, std::size_t dimension,
                             std::optional<double> optimum) {
  auto session = std::make_shared<PeerSession>(address);
  Objective obj(session->describe(), dimension, [session](const Vector& theta) {
    return session->request(std::span<const Vector>(&theta, 1)).front();
  });
  obj = obj.with_batch([session](std::span<const Vector> thetas) { return session->request(thetas); });
  if (optimum) obj = obj.with_optimum(*optimum);
  return obj;
}

}  // namespace zosa::harness
