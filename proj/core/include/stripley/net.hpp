#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stripley::net {

/// RAII TCP socket with whole-message helpers and byte counters.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept;
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  static Socket connect_to(const std::string& host, std::uint16_t port);

  void send_all(std::span<const std::uint8_t> data);
  void recv_all(std::uint8_t* buf, std::size_t n);  // throws on EOF/error

  bool valid() const { return fd_ >= 0; }
  void close();

  std::uint64_t bytes_sent() const { return bytes_sent_; }
  std::uint64_t bytes_received() const { return bytes_received_; }

 private:
  int fd_ = -1;
  std::uint64_t bytes_sent_ = 0;
  std::uint64_t bytes_received_ = 0;
};

class Listener {
 public:
  Listener() = default;
  Listener(Listener&& o) noexcept;
  Listener& operator=(Listener&& o) noexcept;
  Listener(const Listener&) = delete;
  ~Listener();

  /// Bind on host:port; port 0 picks an ephemeral port (see port()).
  static Listener bind_on(const std::string& host, std::uint16_t port);
  Socket accept_one();
  std::uint16_t port() const { return port_; }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Length-framed message transfer (4-byte big-endian prefix, as in codec).
void send_frame(Socket& sock, std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> recv_frame(Socket& sock);

}  // namespace stripley::net
