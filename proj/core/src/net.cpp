#include "stripley/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <utility>

namespace stripley::net {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
    throw std::runtime_error("invalid IPv4 address: " + host);
  return addr;
}

}  // namespace

Socket::Socket(Socket&& o) noexcept
    : fd_(std::exchange(o.fd_, -1)), bytes_sent_(o.bytes_sent_),
      bytes_received_(o.bytes_received_) {}

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = std::exchange(o.fd_, -1);
    bytes_sent_ = o.bytes_sent_;
    bytes_received_ = o.bytes_received_;
  }
  return *this;
}

Socket::~Socket() { close(); }

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket Socket::connect_to(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail("socket");
  const sockaddr_in addr = make_addr(host, port);
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    fail("connect");
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return Socket(fd);
}

void Socket::send_all(std::span<const std::uint8_t> data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) fail("send");
    off += static_cast<std::size_t>(n);
  }
  bytes_sent_ += data.size();
}

void Socket::recv_all(std::uint8_t* buf, std::size_t n) {
  std::size_t off = 0;
  while (off < n) {
    const ssize_t r = ::recv(fd_, buf + off, n - off, 0);
    if (r == 0) throw std::runtime_error("connection closed by peer");
    if (r < 0) fail("recv");
    off += static_cast<std::size_t>(r);
  }
  bytes_received_ += n;
}

Listener::Listener(Listener&& o) noexcept
    : fd_(std::exchange(o.fd_, -1)), port_(o.port_) {}

Listener& Listener::operator=(Listener&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(o.fd_, -1);
    port_ = o.port_;
  }
  return *this;
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Listener Listener::bind_on(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail("socket");
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = make_addr(host, port);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    fail("bind");
  }
  if (::listen(fd, 8) != 0) {
    ::close(fd);
    fail("listen");
  }
  socklen_t len = sizeof(addr);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    ::close(fd);
    fail("getsockname");
  }
  Listener l;
  l.fd_ = fd;
  l.port_ = ntohs(addr.sin_port);
  return l;
}

Socket Listener::accept_one() {
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) fail("accept");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return Socket(fd);
}

void send_frame(Socket& sock, std::span<const std::uint8_t> payload) {
  const std::uint32_t len = static_cast<std::uint32_t>(payload.size());
  std::uint8_t header[4] = {static_cast<std::uint8_t>(len >> 24),
                            static_cast<std::uint8_t>(len >> 16),
                            static_cast<std::uint8_t>(len >> 8),
                            static_cast<std::uint8_t>(len)};
  sock.send_all(header);
  sock.send_all(payload);
}

std::vector<std::uint8_t> recv_frame(Socket& sock) {
  std::uint8_t header[4];
  sock.recv_all(header, 4);
  const std::uint32_t len = static_cast<std::uint32_t>(header[0]) << 24 |
                            static_cast<std::uint32_t>(header[1]) << 16 |
                            static_cast<std::uint32_t>(header[2]) << 8 |
                            static_cast<std::uint32_t>(header[3]);
  std::vector<std::uint8_t> payload(len);
  if (len > 0) sock.recv_all(payload.data(), len);
  return payload;
}

}  // namespace stripley::net
