#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace emgpal::transport {

/// "host:port" endpoint. Port 0 asks the OS for an ephemeral port when listening.
struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// Throws ConfigError on malformed input.
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
};

/// Environment variable that overrides the receiver's listen address.
inline constexpr const char* kListenEnvVar = "EMGPAL_LISTEN";

/// Owning TCP socket. Move-only.
class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(int fd) : fd_(fd) {}
  TcpStream(TcpStream&& other) noexcept;
  TcpStream& operator=(TcpStream&& other) noexcept;
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;
  ~TcpStream();

  /// Throws TransportError if the connection cannot be established.
  static TcpStream connect(const Endpoint& ep);

  /// Throws TransportError on reset / broken pipe.
  void write_all(std::span<const std::uint8_t> bytes);

  /// Returns 0 on orderly shutdown. Throws TransportError on error.
  std::size_t read_some(std::span<std::uint8_t> buf);

  void shutdown_write();
  /// Shuts down both directions, waking any thread blocked in read_some.
  void interrupt();
  void close();
  bool is_open() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

class TcpListener {
 public:
  /// Binds and listens. Throws TransportError on failure.
  explicit TcpListener(const Endpoint& ep);
  TcpListener(TcpListener&&) noexcept;
  TcpListener& operator=(TcpListener&&) noexcept;
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener();

  std::uint16_t port() const { return port_; }
  TcpStream accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace emgpal::transport
