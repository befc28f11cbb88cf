#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace dflow {

/// Thin RAII wrapper over a connected TCP socket. Reads and writes are
/// usable from different threads concurrently (one reader, any number of
/// writers externally serialized).
class TcpSocket {
  public:
    TcpSocket() = default;
    explicit TcpSocket(int fd) : fd_(fd) {}
    TcpSocket(TcpSocket&& other) noexcept;
    TcpSocket& operator=(TcpSocket&& other) noexcept;
    TcpSocket(const TcpSocket&) = delete;
    TcpSocket& operator=(const TcpSocket&) = delete;
    ~TcpSocket();

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }

    /// Writes the whole buffer; returns false on a broken connection.
    bool write_all(std::span<const std::uint8_t> bytes);

    /// Reads up to `max` bytes; returns byte count, 0 on EOF, -1 on error.
    std::ptrdiff_t read_some(std::span<std::uint8_t> buf);

    /// Makes blocked readers return promptly, then closes.
    void shutdown_and_close();
    void close();

  private:
    int fd_ = -1;
};

/// Listening socket bound to a loopback address with an ephemeral (or
/// caller-chosen) port. Throws dflow::Error on bind failure.
class TcpListener {
  public:
    TcpListener() = default;
    explicit TcpListener(const std::string& address, std::uint16_t port = 0);
    TcpListener(TcpListener&&) noexcept;
    TcpListener& operator=(TcpListener&&) noexcept;
    ~TcpListener();

    std::uint16_t port() const { return port_; }
    const std::string& address() const { return address_; }

    /// Blocks until a client connects; invalid socket after close().
    TcpSocket accept();

    void close();

  private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
    std::string address_;
};

/// Connects to host:port; throws dflow::Error on failure.
TcpSocket tcp_connect(const std::string& host, std::uint16_t port);

}  // namespace dflow
