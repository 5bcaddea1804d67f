#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "slapx/protocol/wire.hpp"

namespace slapx::cli {

/// Owning TCP socket descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    /// Throws std::runtime_error if the connection fails.
    static Socket connect(const std::string& host, std::uint16_t port);
    int fd() const { return fd_; }

private:
    int fd_ = -1;
};

// Blocking I/O. All throw std::runtime_error on a short read, a write error or a bad frame.
void write_all(int fd, protocol::ByteView data);
void read_exact(int fd, std::uint8_t* out, std::size_t n);
void send_frame(int fd, const protocol::WireMessage& m);
protocol::WireMessage recv_frame(int fd, std::size_t max_payload = 1u << 20);
/// False on a clean end of stream before the first byte.
bool try_recv_frame(int fd, protocol::WireMessage& out, std::size_t max_payload = 1u << 20);

/// Listener with an accept thread and one thread per connection.
class FrameServer {
public:
    using Handler = std::function<void(int fd)>;

    /// Binds `host:port`; port 0 picks a free port. Throws std::runtime_error.
    FrameServer(std::string host, std::uint16_t port, Handler handler);
    ~FrameServer();
    FrameServer(const FrameServer&) = delete;
    FrameServer& operator=(const FrameServer&) = delete;

    std::uint16_t port() const { return port_; }
    std::uint64_t sessions() const { return sessions_.load(); }
    /// Closes the listener and every open session, then joins the threads.
    void stop();

private:
    void accept_loop();

    Handler handler_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::atomic<std::uint64_t> sessions_{0};
    std::thread acceptor_;
    std::mutex mu_;
    std::set<int> open_;
    std::vector<std::thread> workers_;
};

}  // namespace slapx::cli
