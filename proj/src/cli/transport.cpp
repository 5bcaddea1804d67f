#include "slapx/cli/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace slapx::cli {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what + ": " + std::strerror(errno)); }

}  // namespace

Socket::~Socket() {
    if (fd_ >= 0) ::close(fd_);
}

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

Socket Socket::connect(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res); rc != 0) {
        throw std::runtime_error("connect: " + host + ": " + ::gai_strerror(rc));
    }
    Socket s(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    if (s.fd() < 0) {
        ::freeaddrinfo(res);
        fail("socket");
    }
    const int rc = ::connect(s.fd(), res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc != 0) fail("connect " + host + ":" + std::to_string(port));
    const int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return s;
}

void write_all(int fd, protocol::ByteView data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("send");
        }
        off += static_cast<std::size_t>(n);
    }
}

namespace {

// Bytes read before end of stream.
std::size_t read_some(int fd, std::uint8_t* out, std::size_t n) {
    std::size_t off = 0;
    while (off < n) {
        const ssize_t got = ::recv(fd, out + off, n - off, 0);
        if (got < 0) {
            if (errno == EINTR) continue;
            fail("recv");
        }
        if (got == 0) break;
        off += static_cast<std::size_t>(got);
    }
    return off;
}

}  // namespace

void read_exact(int fd, std::uint8_t* out, std::size_t n) {
    if (read_some(fd, out, n) != n) throw std::runtime_error("recv: connection closed mid-message");
}

void send_frame(int fd, const protocol::WireMessage& m) { write_all(fd, protocol::frame(m)); }

bool try_recv_frame(int fd, protocol::WireMessage& out, std::size_t max_payload) {
    std::uint8_t head[protocol::kFrameHeaderBytes];
    const std::size_t got = read_some(fd, head, sizeof head);
    if (got == 0) return false;
    if (got != sizeof head) throw std::runtime_error("recv: truncated frame header");
    std::uint32_t len = 0;
    for (int i = 1; i < 5; ++i) len = (len << 8) | head[i];
    if (len > max_payload) throw std::runtime_error("recv: frame too large");
    protocol::Bytes buf(head, head + sizeof head);
    buf.resize(sizeof head + len);
    read_exact(fd, buf.data() + sizeof head, len);
    auto m = protocol::unframe(buf);
    if (!m) throw std::runtime_error("recv: malformed frame");
    out = std::move(*m);
    return true;
}

protocol::WireMessage recv_frame(int fd, std::size_t max_payload) {
    protocol::WireMessage m;
    if (!try_recv_frame(fd, m, max_payload)) throw std::runtime_error("recv: connection closed");
    return m;
}

FrameServer::FrameServer(std::string host, std::uint16_t port, Handler handler) : handler_(std::move(handler)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) fail("socket");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw std::runtime_error("listen: bad IPv4 address " + host);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 64) != 0) {
        const int e = errno;
        ::close(listen_fd_);
        errno = e;
        fail("listen " + host + ":" + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
}

FrameServer::~FrameServer() { stop(); }

void FrameServer::accept_loop() {
    while (!stopping_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            return;  // listener shut down
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::lock_guard lock(mu_);
        if (stopping_) {
            ::close(fd);
            return;
        }
        open_.insert(fd);
        ++sessions_;
        workers_.emplace_back([this, fd] {
            try {
                handler_(fd);
            } catch (const std::exception&) {
                // A broken session only ends that connection.
            }
            std::lock_guard l(mu_);
            open_.erase(fd);
            ::close(fd);
        });
    }
}

void FrameServer::stop() {
    if (stopping_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    if (acceptor_.joinable()) acceptor_.join();
    ::close(listen_fd_);
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(mu_);
        for (int fd : open_) ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
    }
    for (auto& t : workers) t.join();
}

}  // namespace slapx::cli
