#include "trident/wire/stream.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "trident/error.hpp"

namespace trident::wire {

namespace {

/// One direction of an in-process pipe.
struct Channel {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::uint8_t> bytes;
    bool closed = false;
};

class PipeEnd final : public ByteStream {
public:
    PipeEnd(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out) : in_(std::move(in)), out_(std::move(out)) {}
    ~PipeEnd() override { close(); }

    void write_all(std::span<const std::uint8_t> data) override {
        std::lock_guard lock(out_->mutex);
        if (out_->closed) {
            throw Error(Errc::IoError, "write to closed pipe");
        }
        out_->bytes.insert(out_->bytes.end(), data.begin(), data.end());
        out_->ready.notify_all();
    }

    void read_exact(std::span<std::uint8_t> out) override {
        std::unique_lock lock(in_->mutex);
        in_->ready.wait(lock, [&] { return in_->bytes.size() >= out.size() || in_->closed; });
        if (in_->bytes.size() < out.size()) {
            throw Error(Errc::ShortRead, "peer closed");
        }
        std::copy_n(in_->bytes.begin(), out.size(), out.begin());
        in_->bytes.erase(in_->bytes.begin(), in_->bytes.begin() + static_cast<std::ptrdiff_t>(out.size()));
    }

    void close() override {
        std::lock_guard lock(out_->mutex);
        out_->closed = true;
        out_->ready.notify_all();
    }

private:
    std::shared_ptr<Channel> in_;
    std::shared_ptr<Channel> out_;
};

[[noreturn]] void sys_error(const std::string& what) {
    throw Error(Errc::IoError, what + ": " + std::strerror(errno));
}

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe() {
    auto a_to_b = std::make_shared<Channel>();
    auto b_to_a = std::make_shared<Channel>();
    return {std::make_unique<PipeEnd>(b_to_a, a_to_b), std::make_unique<PipeEnd>(a_to_b, b_to_a)};
}

TcpStream::~TcpStream() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void TcpStream::write_all(std::span<const std::uint8_t> data) {
    while (!data.empty()) {
        const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            sys_error("send");
        }
        data = data.subspan(static_cast<std::size_t>(n));
    }
}

void TcpStream::read_exact(std::span<std::uint8_t> out) {
    while (!out.empty()) {
        const ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
        if (n == 0) {
            throw Error(Errc::ShortRead, "peer closed");
        }
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            sys_error("recv");
        }
        out = out.subspan(static_cast<std::size_t>(n));
    }
}

void TcpStream::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_WR);
    }
}

std::unique_ptr<TcpStream> connect_tcp(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) {
        sys_error("socket");
    }
    auto stream = std::make_unique<TcpStream>(fd);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw Error(Errc::IoError, "bad IPv4 address " + host);
    }
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        sys_error("connect " + host + ":" + std::to_string(port));
    }
    return stream;
}

TcpListener::TcpListener(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) {
        sys_error("socket");
    }
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 64) != 0) {
        const int saved = errno;
        ::close(fd_);
        errno = saved;
        sys_error("bind/listen on port " + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

std::unique_ptr<TcpStream> TcpListener::accept(int timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready <= 0) {
        return nullptr;
    }
    const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
        return nullptr;
    }
    return std::make_unique<TcpStream>(fd);
}

void send_message(ByteStream& stream, const Message& message) { stream.write_all(encode_frame(message)); }

Message receive_message(ByteStream& stream, std::vector<std::uint8_t>& raw_frame) {
    std::array<std::uint8_t, kFrameHeaderSize> header{};
    stream.read_exact(header);
    const std::uint32_t n = read_length_prefix(header);
    if (n > kMaxFramePayload) {
        throw Error(Errc::Oversize, std::to_string(n) + " byte payload");
    }
    raw_frame.assign(header.begin(), header.end());
    raw_frame.resize(kFrameHeaderSize + n);
    stream.read_exact(std::span(raw_frame).subspan(kFrameHeaderSize));
    return decode_frame(raw_frame).message;
}

Message receive_message(ByteStream& stream) {
    std::vector<std::uint8_t> raw;
    return receive_message(stream, raw);
}

}  // namespace trident::wire
