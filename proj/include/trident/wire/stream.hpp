#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "trident/wire/frame.hpp"

namespace trident::wire {

/// Bidirectional byte stream. read_exact throws Error(Errc::ShortRead) when
/// the peer closes before `out` is filled.
class ByteStream {
public:
    virtual ~ByteStream() = default;
    virtual void write_all(std::span<const std::uint8_t> data) = 0;
    virtual void read_exact(std::span<std::uint8_t> out) = 0;
    /// Closes the write direction; the peer sees end-of-stream.
    virtual void close() = 0;
};

/// Connected in-process pair for deterministic tests.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe();

class TcpStream final : public ByteStream {
public:
    explicit TcpStream(int fd) : fd_(fd) {}
    ~TcpStream() override;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;

    void write_all(std::span<const std::uint8_t> data) override;
    void read_exact(std::span<std::uint8_t> out) override;
    void close() override;

private:
    int fd_;
};

std::unique_ptr<TcpStream> connect_tcp(const std::string& host, std::uint16_t port);

class TcpListener {
public:
    /// Binds 127.0.0.1:port; port 0 picks an ephemeral port.
    explicit TcpListener(std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    /// Waits up to `timeout_ms`; returns nullptr on timeout.
    std::unique_ptr<TcpStream> accept(int timeout_ms);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

void send_message(ByteStream& stream, const Message& message);

/// Reads one frame. Oversize is detected from the header before the payload is read.
Message receive_message(ByteStream& stream);

/// As receive_message, also returning the raw frame bytes.
Message receive_message(ByteStream& stream, std::vector<std::uint8_t>& raw_frame);

}  // namespace trident::wire
