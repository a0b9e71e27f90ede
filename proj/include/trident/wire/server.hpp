#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "trident/gatekeeper.hpp"
#include "trident/wire/stream.hpp"

namespace trident::wire {

inline constexpr std::uint16_t kDefaultPort = 4117;

struct ServerConfig {
    bool strict_luhn = true;
};

enum class GateId { Register, Name, Password, Server };

enum class EventKind {
    Registered,
    RegisterRejected,
    FilterReject,
    ProtocolViolation,
    GateProceed,
    GateDeny,
    Authenticated,
};

std::string_view gate_name(GateId gate) noexcept;
std::string_view event_kind_name(EventKind kind) noexcept;

/// Server-side audit entry. Never sent over the wire.
struct ServerEvent {
    std::uint64_t connection = 0;
    GateId gate = GateId::Name;
    EventKind kind = EventKind::GateDeny;
    DenyReason reason = DenyReason::None;
};

/// Reference server: drives the three gates from NAME and PASSWORD frames.
/// Each connection is handled strictly in order; a deny RESULT closes it.
class Server {
public:
    explicit Server(Gatekeeper& gatekeeper, ServerConfig config = {});

    /// Serves one connection to completion; returns that connection's events.
    std::vector<ServerEvent> serve_connection(ByteStream& stream);

    /// Accept loop; each connection runs on its own thread. Returns after
    /// `stop` becomes true and in-flight connections finish.
    void run(TcpListener& listener, const std::atomic<bool>& stop);

    std::vector<ServerEvent> events() const;

private:
    void record(std::vector<ServerEvent>& local, ServerEvent event);

    Gatekeeper& gatekeeper_;
    ServerConfig config_;
    std::atomic<std::uint64_t> next_connection_{1};
    mutable std::mutex events_mutex_;
    std::vector<ServerEvent> events_;
};

/// run_server: serve `store` on `listener` until `stop`.
void run_server(TcpListener& listener, AccountStore& store, EntropySource& rng, const std::atomic<bool>& stop,
                ServerConfig config = {});

}  // namespace trident::wire
