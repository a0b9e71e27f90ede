#include "trident/wire/server.hpp"

#include <list>
#include <thread>

#include "trident/account_store.hpp"
#include "trident/error.hpp"

namespace trident::wire {

std::string_view gate_name(GateId gate) noexcept {
    switch (gate) {
        case GateId::Register: return "register";
        case GateId::Name: return "name";
        case GateId::Password: return "password";
        case GateId::Server: return "server";
    }
    return "?";
}

std::string_view event_kind_name(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::Registered: return "registered";
        case EventKind::RegisterRejected: return "register-rejected";
        case EventKind::FilterReject: return "filter-reject";
        case EventKind::ProtocolViolation: return "protocol-violation";
        case EventKind::GateProceed: return "gate-proceed";
        case EventKind::GateDeny: return "gate-deny";
        case EventKind::Authenticated: return "authenticated";
    }
    return "?";
}

Server::Server(Gatekeeper& gatekeeper, ServerConfig config) : gatekeeper_(gatekeeper), config_(config) {}

void Server::record(std::vector<ServerEvent>& local, ServerEvent event) {
    local.push_back(event);
    std::lock_guard lock(events_mutex_);
    events_.push_back(event);
}

std::vector<ServerEvent> Server::events() const {
    std::lock_guard lock(events_mutex_);
    return events_;
}

namespace {

const ResultMsg kDenied{std::string(kAccessDenied)};
const ResultMsg kProceeded{std::string(kProceed)};

template <class Msg>
std::optional<Device> parse_device(const Msg& m, bool strict_luhn) {
    try {
        return Device{Imei::parse(m.imei, strict_luhn), Imsi::parse(m.imsi)};
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<ServerEvent> Server::serve_connection(ByteStream& stream) {
    const std::uint64_t conn = next_connection_++;
    std::vector<ServerEvent> local;
    std::optional<GateSession> session;

    auto emit = [&](GateId gate, EventKind kind, DenyReason reason = DenyReason::None) {
        record(local, ServerEvent{conn, gate, kind, reason});
    };
    auto reply = [&](const Message& m) {
        try {
            send_message(stream, m);
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    auto deny_and_close = [&] {
        reply(kDenied);
        stream.close();
        return local;
    };

    for (;;) {
        Message message;
        try {
            message = receive_message(stream);
        } catch (const Error& e) {
            if (e.code() == Errc::ShortRead || e.code() == Errc::IoError) {
                stream.close();
                return local;
            }
            emit(session ? GateId::Password : GateId::Name, EventKind::ProtocolViolation, DenyReason::StageOrder);
            return deny_and_close();
        }

        if (const auto* reg = std::get_if<RegisterMsg>(&message)) {
            if (session) {
                emit(GateId::Register, EventKind::ProtocolViolation, DenyReason::StageOrder);
                return deny_and_close();
            }
            const auto device = parse_device(*reg, config_.strict_luhn);
            if (!device) {
                emit(GateId::Register, EventKind::RegisterRejected);
                return deny_and_close();
            }
            try {
                gatekeeper_.enroll(RegistrationRequest{reg->account, reg->phone, reg->password, device->imei,
                                                       device->imsi});
            } catch (const Error&) {
                emit(GateId::Register, EventKind::RegisterRejected);
                return deny_and_close();
            }
            emit(GateId::Register, EventKind::Registered);
            if (!reply(kProceeded)) {
                return local;
            }
            continue;
        }

        if (const auto* name = std::get_if<NameMsg>(&message)) {
            if (session) {
                emit(GateId::Name, EventKind::ProtocolViolation, DenyReason::StageOrder);
                return deny_and_close();
            }
            if (!field_filter_accepts(name->credential)) {
                emit(GateId::Name, EventKind::FilterReject);
                return deny_and_close();
            }
            const auto device = parse_device(*name, config_.strict_luhn);
            if (!device) {
                emit(GateId::Name, EventKind::GateDeny, DenyReason::WrongDevice);
                return deny_and_close();
            }
            session.emplace(gatekeeper_.open_session(*device));
            const GateResult r = gatekeeper_.gate_login_name(*session, name->credential, *device);
            if (r.outcome != Outcome::Proceed) {
                emit(GateId::Name, EventKind::GateDeny, session->deny_reason());
                return deny_and_close();
            }
            emit(GateId::Name, EventKind::GateProceed);
            if (!reply(kProceeded)) {
                return local;
            }
            continue;
        }

        if (const auto* pw = std::get_if<PasswordMsg>(&message)) {
            if (!session) {
                emit(GateId::Password, EventKind::GateDeny, DenyReason::StageOrder);
                return deny_and_close();
            }
            if (!field_filter_accepts(pw->credential)) {
                emit(GateId::Password, EventKind::FilterReject);
                return deny_and_close();
            }
            const auto device = parse_device(*pw, config_.strict_luhn);
            if (!device) {
                emit(GateId::Password, EventKind::GateDeny, DenyReason::WrongDevice);
                return deny_and_close();
            }
            const GateResult r = gatekeeper_.gate_login_password(*session, pw->credential, *device);
            if (r.outcome != Outcome::Proceed) {
                emit(GateId::Password, EventKind::GateDeny, session->deny_reason());
                return deny_and_close();
            }
            emit(GateId::Password, EventKind::GateProceed);
            if (!reply(kProceeded)) {
                return local;
            }
            const AuthResult auth = gatekeeper_.gate_server_authentication(*session);
            if (auth.outcome != Outcome::Proceed || !auth.token) {
                emit(GateId::Server, EventKind::GateDeny, session->deny_reason());
                return deny_and_close();
            }
            emit(GateId::Server, EventKind::Authenticated);
            reply(TokenMsg{to_hex(*auth.token)});
            stream.close();
            return local;
        }

        // RESULT / TOKEN are server-to-client only.
        emit(session ? GateId::Password : GateId::Name, EventKind::ProtocolViolation, DenyReason::StageOrder);
        return deny_and_close();
    }
}

void Server::run(TcpListener& listener, const std::atomic<bool>& stop) {
    std::list<std::thread> workers;
    while (!stop.load()) {
        auto conn = listener.accept(100);
        if (!conn) {
            continue;
        }
        workers.emplace_back([this, c = std::move(conn)]() mutable { serve_connection(*c); });
    }
    for (std::thread& t : workers) {
        t.join();
    }
}

void run_server(TcpListener& listener, AccountStore& store, EntropySource& rng, const std::atomic<bool>& stop,
                ServerConfig config) {
    Gatekeeper gatekeeper(store, rng);
    Server server(gatekeeper, config);
    server.run(listener, stop);
}

}  // namespace trident::wire
