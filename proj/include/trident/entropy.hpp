#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace trident {

/// Source of random bytes. All registration-time randomness is drawn through
/// this interface so that recorded streams can reproduce an enrollment.
class EntropySource {
public:
    virtual ~EntropySource() = default;

    /// Fills `out` completely or throws Error(Errc::EntropyFailure).
    virtual void fill(std::span<std::uint8_t> out) = 0;

    /// Uniform integer in [0, bound). Rejection-sampled one byte at a time for
    /// bounds up to 256, so a recorded stream byte `v < bound` yields exactly `v`.
    std::uint32_t uniform(std::uint32_t bound);

    /// Uniform integer in [lo, hi].
    std::uint32_t uniform_in(std::uint32_t lo, std::uint32_t hi) { return lo + uniform(hi - lo + 1); }

    std::vector<std::uint8_t> bytes(std::size_t n);
};

/// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SystemEntropy final : public EntropySource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// Replays a recorded byte stream. When the recording runs out it either
/// fails (Exhaustion::Fail) or continues with a SHA-256 counter stream keyed by
/// the recording (Exhaustion::Extend), which keeps seeded runs deterministic.
class ReplayEntropy final : public EntropySource {
public:
    enum class Exhaustion { Fail, Extend };

    explicit ReplayEntropy(std::vector<std::uint8_t> recorded, Exhaustion mode = Exhaustion::Extend);

    void fill(std::span<std::uint8_t> out) override;

    std::size_t consumed() const noexcept { return consumed_; }

private:
    void refill_block();

    std::vector<std::uint8_t> recorded_;
    Exhaustion mode_;
    std::size_t consumed_ = 0;
    std::array<std::uint8_t, 32> key_{};
    std::array<std::uint8_t, 32> block_{};
    std::size_t block_pos_ = 32;
    std::uint64_t counter_ = 0;
};

}  // namespace trident
