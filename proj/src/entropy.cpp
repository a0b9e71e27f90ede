#include "trident/entropy.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <climits>

#include "trident/digest.hpp"
#include "trident/error.hpp"

namespace trident {

std::uint32_t EntropySource::uniform(std::uint32_t bound) {
    if (bound == 0) {
        throw Error(Errc::EntropyFailure, "uniform() with empty range");
    }
    if (bound <= 256) {
        const std::uint32_t limit = 256 - (256 % bound);
        for (;;) {
            std::uint8_t b = 0;
            fill({&b, 1});
            if (b < limit) {
                return b % bound;
            }
        }
    }
    const std::uint64_t range = std::uint64_t{1} << 32;
    const std::uint64_t limit = range - (range % bound);
    for (;;) {
        std::array<std::uint8_t, 4> raw{};
        fill(raw);
        const std::uint64_t v = (std::uint64_t{raw[0]} << 24) | (std::uint64_t{raw[1]} << 16) |
                                (std::uint64_t{raw[2]} << 8) | raw[3];
        if (v < limit) {
            return static_cast<std::uint32_t>(v % bound);
        }
    }
}

std::vector<std::uint8_t> EntropySource::bytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    fill(out);
    return out;
}

void SystemEntropy::fill(std::span<std::uint8_t> out) {
    if (out.empty()) {
        return;
    }
    if (out.size() > INT_MAX || RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        throw Error(Errc::EntropyFailure, "RAND_bytes failed");
    }
}

ReplayEntropy::ReplayEntropy(std::vector<std::uint8_t> recorded, Exhaustion mode)
    : recorded_(std::move(recorded)), mode_(mode), key_(sha256(recorded_)) {}

void ReplayEntropy::refill_block() {
    std::array<std::uint8_t, 8> ctr{};
    for (int i = 0; i < 8; ++i) {
        ctr[i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
    }
    ++counter_;
    block_ = sha256(key_, ctr);
    block_pos_ = 0;
}

void ReplayEntropy::fill(std::span<std::uint8_t> out) {
    std::size_t written = 0;
    if (consumed_ < recorded_.size()) {
        const std::size_t n = std::min(out.size(), recorded_.size() - consumed_);
        std::copy_n(recorded_.begin() + static_cast<std::ptrdiff_t>(consumed_), n, out.begin());
        consumed_ += n;
        written = n;
    }
    if (written == out.size()) {
        return;
    }
    if (mode_ == Exhaustion::Fail) {
        throw Error(Errc::EntropyFailure, "recorded entropy stream exhausted");
    }
    while (written < out.size()) {
        if (block_pos_ == block_.size()) {
            refill_block();
        }
        out[written++] = block_[block_pos_++];
        ++consumed_;
    }
}

}  // namespace trident
