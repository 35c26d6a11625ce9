#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levylt {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is fixed by (seed, stream id); the 64-bit block counter walks
/// through it. Streams with different ids never overlap, so each path can
/// own one regardless of which thread runs it.
class Philox {
public:
    using result_type = std::uint32_t;

    Philox(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (index_ == 4) {
            block_ = generate(counter_++);
            index_ = 0;
        }
        return block_[index_++];
    }

    /// Uniform on (0, 1) with 53 random bits; never returns 0 or 1.
    double uniform_open() noexcept {
        const std::uint64_t hi = (*this)();
        const std::uint64_t lo = (*this)();
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// The raw block for a given counter value.
    std::array<std::uint32_t, 4> generate(std::uint64_t counter) const noexcept {
        std::array<std::uint32_t, 4> x{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                                       static_cast<std::uint32_t>(stream_),
                                       static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53} * x[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57} * x[2];
            x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0], static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1], static_cast<std::uint32_t>(p0)};
            k[0] += 0x9E3779B9;
            k[1] += 0xBB67AE85;
        }
        return x;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int index_ = 4;
};

/// Stream kinds, so that the same path index drawn for different purposes
/// never shares randomness.
enum class StreamKind : std::uint64_t {
    Path = 1,
    LimitPath = 2,
    LimitNormal = 3,
    Walk = 4,
    Misc = 5,
};

inline std::uint64_t stream_id(StreamKind kind, std::uint64_t index) noexcept {
    return (static_cast<std::uint64_t>(kind) << 56) ^ index;
}

inline Philox make_stream(std::uint64_t seed, StreamKind kind, std::uint64_t index) noexcept {
    return Philox(seed, stream_id(kind, index));
}

}  // namespace levylt
