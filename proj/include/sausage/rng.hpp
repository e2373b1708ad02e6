#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sausage {

/// Philox4x32-10 block function (Salmon et al., SC'11).
class Philox4x32 {
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kM0 = 0xD2511F53;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57;
    static constexpr std::uint32_t kW0 = 0x9E3779B9;
    static constexpr std::uint32_t kW1 = 0xBB67AE85;
};

/// Independent, reproducible stream addressed by (seed, replica, substream).
/// The seed is the Philox key; replica and substream fill the upper counter
/// words and the lower two words count blocks, so distinct addresses never
/// share a block.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint32_t replica, std::uint32_t substream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          replica_(replica),
          substream_(substream) {}

    std::uint32_t next_u32() {
        if (used_ == 4) refill();
        return block_[used_++];
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() {
        const std::uint64_t hi = next_u32() >> 5;
        const std::uint64_t lo = next_u32() >> 6;
        return (static_cast<double>((hi << 26) | lo) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box–Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    void refill() {
        block_ = Philox4x32::apply({static_cast<std::uint32_t>(block_index_),
                                    static_cast<std::uint32_t>(block_index_ >> 32), substream_, replica_},
                                   key_);
        ++block_index_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint32_t replica_;
    std::uint32_t substream_;
    std::uint64_t block_index_ = 0;
    Philox4x32::Counter block_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sausage
