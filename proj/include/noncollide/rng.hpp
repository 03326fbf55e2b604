#pragma once

#include <cstdint>

namespace noncollide {

// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
// A draw is addressed by (key, counter); there is no sequential state, so
// any (path, step, component) cell can be generated independently and in
// any order, which is what makes seeded parallel Monte Carlo reproducible.
struct Philox4x32 {
    static constexpr std::uint32_t kMultA = 0xD2511F53u;
    static constexpr std::uint32_t kMultB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    struct Block {
        std::uint32_t v[4];
    };

    static Block encrypt(std::uint64_t key, std::uint64_t hi, std::uint64_t lo) {
        std::uint32_t c0 = static_cast<std::uint32_t>(lo);
        std::uint32_t c1 = static_cast<std::uint32_t>(lo >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(hi);
        std::uint32_t c3 = static_cast<std::uint32_t>(hi >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMultA) * c0;
            std::uint64_t p1 = static_cast<std::uint64_t>(kMultB) * c2;
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += kWeylA;
            k1 += kWeylB;
        }
        return Block{{c0, c1, c2, c3}};
    }
};

// Uniform deviate in the open interval (0,1) from one Philox block.
inline double uniform_open01(std::uint64_t key, std::uint64_t hi, std::uint64_t lo) {
    Philox4x32::Block b = Philox4x32::encrypt(key, hi, lo);
    std::uint64_t bits = (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF, Wichura's algorithm AS 241 (PPND16),
// accurate to about 1e-16 relative error on (0,1).
double normal_quantile(double p);

// Standard normal deviate addressed by (seed, path, cell).
inline double normal_from_counter(std::uint64_t seed, std::uint64_t path, std::uint64_t cell) {
    return normal_quantile(uniform_open01(seed, path, cell));
}

}  // namespace noncollide
