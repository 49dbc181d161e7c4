#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace stochtree {

// Philox 4x32-10 counter-based generator. Output depends only on (seed,
// stream, block): stream i delivers the same numbers under any execution
// order or thread count.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::array<std::uint32_t, 4> block(std::uint64_t index) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(index);
        std::uint32_t c1 = static_cast<std::uint32_t>(index >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0;
            std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2;
            std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
            std::uint32_t n1 = static_cast<std::uint32_t>(p1);
            std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
            std::uint32_t n3 = static_cast<std::uint32_t>(p0);
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {c0, c1, c2, c3};
    }

    // Two uniforms in the open interval (0,1) from one block.
    std::array<double, 2> uniforms(std::uint64_t index) const {
        auto b = block(index);
        std::uint64_t u = (std::uint64_t{b[0]} << 32) | b[1];
        std::uint64_t v = (std::uint64_t{b[2]} << 32) | b[3];
        constexpr double scale = 1.0 / 9007199254740992.0; // 2^-53
        return {(static_cast<double>(u >> 11) + 0.5) * scale,
                (static_cast<double>(v >> 11) + 0.5) * scale};
    }

    // Standard normal draws, Box-Muller, two per block.
    void fill_normals(double* out, std::size_t count) const {
        constexpr double two_pi = 6.283185307179586476925286766559;
        for (std::size_t i = 0; i < count; i += 2) {
            auto [u1, u2] = uniforms(i / 2);
            double r = std::sqrt(-2.0 * std::log(u1));
            out[i] = r * std::cos(two_pi * u2);
            if (i + 1 < count) out[i + 1] = r * std::sin(two_pi * u2);
        }
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace stochtree
