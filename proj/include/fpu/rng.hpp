#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fpu {

// Philox-4x32-10 counter-based generator. A stream is fixed by its 64-bit
// key; the 128-bit counter advances per block of four outputs.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static Block bijection(Block ctr, std::array<std::uint32_t, 2> key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    // Uniform double in (0, 1) with 53 random bits.
    double uniform();

private:
    std::array<std::uint32_t, 2> key_;
    Block counter_{};
    Block buffer_{};
    int used_ = 4;
};

}  // namespace fpu
