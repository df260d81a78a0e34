#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace randbc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The output block for a given (key, counter) pair is a pure function of the
/// two, so independent streams can be derived from a master seed without any
/// shared state. Satisfies UniformRandomBitGenerator for 32-bit outputs.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t key = 0) noexcept;

    /// Raw block function: ten rounds of Philox over one counter value.
    static Counter block(Counter counter, Key key) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept;

    /// Standard normal via Box-Muller on two 53-bit uniforms.
    double normal() noexcept;

    /// Unbiased integer in [0, bound). bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept;

    bool coin() noexcept { return ((*this)() & 1u) != 0; }

private:
    void refill() noexcept;

    Key key_{};
    Counter counter_{};
    Counter buffer_{};
    std::size_t used_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// Purpose tags for substreams, so that e.g. the plan stream of a trial never
/// overlaps the matrix stream of the same experiment.
enum class StreamRole : std::uint32_t {
    matrix_a = 1,
    matrix_b = 2,
    formula = 3,
    plan = 4,
    input = 5,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Key of the substream identified by (master seed, trial, level, role).
std::uint64_t substream_key(std::uint64_t master_seed, std::uint64_t trial, std::uint32_t level,
                            StreamRole role) noexcept;

inline Philox4x32 substream(std::uint64_t master_seed, std::uint64_t trial, std::uint32_t level,
                            StreamRole role) noexcept {
    return Philox4x32(substream_key(master_seed, trial, level, role));
}

}  // namespace randbc
