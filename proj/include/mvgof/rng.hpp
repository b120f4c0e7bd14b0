#pragma once

#include <array>
#include <cstdint>

namespace mvgof {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123 family).
/// Stateless: the output block is a pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Noise stream tags, stored in the last counter word.
enum class Stream : std::uint32_t {
  Increment = 0,
  Initial = 1,
};

/// Standard normal draw addressed by (seed, particle, step, stream).
/// Box-Muller on two 53-bit uniforms taken from one Philox block.
double normal_at(std::uint64_t seed, std::uint64_t particle, std::uint32_t step, Stream stream) noexcept;

}  // namespace mvgof
