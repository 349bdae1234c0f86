#pragma once

#include <cstdint>
#include <string_view>

namespace v2xsim {

/// Counter-free splitmix64 stream. Cheap, portable, and reproducible
/// bit-for-bit across platforms, which the determinism contract requires.
class RngStream {
  public:
    RngStream() = default;
    explicit RngStream(std::uint64_t state)
        : m_state(state)
    {
    }

    /// Derives an independent stream from a run seed, a purpose label and a
    /// numeric id (e.g. a vehicle id). Identical inputs give identical streams.
    static RngStream Derive(std::uint64_t seed, std::string_view label, std::uint64_t id = 0);

    std::uint64_t NextU64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double NextUniform();

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t NextBelow(std::uint64_t n);

    /// Standard normal via Box-Muller; consumes two uniforms.
    double NextGaussian();

  private:
    std::uint64_t m_state{0x9e3779b97f4a7c15ull};
};

/// Stateless mix of up to three words into one, for per-pair frozen draws.
std::uint64_t HashMix(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

} // namespace v2xsim
