#include "v2xsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace v2xsim {

namespace {

std::uint64_t
SplitMix64(std::uint64_t& state)
{
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t
Fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s)
    {
        h = (h ^ c) * 0x100000001b3ull;
    }
    return h;
}

} // namespace

RngStream
RngStream::Derive(std::uint64_t seed, std::string_view label, std::uint64_t id)
{
    std::uint64_t state = HashMix(seed, Fnv1a(label), id);
    return RngStream(state);
}

std::uint64_t
RngStream::NextU64()
{
    return SplitMix64(m_state);
}

double
RngStream::NextUniform()
{
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t
RngStream::NextBelow(std::uint64_t n)
{
    if (n <= 1)
    {
        return 0;
    }
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = NextU64();
    while (v >= limit)
    {
        v = NextU64();
    }
    return v % n;
}

double
RngStream::NextGaussian()
{
    // Box-Muller; u1 is kept away from 0 so the log stays finite.
    double u1 = NextUniform();
    double u2 = NextUniform();
    if (u1 <= 0.0)
    {
        u1 = 0x1.0p-53;
    }
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t
HashMix(std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    std::uint64_t state = a;
    std::uint64_t h = SplitMix64(state);
    state ^= b + 0x9e3779b97f4a7c15ull;
    h ^= SplitMix64(state);
    state ^= c + 0xbf58476d1ce4e5b9ull;
    h ^= SplitMix64(state);
    return h;
}

} // namespace v2xsim
