#pragma once

#include <cstdint>
#include <random>

namespace rpsim {

/// Random streams. Stream `index` of seed `s` is an mt19937_64 seeded with
/// splitmix64(splitmix64(s) ^ index). Uniforms take the top 53 bits, normals
/// use Box-Muller; neither depends on the standard library's distributions,
/// so sequences are stable across toolchains.
std::uint64_t splitmix64(std::uint64_t x);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

/// Uniform on [0, 1).
double uniform01(std::mt19937_64& g);
/// Standard normal.
double standard_normal(std::mt19937_64& g);
/// Uniform integer in [0, n).
std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n);

}  // namespace rpsim
