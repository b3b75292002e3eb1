#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace mktsym {

// mt19937_64 has a standard-defined output sequence; the helpers below avoid
// the implementation-defined std distributions so runs are reproducible
// across standard libraries.
using Engine = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of independent stream `stream` under `master`: the SplitMix64 output at
// counter position `stream`, i.e. mix64(master + (stream + 1) * golden_gamma).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

// Uniform on [0, 1) with 53 random bits.
double uniform01(Engine& rng) noexcept;

// Uniform on {0, ..., n-1}; n must be positive. Unbiased (rejection).
std::size_t uniform_index(Engine& rng, std::size_t n) noexcept;

bool coin_flip(Engine& rng) noexcept;

// Standard normal via the polar Box-Muller method (consumes a variable number
// of uniforms, deterministically).
double standard_normal(Engine& rng) noexcept;

}  // namespace mktsym
