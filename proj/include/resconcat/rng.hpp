#pragma once

// Seedable xoshiro256** generator and the seed-derivation helpers used to
// give every matrix, dataset and trial its own independent stream.
//
// Sub-stream rule: derive_seed(parent, stream) = splitmix64 finalizer applied
// to (parent + golden * (stream + 1)). Distinct stream ids under the same
// parent never share a state in practice.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>
#include <vector>

namespace resconcat {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// The splitmix64 output function applied to a single value.
std::uint64_t mix64(std::uint64_t value) noexcept;

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

/// FNV-1a over a list of string fields, finalized with mix64. Stable across
/// platforms and runs; used for trial/validation seed derivation.
std::uint64_t stable_hash(std::initializer_list<std::string_view> fields) noexcept;

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via the polar Box-Muller method (platform independent).
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> s_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace resconcat
