// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>

namespace qalybound {

/// Substream purposes. Each subject draws its preferences, cutpoints,
/// health levels and survival from a disjoint substream.
enum class Purpose : std::uint64_t {
    preferences = 1,
    cutpoints = 2,
    health = 3,
    survival = 4,
    synthetic = 5,
    optimizer = 6,
    property = 7,
};

/// Subject index reserved for population-level (shared) draws.
inline constexpr std::uint64_t kSharedSubject = std::numeric_limits<std::uint64_t>::max();

/// SplitMix64 output function (Stafford mix13 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/*!
 * Counter-based random stream.
 *
 * The k-th output of a stream is mix64(key + k * golden), i.e. SplitMix64
 * evaluated at an arbitrary counter. The key is derived from
 * (seed, subject, purpose) by nested mixing, so any draw of any subject can
 * be reproduced without touching other subjects' streams. Results do not
 * depend on how subjects are sharded across threads.
 */
class Stream {
  public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    constexpr Stream(std::uint64_t seed, std::uint64_t subject, Purpose purpose) noexcept
        : key_(derive_key(seed, subject, purpose)) {}

    constexpr std::uint64_t next() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * kGolden);
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1), safe for inverse-CDF sampling.
    constexpr double uniform_open() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    constexpr std::uint64_t counter() const noexcept { return counter_; }
    constexpr std::uint64_t key() const noexcept { return key_; }

    static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t subject,
                                              Purpose purpose) noexcept {
        std::uint64_t k = mix64(seed + kGolden);
        k = mix64(k ^ mix64(subject + 0xD1B54A32D192ED03ULL));
        k = mix64(k ^ mix64(static_cast<std::uint64_t>(purpose) + 0x8CB92BA72F3D8DD7ULL));
        return k;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qalybound
