#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace spectral_ncd {

/// Worker count: SPECTRAL_NCD_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. Each index is
/// visited exactly once; callers write into pre-sized slots so the result is
/// independent of scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// SplitMix64 mixing of (seed, index): per-instance seeds for randomized suites.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace spectral_ncd
