#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace jigclu {

/// Deterministic, splittable random stream (xoshiro256++ seeded through
/// SplitMix64). Every stochastic component derives its own named stream from
/// (global_seed, path...), so batch construction and initialization are
/// reproducible regardless of scheduling. All distributions are hand-rolled:
/// std::uniform_real_distribution and friends are not bit-stable across
/// standard libraries.
class RngStream {
public:
    RngStream() { reseed(0); }
    explicit RngStream(uint64_t seed) { reseed(seed); }

    /// Stream for a named purpose, e.g. derive(seed, {kEpochStream, epoch, worker}).
    static RngStream derive(uint64_t global_seed, std::initializer_list<uint64_t> path);

    void reseed(uint64_t seed);

    uint64_t next_u64();

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform();

    double uniform(double lo, double hi);

    /// Unbiased integer in [0, n), n >= 1. Rejection sampling.
    uint64_t uniform_int(uint64_t n);

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

    std::array<uint64_t, 4> state() const { return {s_[0], s_[1], s_[2], s_[3]}; }
    void set_state(const std::array<uint64_t, 4>& st);

private:
    uint64_t s_[4];
};

// Stream purpose tags used across the toolkit. Values are arbitrary but
// frozen: changing them changes every derived stream.
enum StreamTag : uint64_t {
    kTagInit = 1,     // parameter initialization
    kTagShuffle = 2,  // per-epoch dataset order
    kTagWorker = 3,   // per-(epoch, worker) batch construction
    kTagEval = 4,     // evaluation-time shuffling / splits
    kTagSynth = 5,    // synthetic dataset generation
};

} // namespace jigclu
