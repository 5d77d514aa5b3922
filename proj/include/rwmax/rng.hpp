#pragma once

#include <cstdint>

namespace rwmax {

/// SplitMix64 generator (Steele, Lea & Flood). Chosen because the whole
/// state is one word, streams split deterministically, and the algorithm
/// has a stable name we can record in reports for bit-reproducibility.
class SplitMix64 {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Child generator for a parallel stream. Derivation depends only on
    /// the current state and the stream index, so (seed, stream) pairs are
    /// reproducible regardless of scheduling.
    SplitMix64 split(std::uint64_t stream) const {
        SplitMix64 child(state_ ^ (0xd2b74407b1ce6e93ULL * (stream + 1)));
        child.next();
        return child;
    }

private:
    std::uint64_t state_;
};

}  // namespace rwmax
