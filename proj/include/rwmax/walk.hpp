#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rwmax/rational.hpp"
#include "rwmax/rng.hpp"

namespace rwmax {

/// Step law of the walk: one step is +1 with probability `up`, -1 with
/// probability `down`, 0 with probability `stay`. All three are exact
/// rationals and must sum to exactly 1; up and down must be positive.
class WalkParams {
public:
    WalkParams(Rat up, Rat down, Rat stay) : up_(std::move(up)), down_(std::move(down)), stay_(std::move(stay)) {
        if (up_ <= 0) throw std::invalid_argument("walk params: up-step probability must be > 0");
        if (down_ <= 0) throw std::invalid_argument("walk params: down-step probability must be > 0");
        if (stay_ < 0) throw std::invalid_argument("walk params: stay probability must be >= 0");
        if (up_ + down_ + stay_ != 1) throw std::invalid_argument("walk params: probabilities must sum to 1 exactly");
    }

    static WalkParams from_strings(std::string_view up, std::string_view down, std::string_view stay) {
        return WalkParams(parse_rational(up), parse_rational(down), parse_rational(stay));
    }

    const Rat& up() const { return up_; }
    const Rat& down() const { return down_; }
    const Rat& stay() const { return stay_; }

    bool symmetric() const { return up_ == down_; }
    /// down/up, the ratio that controls every asymmetric-regime formula.
    Rat down_up_ratio() const { return down_ / up_; }

    bool operator==(const WalkParams& other) const = default;

private:
    Rat up_, down_, stay_;
};

/// One simulated trajectory: steps, partial sums Z_0..Z_t and running
/// maxima M_0..M_t (Z_0 = M_0 = 0).
struct PathSample {
    std::vector<int> steps;
    std::vector<long long> z;
    std::vector<long long> m;

    long long horizon() const { return static_cast<long long>(steps.size()); }
};

namespace detail {

/// Integer thresholds t1 = ceil(up * 2^64), t2 = ceil((up+down) * 2^64).
/// For an integer draw u, u < p * 2^64 iff u < ceil(p * 2^64), so the
/// comparison against the rational threshold is exact.
struct StepThresholds {
    unsigned __int128 up_end;
    unsigned __int128 down_end;

    explicit StepThresholds(const WalkParams& params) {
        const Rat scale = pow_rat(Rat(2), 64);
        up_end = to_u128(ceil_rat(params.up() * scale));
        down_end = to_u128(ceil_rat((params.up() + params.down()) * scale));
    }

    int step(std::uint64_t draw) const {
        if (draw < up_end) return +1;
        if (draw < down_end) return -1;
        return 0;
    }

private:
    static unsigned __int128 to_u128(const Int& value) {
        return (static_cast<unsigned __int128>(static_cast<std::uint64_t>(value >> 64)) << 64) |
               static_cast<unsigned __int128>(static_cast<std::uint64_t>(value & Int(~0ULL)));
    }
};

}  // namespace detail

/// Simulates `horizon` i.i.d. steps. Deterministic given the seed.
inline PathSample simulate(const WalkParams& params, long long horizon, std::uint64_t seed) {
    if (horizon < 0) throw std::invalid_argument("simulate: horizon must be >= 0");
    const detail::StepThresholds thresholds(params);
    SplitMix64 rng(seed);

    PathSample path;
    path.steps.reserve(static_cast<std::size_t>(horizon));
    path.z.reserve(static_cast<std::size_t>(horizon) + 1);
    path.m.reserve(static_cast<std::size_t>(horizon) + 1);
    path.z.push_back(0);
    path.m.push_back(0);

    long long z = 0, m = 0;
    for (long long t = 0; t < horizon; ++t) {
        const int step = thresholds.step(rng.next());
        z += step;
        if (z > m) m = z;
        path.steps.push_back(step);
        path.z.push_back(z);
        path.m.push_back(m);
    }
    return path;
}

}  // namespace rwmax
