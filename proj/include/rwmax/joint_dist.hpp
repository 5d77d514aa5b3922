#pragma once

#include <compare>
#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rwmax/rational.hpp"
#include "rwmax/walk.hpp"

namespace rwmax {

/// A point (z, m) of the Markov pair (walk value, running maximum).
struct State {
    long long z = 0;
    long long m = 0;
    auto operator<=>(const State&) const = default;
};

/// Exact joint law of (Z_t, M_t) at a fixed time. Sparse: only strictly
/// positive masses are stored, keyed in (z, m) order so every traversal
/// is deterministic.
struct JointDist {
    long long t = 0;
    std::map<State, Rat> mass;

    static JointDist origin() {
        JointDist dist;
        dist.mass[State{0, 0}] = 1;
        return dist;
    }

    /// Checks the support bounds max(z,0) <= m <= t, |z| <= t, strict
    /// positivity and exact total mass 1.
    void validate() const {
        Rat total(0);
        for (const auto& [state, p] : mass) {
            if (p <= 0) throw std::logic_error("joint law: nonpositive mass");
            const long long lower = state.z > 0 ? state.z : 0;
            if (state.m < lower || state.m > t || state.z < -t || state.z > t)
                throw std::logic_error("joint law: state outside reachable support");
            total += p;
        }
        if (total != 1) throw std::logic_error("joint law: masses do not sum to 1");
    }
};

/// One exact step of the Markov pair: from (z, m) mass `up` flows to
/// (z+1, max(m, z+1)), `down` to (z-1, m), `stay` to (z, m).
inline JointDist evolve(const JointDist& dist, const WalkParams& params) {
    JointDist next;
    next.t = dist.t + 1;
    for (const auto& [state, p] : dist.mass) {
        const long long up_z = state.z + 1;
        next.mass[State{up_z, up_z > state.m ? up_z : state.m}] += p * params.up();
        next.mass[State{state.z - 1, state.m}] += p * params.down();
        if (params.stay() != 0) next.mass[State{state.z, state.m}] += p * params.stay();
    }
    return next;
}

/// Exact law of (Z_t, M_t): t-fold evolve from the point mass at (0, 0).
inline JointDist joint_dist(const WalkParams& params, long long t) {
    if (t < 0) throw std::invalid_argument("joint_dist: t must be >= 0");
    JointDist dist = JointDist::origin();
    for (long long s = 0; s < t; ++s) dist = evolve(dist, params);
    return dist;
}

constexpr long long kDefaultPathCap = 14;

/// Visits all 3^t step sequences (2^t when stay = 0) with their exact
/// path probabilities. The buffers handed to the visitor are reused
/// between calls. Weights are taken from cached power tables, so the
/// per-leaf cost is two small rational multiplications.
inline void visit_paths(const WalkParams& params, long long t,
                        const std::function<void(const PathSample&, const Rat&)>& visit,
                        long long cap = kDefaultPathCap) {
    if (t < 0) throw std::invalid_argument("visit_paths: t must be >= 0");
    if (t > cap) throw std::length_error("path oracle too large: t exceeds the configured cap");

    const bool lazy = params.stay() != 0;
    std::vector<Rat> up_pow(t + 1), down_pow(t + 1), stay_pow(t + 1);
    up_pow[0] = down_pow[0] = stay_pow[0] = 1;
    for (long long i = 1; i <= t; ++i) {
        up_pow[i] = up_pow[i - 1] * params.up();
        down_pow[i] = down_pow[i - 1] * params.down();
        stay_pow[i] = lazy ? stay_pow[i - 1] * params.stay() : Rat(0);
    }

    PathSample path;
    path.steps.assign(t, +1);  // matches the all-zero code word below
    path.z.assign(t + 1, 0);
    path.m.assign(t + 1, 0);

    // Step codes per slot: 0 -> +1, 1 -> -1, 2 -> 0 (skipped when stay = 0).
    const int base = lazy ? 3 : 2;
    std::vector<int> codes(t, 0);
    long long ups = t, downs = 0, stays = 0;

    const auto apply = [&](long long slot) {
        const int step = codes[slot] == 0 ? +1 : (codes[slot] == 1 ? -1 : 0);
        path.steps[slot] = step;
        for (long long s = slot; s < t; ++s) {
            // Recompute suffix; callers change one slot at a time so the
            // amortized cost over the whole enumeration is O(base^t).
            path.z[s + 1] = path.z[s] + path.steps[s];
            path.m[s + 1] = path.m[s] > path.z[s + 1] ? path.m[s] : path.z[s + 1];
        }
    };

    if (t > 0) apply(0);
    while (true) {
        visit(path, up_pow[ups] * down_pow[downs] * (lazy ? stay_pow[stays] : Rat(1)));
        // Odometer increment over the step codes.
        long long slot = t - 1;
        while (slot >= 0 && codes[slot] == base - 1) --slot;
        if (slot < 0) break;
        const auto count_of = [&](int code) -> long long& { return code == 0 ? ups : (code == 1 ? downs : stays); };
        --count_of(codes[slot]);
        ++codes[slot];
        ++count_of(codes[slot]);
        for (long long s = slot + 1; s < t; ++s) {
            --count_of(codes[s]);
            codes[s] = 0;
            ++ups;
            path.steps[s] = +1;
        }
        apply(slot);
    }
}

/// Materialized form of visit_paths; weights sum to exactly 1.
inline std::vector<std::pair<PathSample, Rat>> enumerate_paths(const WalkParams& params, long long t,
                                                               long long cap = kDefaultPathCap) {
    std::vector<std::pair<PathSample, Rat>> out;
    visit_paths(
        params, t, [&](const PathSample& path, const Rat& weight) { out.emplace_back(path, weight); }, cap);
    return out;
}

/// E[f(Z_t, M_t)] under an exact joint law.
template <typename StateFn>
Rat expectation(const JointDist& dist, StateFn&& f) {
    Rat total(0);
    for (const auto& [state, p] : dist.mass) total += p * f(state);
    return total;
}

}  // namespace rwmax
