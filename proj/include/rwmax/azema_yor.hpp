#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwmax/joint_dist.hpp"
#include "rwmax/rational.hpp"
#include "rwmax/walk.hpp"

namespace rwmax {

/// g(z) = z in the symmetric case, ((down/up)^(-z) - 1)/(1 - down/up)
/// otherwise. For up >= down it dominates the identity on z >= 0; for
/// up <= down it is dominated by it.
inline double g_pq(const WalkParams& params, double z) {
    if (params.symmetric()) return z;
    const double ratio = to_double(params.down_up_ratio());
    return (std::pow(ratio, -z) - 1) / (1 - ratio);
}

/// Exact version for integer arguments; (down/up)^(-z) is rational, so
/// asymmetric-regime identities can be asserted with rational equality.
inline Rat g_pq_exact(const WalkParams& params, long long z) {
    if (params.symmetric()) return Rat(z);
    const Rat ratio = params.down_up_ratio();
    return (pow_rat(ratio, -z) - 1) / (1 - ratio);
}

/// A martingale of the pair (walk, running maximum), specified by its
/// boundary values F on the diagonal: boundary[y] = H(y, y). The table
/// exists so specs serialize and verification reports are reproducible.
struct AzemaYorSpec {
    WalkParams params;
    std::vector<Rat> boundary;  // F(0..y_max)

    AzemaYorSpec(WalkParams walk, std::vector<Rat> f) : params(std::move(walk)), boundary(std::move(f)) {
        if (boundary.size() < 2)
            throw std::invalid_argument("azema-yor spec: boundary table needs at least F(0) and F(1)");
    }

    long long y_max() const { return static_cast<long long>(boundary.size()) - 1; }

    nlohmann::json to_json() const {
        nlohmann::json doc;
        doc["params"] = {{"p", format_rational(params.up())},
                         {"q", format_rational(params.down())},
                         {"r", format_rational(params.stay())}};
        nlohmann::json f = nlohmann::json::array();
        for (const Rat& value : boundary) f.push_back(format_rational(value));
        doc["F"] = std::move(f);
        return doc;
    }

    static AzemaYorSpec from_json(const nlohmann::json& doc) {
        const auto fail = [](const std::string& message) {
            throw std::invalid_argument("martingale spec file: " + message);
        };
        if (!doc.is_object()) fail("expected an object");
        for (auto it = doc.begin(); it != doc.end(); ++it)
            if (it.key() != "params" && it.key() != "F") fail("unknown key \"" + it.key() + "\"");
        if (!doc.contains("params") || !doc.contains("F")) fail("missing \"params\" or \"F\"");
        const auto& p = doc["params"];
        for (auto it = p.begin(); it != p.end(); ++it)
            if (it.key() != "p" && it.key() != "q" && it.key() != "r") fail("unknown params key \"" + it.key() + "\"");
        if (!p.contains("p") || !p.contains("q") || !p.contains("r")) fail("params must carry p, q and r");
        WalkParams params(parse_rational(p["p"].get<std::string>()), parse_rational(p["q"].get<std::string>()),
                          parse_rational(p["r"].get<std::string>()));
        if (!doc["F"].is_array()) fail("\"F\" must be an array of rational strings");
        std::vector<Rat> boundary;
        for (const auto& entry : doc["F"]) boundary.push_back(parse_rational(entry.get<std::string>()));
        return AzemaYorSpec(std::move(params), std::move(boundary));
    }

    static AzemaYorSpec load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open martingale spec file: " + path);
        nlohmann::json doc;
        in >> doc;
        return from_json(doc);
    }
};

/// H(x, y) = F(y) - (F(y+1) - F(y)) * g(y - x), the value at (walk, max)
/// = (x, y). Exact because y - x is a nonnegative integer on the domain.
inline Rat azema_yor_H(const AzemaYorSpec& spec, long long x, long long y) {
    const long long lower = x > 0 ? x : 0;
    if (y < lower || y + 1 > spec.y_max())
        throw std::out_of_range("azema_yor_H: (x, y) outside max(x,0) <= y <= y_max - 1");
    const Rat& f_y = spec.boundary[static_cast<std::size_t>(y)];
    const Rat& f_y1 = spec.boundary[static_cast<std::size_t>(y) + 1];
    return f_y - (f_y1 - f_y) * g_pq_exact(spec.params, y - x);
}

/// An explicit martingale candidate on {(x, y) : max(x,0) <= y <= y_max}.
/// Used to run the one-step verification against arbitrary tables, e.g.
/// deliberately corrupted ones.
struct HTable {
    long long y_max = 0;
    std::map<State, Rat> values;

    Rat& at(long long x, long long y) { return values.at(State{x, y}); }
    const Rat& at(long long x, long long y) const { return values.at(State{x, y}); }
};

/// Tabulates H from a spec on max(x,0) <= y <= y_max - 1, with x reaching
/// down to -y_max: enough for any verification horizon the table admits.
inline HTable tabulate_H(const AzemaYorSpec& spec) {
    HTable table;
    table.y_max = spec.y_max() - 1;
    for (long long y = 0; y <= table.y_max; ++y)
        for (long long x = y; x >= -spec.y_max(); --x) table.values[State{x, y}] = azema_yor_H(spec, x, y);
    return table;
}

struct MartingaleVerdict {
    bool pass = true;
    std::optional<State> counterexample;
    long long states_checked = 0;
    std::string detail;
};

/// Asserts the exact one-step conditional-expectation identity at every
/// state reachable by time t_max:
///   x = y:  H(x,y) = up*H(x+1,y+1) + down*H(x-1,y) + stay*H(x,y)
///   x < y:  H(x,y) = up*H(x+1,y)   + down*H(x-1,y) + stay*H(x,y)
/// Reachable states are taken from the exact joint laws at t = 0..t_max.
inline MartingaleVerdict verify_martingale_table(const HTable& table, const WalkParams& params, long long t_max) {
    MartingaleVerdict verdict;
    std::map<State, bool> reachable;
    JointDist dist = JointDist::origin();
    for (long long t = 0;; ++t) {
        for (const auto& [state, p] : dist.mass) reachable[state] = true;
        if (t == t_max) break;
        dist = evolve(dist, params);
    }
    const auto value = [&](long long x, long long y) -> const Rat& {
        auto it = table.values.find(State{x, y});
        if (it == table.values.end())
            throw std::invalid_argument("martingale verification: table does not cover state (" +
                                        std::to_string(x) + ", " + std::to_string(y) +
                                        "); boundary table too short for this horizon");
        return it->second;
    };
    for (const auto& [state, seen] : reachable) {
        const auto [x, y] = state;
        const Rat expected = x == y
                                 ? params.up() * value(x + 1, y + 1) + params.down() * value(x - 1, y) +
                                       params.stay() * value(x, y)
                                 : params.up() * value(x + 1, y) + params.down() * value(x - 1, y) +
                                       params.stay() * value(x, y);
        ++verdict.states_checked;
        if (expected != value(x, y)) {
            verdict.pass = false;
            verdict.counterexample = state;
            verdict.detail = "one-step identity fails at (z=" + std::to_string(x) + ", m=" + std::to_string(y) +
                             "): H = " + format_rational(value(x, y)) +
                             " but E[H after one step] = " + format_rational(expected);
            return verdict;
        }
    }
    return verdict;
}

/// Verifies the martingale property of the H determined by `spec`. The
/// boundary table must extend to y_max >= t_max + 2 so that the one-step
/// identity at diagonal states of height t_max stays inside the domain.
inline MartingaleVerdict verify_martingale_H(const AzemaYorSpec& spec, long long t_max) {
    if (spec.y_max() < t_max + 2)
        throw std::invalid_argument("martingale verification: boundary table covers y <= " +
                                    std::to_string(spec.y_max()) + " but the horizon needs y_max >= " +
                                    std::to_string(t_max + 2));
    return verify_martingale_table(tabulate_H(spec), spec.params, t_max);
}

/// E[H(Z_t, M_t)], exact; equals F(0) for every t when H is a martingale.
inline Rat azema_yor_expectation(const AzemaYorSpec& spec, long long t) {
    const JointDist dist = joint_dist(spec.params, t);
    return expectation(dist, [&](const State& s) { return azema_yor_H(spec, s.z, s.m); });
}

}  // namespace rwmax
