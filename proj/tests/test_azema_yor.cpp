#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rwmax/azema_yor.hpp"
#include "rwmax/rng.hpp"

using namespace rwmax;

namespace {
const WalkParams kSymmetric(Rat(1, 2), Rat(1, 2), Rat(0));
const WalkParams kLazySymmetric(Rat(1, 3), Rat(1, 3), Rat(1, 3));
const WalkParams kBiased(Rat(2, 3), Rat(1, 3), Rat(0));

std::vector<Rat> random_boundary(SplitMix64& rng, std::size_t size) {
    std::vector<Rat> f;
    f.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        const long long num = static_cast<long long>(rng.next() % 19) - 9;
        const long long den = 1 + static_cast<long long>(rng.next() % 9);
        f.emplace_back(num, den);
    }
    return f;
}
}  // namespace

TEST_CASE("g is the identity in the symmetric case and exact otherwise") {
    CHECK(g_pq(kSymmetric, 3.25) == 3.25);
    CHECK(g_pq_exact(kSymmetric, 7) == 7);
    CHECK(g_pq_exact(kBiased, 0) == 0);
    // ((1/2)^-2 - 1)/(1 - 1/2) = 6
    CHECK(g_pq_exact(kBiased, 2) == 6);
    CHECK(g_pq(kBiased, 2.0) == Catch::Approx(6.0));
}

TEST_CASE("g dominates or is dominated by the identity according to the drift") {
    for (int pn = 1; pn <= 10; ++pn)
        for (int qn = 1; qn <= 10; ++qn) {
            if (pn + qn >= 12) continue;
            const WalkParams params(Rat(pn, 12), Rat(qn, 12), Rat(12 - pn - qn, 12));
            for (long long z = 0; z <= 10; ++z) {
                const Rat value = g_pq_exact(params, z);
                if (pn >= qn) CHECK(value >= z);
                if (pn <= qn) CHECK(value <= z);
                if (z == 0) CHECK(value == 0);
            }
        }
}

TEST_CASE("H from a constant boundary is constant") {
    const AzemaYorSpec spec(kSymmetric, std::vector<Rat>(8, Rat(5, 3)));
    for (long long y = 0; y <= 6; ++y)
        for (long long x = y; x >= -5; --x) CHECK(azema_yor_H(spec, x, y) == Rat(5, 3));
}

TEST_CASE("the identity boundary recovers the walk itself") {
    std::vector<Rat> f;
    for (int y = 0; y <= 8; ++y) f.emplace_back(y);
    const AzemaYorSpec spec(kSymmetric, f);
    for (long long y = 0; y <= 7; ++y)
        for (long long x = y; x >= -4; --x) CHECK(azema_yor_H(spec, x, y) == x);
}

TEST_CASE("the hinge boundary of the maximal inequality") {
    // F(y) = 1_{y >= 3} (y - 3); H(1, 4) = 1 - 1 * 3 = -2
    std::vector<Rat> f;
    for (int y = 0; y <= 8; ++y) f.emplace_back(y >= 3 ? y - 3 : 0);
    const AzemaYorSpec spec(kSymmetric, f);
    CHECK(azema_yor_H(spec, 1, 4) == -2);
}

TEST_CASE("H respects its domain") {
    const AzemaYorSpec spec(kSymmetric, std::vector<Rat>(5, Rat(0)));
    CHECK_THROWS_AS(azema_yor_H(spec, 3, 2), std::out_of_range);   // x > y
    CHECK_THROWS_AS(azema_yor_H(spec, 0, 4), std::out_of_range);   // needs F(5)
    CHECK_THROWS_AS(azema_yor_H(spec, -1, -1), std::out_of_range); // y < 0
    CHECK_NOTHROW(azema_yor_H(spec, -3, 3));
}

TEST_CASE("martingale verification passes for random boundaries, both regimes") {
    SplitMix64 rng(31337);
    for (const WalkParams& params : {kSymmetric, kLazySymmetric, kBiased, WalkParams(Rat(1, 4), Rat(5, 12), Rat(1, 3))}) {
        for (int trial = 0; trial < 5; ++trial) {
            const AzemaYorSpec spec(params, random_boundary(rng, 12));
            const auto verdict = verify_martingale_H(spec, 8);
            CHECK(verdict.pass);
            CHECK(verdict.states_checked > 0);
        }
    }
}

TEST_CASE("a corrupted table is always detected") {
    SplitMix64 rng(2718);
    const AzemaYorSpec spec(kSymmetric, random_boundary(rng, 12));
    HTable table = tabulate_H(spec);
    REQUIRE(verify_martingale_table(table, spec.params, 8).pass);
    // corrupt one interior entry reachable by the horizon
    table.at(0, 2) += Rat(1, 1000000);
    const auto verdict = verify_martingale_table(table, spec.params, 8);
    CHECK_FALSE(verdict.pass);
    REQUIRE(verdict.counterexample.has_value());
    // the failing state must be adjacent to the corruption
    CHECK(std::abs(verdict.counterexample->z) <= 3);
}

TEST_CASE("H(x, y) = y is not a martingale") {
    // not of the characterized form: fails the diagonal relation y vs y + p
    HTable table;
    table.y_max = 6;
    for (long long y = 0; y <= 6; ++y)
        for (long long x = y; x >= -7; --x) table.values[State{x, y}] = Rat(y);
    const auto verdict = verify_martingale_table(table, kSymmetric, 4);
    CHECK_FALSE(verdict.pass);
    REQUIRE(verdict.counterexample.has_value());
    CHECK(verdict.counterexample->z == verdict.counterexample->m);
}

TEST_CASE("a too-short boundary table is a coverage error") {
    const AzemaYorSpec spec(kSymmetric, std::vector<Rat>(8, Rat(1)));
    CHECK_NOTHROW(verify_martingale_H(spec, 5));
    CHECK_THROWS_WITH(verify_martingale_H(spec, 6), Catch::Matchers::ContainsSubstring("y_max"));
}

TEST_CASE("boundary reconstruction from the diagonal reproduces H") {
    SplitMix64 rng(5150);
    for (const WalkParams& params : {kSymmetric, kBiased}) {
        const AzemaYorSpec spec(params, random_boundary(rng, 9));
        // F(y) := H(y, y); rebuilding from it must reproduce every value
        std::vector<Rat> recovered;
        for (long long y = 0; y + 1 <= spec.y_max(); ++y) recovered.push_back(azema_yor_H(spec, y, y));
        recovered.push_back(spec.boundary[spec.boundary.size() - 1]);
        const AzemaYorSpec rebuilt(params, recovered);
        for (long long y = 0; y + 1 <= spec.y_max(); ++y)
            for (long long x = y; x >= -6; --x) CHECK(azema_yor_H(rebuilt, x, y) == azema_yor_H(spec, x, y));
    }
}

TEST_CASE("expectation of H is the initial boundary value at every horizon") {
    SplitMix64 rng(11);
    for (const WalkParams& params : {kSymmetric, kLazySymmetric, kBiased}) {
        const AzemaYorSpec spec(params, random_boundary(rng, 14));
        for (long long t = 0; t <= 10; ++t) CHECK(azema_yor_expectation(spec, t) == spec.boundary[0]);
    }
}

TEST_CASE("spec files round-trip and reject malformed input") {
    const AzemaYorSpec spec(kBiased, {Rat(0), Rat(1, 3), Rat(1), Rat(2)});
    const auto back = AzemaYorSpec::from_json(spec.to_json());
    CHECK(back.params == spec.params);
    CHECK(back.boundary == spec.boundary);

    CHECK_THROWS_WITH(AzemaYorSpec::from_json(nlohmann::json::parse(
                          R"({"params": {"p": "1/2", "q": "1/2", "r": "0"}, "F": ["0", "1"], "extra": 0})")),
                      Catch::Matchers::ContainsSubstring("unknown key"));
    CHECK_THROWS_AS(AzemaYorSpec::from_json(nlohmann::json::parse(R"({"params": {"p": "1/2"}, "F": ["0", "1"]})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(AzemaYorSpec::from_json(nlohmann::json::parse(
                        R"({"params": {"p": "1/2", "q": "1/2", "r": "0"}, "F": ["0.5", "1"]})")),
                    std::invalid_argument);
}
