#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rwmax/embedding.hpp"

using namespace rwmax;

namespace {
const WalkParams kSymmetric(Rat(1, 2), Rat(1, 2), Rat(0));
const WalkParams kLazySymmetric(Rat(1, 3), Rat(1, 3), Rat(1, 3));

CenteredMeasure uniform_interval_two(int n) {
    std::vector<std::pair<long long, Rat>> atoms;
    for (long long x = -2 * n; x <= 2 * n; x += 2) atoms.emplace_back(x, Rat(1, 2 * n + 1));
    return CenteredMeasure::from_atoms(atoms);
}

/// E[T] oracle via optional stopping of Z_t^2 - (p+q) t: for a centered
/// stopped law, E[T] = Var(mu) / (p + q).
Rat variance_over_activity(const CenteredMeasure& mu, const WalkParams& params) {
    Rat variance(0);
    for (const Atom& atom : mu.atoms()) variance += atom.mass * Rat(atom.x) * Rat(atom.x);
    return variance / (params.up() + params.down());
}
}  // namespace

TEST_CASE("psi on the geometric support is a shift by n") {
    for (int n : {1, 2, 3}) {
        const auto plan = build_plan(CenteredMeasure::centered_geometric(n, Rat(1, 1 << 20)));
        for (std::size_t i = 0; i < plan.support().size(); ++i)
            CHECK(plan.psi()[i] == plan.support()[i] + n);
        CHECK(plan.shift() == 0 - (-n));
        CHECK(plan.psi_of(plan.support().back() + 5) == plan.support().back() + 5 + n);
        CHECK_FALSE(plan.psi_of(-n - 1).has_value());
    }
}

TEST_CASE("psi on the interval-2 uniform support is x/2 + n") {
    for (int n : {1, 2, 3}) {
        const auto plan = build_plan(uniform_interval_two(n));
        for (std::size_t i = 0; i < plan.support().size(); ++i) {
            const long long x = plan.support()[i];
            CHECK(plan.psi()[i] == x / 2 + n);
            CHECK(plan.psi()[i] == static_cast<long long>(i));
        }
        CHECK_FALSE(plan.psi_of(1).has_value());  // odd points are off the support
    }
}

TEST_CASE("the symmetric two-point measure gives psi = (0, 1)") {
    const auto plan = build_plan(CenteredMeasure::from_atoms({{-1, Rat(1, 2)}, {1, Rat(1, 2)}}));
    CHECK(plan.psi() == std::vector<long long>{0, 1});
    CHECK(plan.shift() == 1);
}

TEST_CASE("psi - x is nonnegative and nonincreasing along the support") {
    for (const auto& mu : {uniform_interval_two(3), CenteredMeasure::centered_geometric(2, Rat(1, 4096))}) {
        const auto plan = build_plan(mu);
        long long previous = plan.shift();
        for (std::size_t i = 0; i < plan.support().size(); ++i) {
            const long long gap = plan.psi()[i] - plan.support()[i];
            CHECK(gap >= 0);
            CHECK(gap <= previous);
            previous = gap;
        }
    }
}

TEST_CASE("plans reject measures violating the integrality assumption") {
    // mu{-1: 2/3, 2: 1/3}: psi(-1) = -1 + (1/3)/(2/3) = -1/2
    const auto mu = CenteredMeasure::from_atoms({{-1, Rat(2, 3)}, {2, Rat(1, 3)}});
    CHECK_THROWS_WITH(build_plan(mu), Catch::Matchers::ContainsSubstring("integrality"));
    // negative psi: mu{-3: 1/2, 3: 1/2}: psi(-3) = -3 + 1 = -2
    const auto wide = CenteredMeasure::from_atoms({{-3, Rat(1, 2)}, {3, Rat(1, 2)}});
    CHECK_THROWS_WITH(build_plan(wide), Catch::Matchers::ContainsSubstring("integrality"));
}

TEST_CASE("plans reject measures violating the monotonicity assumption") {
    // mu{-2: 1/4, 0: 1/4, 1: 1/2}: psi = (1, 2, 1), integer but not increasing
    const auto mu = CenteredMeasure::from_atoms({{-2, Rat(1, 4)}, {0, Rat(1, 4)}, {1, Rat(1, 2)}});
    CHECK_THROWS_WITH(build_plan(mu), Catch::Matchers::ContainsSubstring("monotonicity"));
}

TEST_CASE("two-point embedding stops at the first step") {
    const auto plan = build_plan(CenteredMeasure::from_atoms({{-1, Rat(1, 2)}, {1, Rat(1, 2)}}));
    for (const auto method : {ExactMethod::linear_solve, ExactMethod::iteration}) {
        const StoppedLaw law = stopped_law_exact(plan, kSymmetric, method);
        REQUIRE(law.atoms.size() == 2);
        CHECK(law.atoms[0] == std::pair<long long, Rat>{-1, Rat(1, 2)});
        CHECK(law.atoms[1] == std::pair<long long, Rat>{1, Rat(1, 2)});
        CHECK(law.expected_T == 1);
        CHECK(law.total_mass == 1);
    }
}

TEST_CASE("interval-2 uniform embedding reproduces the measure exactly") {
    for (int n : {1, 2, 3}) {
        const auto mu = uniform_interval_two(n);
        const auto plan = build_plan(mu);
        const StoppedLaw solve = stopped_law_solve(plan, kSymmetric);
        const StoppedLaw iterate = stopped_law_iterate(plan, kSymmetric);

        REQUIRE(solve.atoms.size() == mu.atoms().size());
        for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
            CHECK(solve.atoms[i].first == mu.atoms()[i].x);
            CHECK(solve.atoms[i].second == mu.atoms()[i].mass);
        }
        CHECK(solve.total_mass == 1);
        // the two independent methods agree exactly
        CHECK(iterate.atoms == solve.atoms);
        CHECK(iterate.expected_T == solve.expected_T);
        // oracle: E[T] = Var(mu) for p = q = 1/2, r = 0
        CHECK(solve.expected_T == variance_over_activity(mu, kSymmetric));
        CHECK(verify_embedding(plan, kSymmetric, solve).pass);
    }
}

TEST_CASE("lazy symmetric walks embed too, with scaled stopping time") {
    const auto mu = uniform_interval_two(2);
    const auto plan = build_plan(mu);
    const StoppedLaw law = stopped_law_exact(plan, kLazySymmetric);
    CHECK(law.total_mass == 1);
    CHECK(law.expected_T == variance_over_activity(mu, kLazySymmetric));  // Var / (p + q)
    CHECK(verify_embedding(plan, kLazySymmetric, law).pass);
    const StoppedLaw iterate = stopped_law_iterate(plan, kLazySymmetric);
    CHECK(iterate.expected_T == law.expected_T);
}

TEST_CASE("the point mass at zero stops immediately") {
    const auto plan = build_plan(CenteredMeasure::from_atoms({{0, Rat(1)}}));
    const StoppedLaw law = stopped_law_exact(plan, kSymmetric);
    REQUIRE(law.atoms.size() == 1);
    CHECK(law.atoms[0] == std::pair<long long, Rat>{0, Rat(1)});
    CHECK(law.expected_T == 0);
}

TEST_CASE("exact mode enforces its hypotheses") {
    const auto plan = build_plan(uniform_interval_two(1));
    CHECK_THROWS_AS(stopped_law_exact(plan, WalkParams(Rat(2, 3), Rat(1, 3), Rat(0))), std::domain_error);
    const auto geometric = build_plan(CenteredMeasure::centered_geometric(1, Rat(1, 1024)));
    CHECK_THROWS_AS(stopped_law_exact(geometric, kSymmetric), std::domain_error);
}

TEST_CASE("Monte Carlo embedding of the geometric measure") {
    const auto mu = CenteredMeasure::centered_geometric(1, Rat(1, 1 << 20));
    const auto plan = build_plan(mu);
    const StoppedLaw law = stopped_law_mc(plan, kSymmetric, 50'000, 20240801);
    CHECK(law.capped_runs == 0);
    CHECK(law.completed_runs == 50'000);
    // E[T] = Var(mu) = 2 for n = 1; allow 5 sigma
    CHECK(std::abs(law.expected_T_mc - 2.0) <= 5 * law.expected_T_stderr);
    const auto verdict = verify_embedding(plan, kSymmetric, law, VerifyOptions{3.5, 1e-3});
    CHECK(verdict.pass);
}

TEST_CASE("two-point Monte Carlo frequencies match the binomial bands") {
    const auto plan = build_plan(CenteredMeasure::from_atoms({{-1, Rat(1, 2)}, {1, Rat(1, 2)}}));
    const StoppedLaw law = stopped_law_mc(plan, kSymmetric, 100'000, 424242);
    REQUIRE(law.mc_atoms.size() == 2);
    const double band = 3 * std::sqrt(0.25 / 100'000);
    for (const auto& atom : law.mc_atoms) CHECK(std::abs(atom.freq - 0.5) <= band);
    CHECK(law.expected_T_mc == 1.0);  // the walk stops on its first step
}

TEST_CASE("exact and Monte Carlo expected stopping times agree") {
    const auto mu = uniform_interval_two(1);
    const auto plan = build_plan(mu);
    const StoppedLaw exact = stopped_law_exact(plan, kSymmetric);
    const StoppedLaw mc = stopped_law_mc(plan, kSymmetric, 40'000, 314159);
    CHECK(std::abs(mc.expected_T_mc - to_double(exact.expected_T)) <= 3 * mc.expected_T_stderr);
}

TEST_CASE("Monte Carlo is deterministic and thread-partitioning is reproducible") {
    const auto plan = build_plan(uniform_interval_two(1));
    const StoppedLaw a = stopped_law_mc(plan, kSymmetric, 20'000, 7);
    const StoppedLaw b = stopped_law_mc(plan, kSymmetric, 20'000, 7);
    CHECK(a.to_json() == b.to_json());
    McOptions threaded;
    threaded.threads = 4;
    const StoppedLaw c = stopped_law_mc(plan, kSymmetric, 20'000, 7, threaded);
    const StoppedLaw d = stopped_law_mc(plan, kSymmetric, 20'000, 7, threaded);
    CHECK(c.to_json() == d.to_json());
    CHECK(verify_embedding(plan, kSymmetric, c).pass);
}

TEST_CASE("a tiny step cap triggers the termination warning") {
    const auto plan = build_plan(uniform_interval_two(3));
    McOptions options;
    options.step_cap = 2;  // most runs need longer
    const StoppedLaw law = stopped_law_mc(plan, kSymmetric, 1000, 99, options);
    CHECK(law.capped_runs > 0);
    REQUIRE_FALSE(law.warnings.empty());
    CHECK(law.warnings.front().find("termination") != std::string::npos);
}

TEST_CASE("verification flags a perturbed law") {
    const auto mu = uniform_interval_two(2);
    const auto plan = build_plan(mu);
    StoppedLaw law = stopped_law_exact(plan, kSymmetric);
    law.atoms[0].second += Rat(1, 1000);
    law.atoms[1].second -= Rat(1, 1000);
    const auto verdict = verify_embedding(plan, kSymmetric, law);
    CHECK_FALSE(verdict.pass);
    REQUIRE_FALSE(verdict.failures.empty());
    CHECK(verdict.failures.front().find("atom x=-4") != std::string::npos);
}

TEST_CASE("the structural identity degenerates correctly at the top atom") {
    const auto mu = uniform_interval_two(2);
    const auto plan = build_plan(mu);
    const StoppedLaw law = stopped_law_exact(plan, kSymmetric);
    // psi(x_top) - x_top = 0 and P(Z > x_top) = 0; covered by the verdict
    CHECK(plan.psi().back() - plan.support().back() == 0);
    CHECK(verify_embedding(plan, kSymmetric, law).pass);
}

TEST_CASE("random staircase supports: both exact methods embed the measure") {
    // Any strictly increasing integer support x_0 < ... < x_m with
    // x_i <= i - 1 for i < m and x_m = m admits exactly one measure whose
    // embedding rule is valid: psi(x_i) = i forces
    //   mass_{i-1} = mass_i (1 + i - x_i) / (i - 1 - x_{i-1})
    // up to normalization, and such a measure is automatically centered.
    SplitMix64 rng(777);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 1 + static_cast<int>(rng.next() % 5);
        std::vector<long long> support(static_cast<std::size_t>(m) + 1);
        support[static_cast<std::size_t>(m)] = m;
        for (int i = m - 1; i >= 0; --i) {
            const long long upper = std::min<long long>(support[i + 1] - 1, i - 1);
            support[static_cast<std::size_t>(i)] = upper - static_cast<long long>(rng.next() % 4);
        }
        std::vector<Rat> mass(static_cast<std::size_t>(m) + 1);
        mass[static_cast<std::size_t>(m)] = 1;
        for (int i = m; i >= 1; --i)
            mass[i - 1] = mass[static_cast<std::size_t>(i)] * Rat(1 + i - support[static_cast<std::size_t>(i)]) /
                          Rat(i - 1 - support[i - 1]);
        Rat total(0);
        for (const Rat& value : mass) total += value;
        std::vector<std::pair<long long, Rat>> atoms;
        for (int i = 0; i <= m; ++i) atoms.emplace_back(support[static_cast<std::size_t>(i)], mass[static_cast<std::size_t>(i)] / total);
        const auto mu = CenteredMeasure::from_atoms(atoms);  // re-validates centering
        const auto plan = build_plan(mu);

        const StoppedLaw solve = stopped_law_solve(plan, kSymmetric);
        // 2^-96 enclosures are ample for these denominators; a too-wide
        // bracket fails loudly instead of reconstructing a wrong value
        const StoppedLaw iterate = stopped_law_iterate(plan, kSymmetric, 96);
        CHECK(solve.total_mass == 1);
        CHECK(iterate.atoms == solve.atoms);
        CHECK(iterate.expected_T == solve.expected_T);
        CHECK(solve.expected_T == variance_over_activity(mu, kSymmetric));
        CHECK(verify_embedding(plan, kSymmetric, solve).pass);
        REQUIRE(solve.atoms.size() == mu.atoms().size());
        for (std::size_t i = 0; i < mu.atoms().size(); ++i)
            CHECK(solve.atoms[i].second == mu.atoms()[i].mass);
    }
}

TEST_CASE("the proof martingale for each support point has mean zero") {
    for (const WalkParams& params : {kSymmetric, kLazySymmetric}) {
        const auto plan = build_plan(uniform_interval_two(2));
        for (long long psi : plan.psi())
            for (long long t = 0; t <= 12; ++t) CHECK(embedding_witness_mean(params, t, psi) == 0);
    }
}

TEST_CASE("stopped-law reports serialize with exact rationals") {
    const auto plan = build_plan(uniform_interval_two(1));
    const StoppedLaw law = stopped_law_exact(plan, kSymmetric);
    const nlohmann::json doc = law.to_json();
    CHECK(doc["mode"] == "exact");
    CHECK(doc["atoms"][0]["x"] == -2);
    CHECK(doc["atoms"][0]["p"] == "1/3");
    CHECK(doc["expected_T"] == format_rational(law.expected_T));
    CHECK(doc["total_mass"] == "1");
}
