#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rwmax/azema_yor.hpp"
#include "rwmax/joint_dist.hpp"
#include "rwmax/rational.hpp"
#include "rwmax/walk.hpp"

namespace rwmax {

enum class Regime { up_greater, symmetric, down_greater };
enum class Relation { less_equal, equal, greater_equal };

inline Regime classify_regime(const WalkParams& params) {
    if (params.up() == params.down()) return Regime::symmetric;
    return params.up() > params.down() ? Regime::up_greater : Regime::down_greater;
}

inline const char* regime_label(Regime regime) {
    switch (regime) {
        case Regime::up_greater: return "p>q";
        case Regime::symmetric: return "p=q";
        default: return "p<q";
    }
}

inline const char* relation_label(Relation relation) {
    switch (relation) {
        case Relation::less_equal: return "<=";
        case Relation::equal: return "=";
        default: return ">=";
    }
}

/// Both sides of the maximal inequality at one (t, lambda), computed
/// exactly from the joint law. For up >= down the chain
///   lambda P(M_t >= lambda) <= ceil(lambda) P(M_t >= lambda) <= E[1_{M_t >= lambda} Z_t]
/// holds; the final comparison reverses for up <= down and is an exact
/// equality in the symmetric case.
struct DoobMaximalReport {
    long long t = 0;
    Rat lambda;
    Int ceil_lambda;
    Rat prob;  // P(M_t >= lambda)
    Rat lhs;   // ceil(lambda) * P(M_t >= lambda)
    Rat rhs;   // E[1_{M_t >= lambda} Z_t]
    Relation relation = Relation::equal;
    Regime regime = Regime::symmetric;
    bool holds = false;
};

inline DoobMaximalReport doob_maximal(const WalkParams& params, long long t, const Rat& lambda) {
    if (t < 0) throw std::invalid_argument("doob_maximal: t must be >= 0");
    if (lambda <= 0) throw std::invalid_argument("doob_maximal: lambda must be positive");

    DoobMaximalReport report;
    report.t = t;
    report.lambda = lambda;
    report.ceil_lambda = ceil_rat(lambda);
    report.regime = classify_regime(params);

    const JointDist dist = joint_dist(params, t);
    const Rat level(report.ceil_lambda);
    for (const auto& [state, p] : dist.mass) {
        if (Rat(state.m) >= level) {
            report.prob += p;
            report.rhs += p * Rat(state.z);
        }
    }
    report.lhs = level * report.prob;

    report.relation = report.lhs == report.rhs ? Relation::equal
                                               : (report.lhs < report.rhs ? Relation::less_equal : Relation::greater_equal);
    switch (report.regime) {
        case Regime::symmetric: report.holds = report.relation == Relation::equal; break;
        case Regime::up_greater: report.holds = report.lhs <= report.rhs; break;
        default: report.holds = report.rhs <= report.lhs; break;
    }
    return report;
}

inline std::string doob_csv_header() { return "t,lambda,ceil_lambda,prob,lhs,rhs,relation,regime"; }

inline std::string to_csv_row(const DoobMaximalReport& report) {
    std::ostringstream row;
    row << report.t << ',' << format_rational(report.lambda) << ',' << report.ceil_lambda.str() << ','
        << format_rational(report.prob) << ',' << format_rational(report.lhs) << ','
        << format_rational(report.rhs) << ',' << relation_label(report.relation) << ','
        << regime_label(report.regime);
    return row.str();
}

/// Both sides of the L^p bound E[M_t^pi] <= (pi/(pi-1))^pi E[|Z_t|^pi].
/// Integer exponents stay in exact rationals; fractional exponents are
/// evaluated in floating point with the documented 1e-12 relative slack.
struct DoobLpReport {
    long long t = 0;
    Rat exponent;
    bool exact = false;
    Rat lhs_exact, rhs_exact;        // populated when exact
    double lhs = 0, rhs = 0;
    std::optional<Rat> intermediate; // (1-pi) E[M^pi] + pi E[M^(pi-1) Z], integer pi only
    bool holds = false;

    static constexpr double kFloatSlack = 1e-12;
};

inline DoobLpReport doob_lp(const WalkParams& params, long long t, const Rat& exponent) {
    if (params.up() < params.down())
        throw std::domain_error("doob_lp: requires up-step probability >= down-step probability");
    if (exponent <= 1) throw std::invalid_argument("doob_lp: exponent must be > 1");
    if (t < 0) throw std::invalid_argument("doob_lp: t must be >= 0");

    DoobLpReport report;
    report.t = t;
    report.exponent = exponent;
    report.exact = denominator(exponent) == 1;

    const JointDist dist = joint_dist(params, t);
    if (report.exact) {
        const long long pi = numerator(exponent).convert_to<long long>();
        Rat moment_max(0), moment_abs(0), moment_cross(0);
        for (const auto& [state, p] : dist.mass) {
            moment_max += p * pow_rat(Rat(state.m), pi);
            moment_abs += p * pow_rat(Rat(state.z < 0 ? -state.z : state.z), pi);
            moment_cross += p * pow_rat(Rat(state.m), pi - 1) * Rat(state.z);
        }
        report.lhs_exact = moment_max;
        report.rhs_exact = pow_rat(exponent / (exponent - 1), pi) * moment_abs;
        report.lhs = to_double(report.lhs_exact);
        report.rhs = to_double(report.rhs_exact);
        report.intermediate = (1 - exponent) * moment_max + exponent * moment_cross;
        report.holds = report.lhs_exact <= report.rhs_exact;
    } else {
        const double pi = to_double(exponent);
        double moment_max = 0, moment_abs = 0;
        for (const auto& [state, p] : dist.mass) {
            moment_max += to_double(p) * std::pow(static_cast<double>(state.m), pi);
            moment_abs += to_double(p) * std::pow(std::abs(static_cast<double>(state.z)), pi);
        }
        report.lhs = moment_max;
        report.rhs = std::pow(pi / (pi - 1), pi) * moment_abs;
        report.holds = report.lhs <= report.rhs * (1 + DoobLpReport::kFloatSlack);
    }
    return report;
}

/// E[U_t] for the auxiliary martingale behind the maximal inequality,
///   U_t = 1_{M_t >= level} (M_t - level) - 1_{M_t >= level} g(M_t - Z_t);
/// exactly zero whenever down/up is rational (both regimes).
inline Rat doob_witness_mean(const WalkParams& params, long long t, long long level) {
    const JointDist dist = joint_dist(params, t);
    return expectation(dist, [&](const State& s) {
        if (s.m < level) return Rat(0);
        return Rat(s.m - level) - g_pq_exact(params, s.m - s.z);
    });
}

/// The L^p proof's boundary table F(y) = sum_{k<y} pi k^(pi-1) for
/// integer pi; dominated by y^pi.
inline Rat power_sum_boundary(long long pi, long long y) {
    Rat total(0);
    for (long long k = 0; k < y; ++k) total += Rat(pi) * pow_rat(Rat(k), pi - 1);
    return total;
}

}  // namespace rwmax
