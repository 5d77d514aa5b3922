#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rwmax/difference.hpp"
#include "rwmax/rational.hpp"
#include "rwmax/walk.hpp"

namespace rwmax {

/// The Kennedy martingale a^{M_t} b^t h(M_t - Z_t), parameterized by
/// nonzero rationals a, b and the target drawdown n of the stopping time
/// tau = inf{t : M_t - Z_t = n}.
///
/// h solves the linear recurrence
///     down * h(x+1) + (stay - 1/b) * h(x) + up * h(x-1) = 0
/// whose characteristic roots alpha+- are irrational in general, so h and
/// the roots are carried in floating point with explicit residual checks.
struct KennedyParams {
    Rat a, b;
    int gap_target = 1;
    WalkParams params;
    double alpha_plus = 0, alpha_minus = 0;
    std::vector<double> h;                // h(0..x_max)
    double recurrence_residual = 0;       // worst relative residual of the recurrence
    double initial_residual = 0;          // relative residual of the h(1) initial condition
};

/// Exact discriminant (stay - 1/b)^2 - 4 up down of the characteristic
/// equation; the construction requires it to be positive.
inline Rat kennedy_discriminant(const Rat& b, const WalkParams& params) {
    const Rat shifted = params.stay() - 1 / b;
    return shifted * shifted - 4 * params.up() * params.down();
}

inline KennedyParams kennedy_build(const Rat& a, const Rat& b, int gap_target, const WalkParams& params,
                                   long long x_max = 32, double tolerance = 1e-10) {
    if (a == 0 || b == 0) throw std::invalid_argument("kennedy: a and b must be nonzero");
    if (gap_target < 1) throw std::invalid_argument("kennedy: target drawdown must be >= 1");
    if (x_max < std::max(gap_target, 1))
        throw std::invalid_argument("kennedy: x_max must cover the target drawdown");
    const Rat disc = kennedy_discriminant(b, params);
    if (disc <= 0)
        throw std::domain_error("kennedy: (stay - 1/b)^2 - 4*up*down must be positive, got " +
                                format_rational(disc));

    const double shifted = to_double(params.stay() - 1 / b);
    const double root = std::sqrt(to_double(disc));
    const double down = to_double(params.down());
    const double up = to_double(params.up());
    const double a_dbl = to_double(a);

    KennedyParams kp{a, b, gap_target, params, 0, 0, {}, 0, 0};
    kp.alpha_plus = (-shifted + root) / (2 * down);
    kp.alpha_minus = (-shifted - root) / (2 * down);

    const double coeff_plus = a_dbl - 1 / kp.alpha_minus;
    const double coeff_minus = a_dbl - 1 / kp.alpha_plus;
    kp.h.resize(static_cast<std::size_t>(x_max) + 1);
    double pow_plus = 1, pow_minus = 1;
    for (long long x = 0; x <= x_max; ++x) {
        kp.h[static_cast<std::size_t>(x)] = coeff_plus * pow_plus - coeff_minus * pow_minus;
        pow_plus *= kp.alpha_plus;
        pow_minus *= kp.alpha_minus;
    }

    for (long long x = 1; x + 1 <= x_max; ++x) {
        const double t1 = down * kp.h[x + 1];
        const double t2 = shifted * kp.h[x];
        const double t3 = up * kp.h[x - 1];
        const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), 1.0});
        kp.recurrence_residual = std::max(kp.recurrence_residual, std::abs(t1 + t2 + t3) / scale);
    }
    const double lhs = kp.h[1];
    const double rhs = to_double((1 / b - params.stay() - params.up() * a) / params.down()) * kp.h[0];
    kp.initial_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
    if (kp.recurrence_residual > tolerance || kp.initial_residual > tolerance)
        throw std::runtime_error("kennedy: internal consistency failure, recurrence residual " +
                                 std::to_string(kp.recurrence_residual));
    return kp;
}

/// The martingale as a time-space table f(t, x, y) = a^y b^t h(x), ready
/// for the sufficient-condition checker.
inline TimeSpaceFunction<double> kennedy_time_space(const KennedyParams& kp, long long t_max, long long x_max,
                                                    long long y_max) {
    if (x_max >= static_cast<long long>(kp.h.size()))
        throw std::invalid_argument("kennedy table: h was built on a smaller grid");
    const double a = to_double(kp.a);
    const double b = to_double(kp.b);
    TimeSpaceFunction<double> f(t_max, x_max, y_max);
    for (long long t = 0; t <= t_max; ++t)
        for (long long x = 0; x <= x_max; ++x)
            for (long long y = 0; y <= y_max; ++y)
                f.at(t, x, y) = std::pow(a, static_cast<double>(y)) * std::pow(b, static_cast<double>(t)) *
                                kp.h[static_cast<std::size_t>(x)];
    return f;
}

/// Closed form of E[a^{Z_tau} b^tau] for tau = first time the drawdown
/// reaches n:  h(0) a^{-n} / h(n).
inline double kennedy_pgf(const KennedyParams& kp) {
    const std::size_t n = static_cast<std::size_t>(kp.gap_target);
    const double numerator = kp.h[0] * std::pow(to_double(kp.a), -static_cast<double>(kp.gap_target));
    const double denominator = kp.h[n];
    // Pole scale: the two summands of h(n) before cancellation.
    const double scale =
        std::abs((to_double(kp.a) - 1 / kp.alpha_minus) * std::pow(kp.alpha_plus, double(kp.gap_target))) +
        std::abs((to_double(kp.a) - 1 / kp.alpha_plus) * std::pow(std::abs(kp.alpha_minus), double(kp.gap_target)));
    if (std::abs(denominator) <= 1e-12 * std::max(scale, 1.0))
        throw std::domain_error("kennedy pgf: denominator vanishes for these (a, b, n)");
    return numerator / denominator;
}

/// Exact-rational truncation E[a^{Z_tau} b^tau 1_{tau <= horizon}],
/// computed by dynamic programming on the reflected drawdown chain
/// (drawdown 0: up stays at 0, down moves to 1; drawdown x >= 1: up moves
/// to x-1, down to x+1) while tracking Z multiplicatively through a^Z.
/// Serves as the independent cross-check of the closed form.
inline Rat kennedy_pgf_truncated(const Rat& a, const Rat& b, int gap_target, const WalkParams& params,
                                 long long horizon) {
    if (a == 0 || b == 0) throw std::invalid_argument("kennedy: a and b must be nonzero");
    if (gap_target < 1) throw std::invalid_argument("kennedy: target drawdown must be >= 1");
    const Rat a_inv = 1 / a;
    const std::size_t n = static_cast<std::size_t>(gap_target);

    // weight[g] = E[a^{Z_t} b^t ; tau > t, drawdown = g]
    std::vector<Rat> weight(n, Rat(0)), next(n, Rat(0));
    weight[0] = 1;
    Rat absorbed(0);
    for (long long t = 1; t <= horizon; ++t) {
        for (Rat& w : next) w = 0;
        Rat absorbed_now(0);
        for (std::size_t g = 0; g < n; ++g) {
            if (weight[g] == 0) continue;
            const Rat up_flow = weight[g] * params.up() * a;
            const Rat down_flow = weight[g] * params.down() * a_inv;
            next[g == 0 ? 0 : g - 1] += up_flow;
            if (g + 1 == n)
                absorbed_now += down_flow;
            else
                next[g + 1] += down_flow;
            if (params.stay() != 0) next[g] += weight[g] * params.stay();
        }
        absorbed += b * absorbed_now;
        for (std::size_t g = 0; g < n; ++g) weight[g] = next[g] * b;
    }
    return absorbed;
}

/// Rigorous bound on the truncation error of kennedy_pgf_truncated:
/// |Z_t| <= t, so each omitted term is at most rho^t with
/// rho = |b| * max(|a|, 1/|a|); the tail sums to rho^(horizon+1)/(1-rho).
inline double kennedy_tail_bound(const Rat& a, const Rat& b, long long horizon) {
    const double growth = std::max(std::abs(to_double(a)), std::abs(to_double(1 / a)));
    const double rho = std::abs(to_double(b)) * std::max(growth, 1.0);
    if (rho >= 1) return std::numeric_limits<double>::infinity();
    return std::pow(rho, static_cast<double>(horizon + 1)) / (1 - rho);
}

}  // namespace rwmax
