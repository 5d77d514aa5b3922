#pragma once

#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rwmax/rational.hpp"
#include "rwmax/walk.hpp"

namespace rwmax {

/// Fully populated table f(t, x, y) on the grid [0,T] x [0,X] x [0,Y].
/// Scalar is Rat for exact certificates or double for tables whose
/// entries are irrational (e.g. built from quadratic roots).
template <typename Scalar>
struct TimeSpaceFunction {
    long long t_max = 0, x_max = 0, y_max = 0;
    std::vector<Scalar> values;

    TimeSpaceFunction(long long t_bound, long long x_bound, long long y_bound)
        : t_max(t_bound), x_max(x_bound), y_max(y_bound) {
        if (t_max < 0 || x_max < 0 || y_max < 0)
            throw std::invalid_argument("time-space table: negative grid bound");
        values.assign(static_cast<std::size_t>((t_max + 1) * (x_max + 1) * (y_max + 1)), Scalar(0));
    }

    static TimeSpaceFunction tabulate(long long t_bound, long long x_bound, long long y_bound,
                                      const std::function<Scalar(long long, long long, long long)>& f) {
        TimeSpaceFunction table(t_bound, x_bound, y_bound);
        for (long long t = 0; t <= t_bound; ++t)
            for (long long x = 0; x <= x_bound; ++x)
                for (long long y = 0; y <= y_bound; ++y) table.at(t, x, y) = f(t, x, y);
        return table;
    }

    bool contains(long long t, long long x, long long y) const {
        return 0 <= t && t <= t_max && 0 <= x && x <= x_max && 0 <= y && y <= y_max;
    }

    Scalar& at(long long t, long long x, long long y) {
        check(t, x, y);
        return values[index(t, x, y)];
    }
    const Scalar& at(long long t, long long x, long long y) const {
        check(t, x, y);
        return values[index(t, x, y)];
    }

private:
    std::size_t index(long long t, long long x, long long y) const {
        return static_cast<std::size_t>((t * (x_max + 1) + x) * (y_max + 1) + y);
    }
    void check(long long t, long long x, long long y) const {
        if (!contains(t, x, y)) throw std::out_of_range("time-space table: index outside grid");
    }
};

/// The four first differences of f at (t, x, y).
template <typename Scalar>
struct FirstDifferences {
    Scalar dt_minus;  // f(t,x,y) - f(t-1,x,y)
    Scalar dx_plus;   // f(t,x+1,y) - f(t,x,y)
    Scalar dx_minus;  // f(t,x,y) - f(t,x-1,y)
    Scalar dy_plus;   // f(t,x,y+1) - f(t,x,y)
};

template <typename Scalar>
FirstDifferences<Scalar> diff_ops(const TimeSpaceFunction<Scalar>& f, long long t, long long x, long long y) {
    if (!f.contains(t, x, y) || !f.contains(t - 1, x, y) || !f.contains(t, x + 1, y) ||
        !f.contains(t, x - 1, y) || !f.contains(t, x, y + 1))
        throw std::out_of_range("diff_ops: a shifted index falls outside the grid");
    return FirstDifferences<Scalar>{
        f.at(t, x, y) - f.at(t - 1, x, y),
        f.at(t, x + 1, y) - f.at(t, x, y),
        f.at(t, x, y) - f.at(t, x - 1, y),
        f.at(t, x, y + 1) - f.at(t, x, y),
    };
}

template <typename Scalar>
struct SufficientConditionReport {
    Scalar max_interior_residual{};  // over t>=2, 1<=x<=X-1, 0<=y<=Y
    Scalar max_boundary_residual{};  // over t>=1, x=0, 0<=y<=Y-1
    long long interior_points = 0;
    long long boundary_points = 0;

    /// Exact-zero residuals certify that f(t, M_t - Z_t, M_t) is a
    /// martingale; meaningful only when Scalar is Rat.
    bool certified_exact() const { return max_interior_residual == 0 && max_boundary_residual == 0; }
};

namespace detail {
inline double scalar_abs(double v) { return std::abs(v); }
inline Rat scalar_abs(const Rat& v) { return v < 0 ? -v : v; }
inline double scalar_cast(const Rat& v, double) { return to_double(v); }
inline const Rat& scalar_cast(const Rat& v, const Rat&) { return v; }
}  // namespace detail

/// Evaluates the two difference equations that make f(t, M_t - Z_t, M_t)
/// a martingale and reports the worst absolute residual of each family:
///
///   interior (t>=2, x>=1):  (p+q)/2 * Dx+Dx- f - (p-q)/2 * (Dx+ + Dx-) f + Dt- f
///   boundary (t>=1, x=0):   p * Dy+ f + q * Dx+ f + Dt- f
template <typename Scalar>
SufficientConditionReport<Scalar> check_sufficient_condition(const TimeSpaceFunction<Scalar>& f,
                                                             const WalkParams& params) {
    if (f.t_max < 2 || f.x_max < 2)
        throw std::invalid_argument(
            "sufficient condition: grid too small, interior equation family (t>=2, 1<=x<=X-1) has no testable point");
    if (f.t_max < 1 || f.y_max < 1)
        throw std::invalid_argument(
            "sufficient condition: grid too small, boundary equation family (t>=1, x=0, y<=Y-1) has no testable point");

    const Scalar up = detail::scalar_cast(params.up(), Scalar{});
    const Scalar down = detail::scalar_cast(params.down(), Scalar{});
    const Scalar two(2);

    SufficientConditionReport<Scalar> report;
    for (long long t = 2; t <= f.t_max; ++t)
        for (long long x = 1; x + 1 <= f.x_max; ++x)
            for (long long y = 0; y <= f.y_max; ++y) {
                const Scalar second = f.at(t, x + 1, y) - two * f.at(t, x, y) + f.at(t, x - 1, y);
                const Scalar symmetric = f.at(t, x + 1, y) - f.at(t, x - 1, y);
                const Scalar drift = f.at(t, x, y) - f.at(t - 1, x, y);
                const Scalar residual = (up + down) * second / two - (up - down) * symmetric / two + drift;
                report.max_interior_residual =
                    std::max(report.max_interior_residual, detail::scalar_abs(residual));
                ++report.interior_points;
            }
    for (long long t = 1; t <= f.t_max; ++t)
        for (long long y = 0; y + 1 <= f.y_max; ++y) {
            const Scalar residual = up * (f.at(t, 0, y + 1) - f.at(t, 0, y)) +
                                    down * (f.at(t, 1, y) - f.at(t, 0, y)) +
                                    (f.at(t, 0, y) - f.at(t - 1, 0, y));
            report.max_boundary_residual =
                std::max(report.max_boundary_residual, detail::scalar_abs(residual));
            ++report.boundary_points;
        }
    return report;
}

}  // namespace rwmax
