#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rwmax/joint_dist.hpp"
#include "rwmax/measures.hpp"
#include "rwmax/rational.hpp"
#include "rwmax/rng.hpp"
#include "rwmax/walk.hpp"

namespace rwmax {

/// The embedding rule for a centered measure mu: stop the walk the first
/// time its running maximum equals psi(Z_t), where on the support
///   psi(x) = x + mu({x+1, x+2, ...}) / mu({x})
/// and psi is undefined off the support. Valid plans have psi integer,
/// nonnegative and strictly increasing along the support, which forces
/// psi(x_i) = i.
class EmbeddingPlan {
public:
    explicit EmbeddingPlan(CenteredMeasure measure) : measure_(std::move(measure)) {
        const auto& atoms = measure_.atoms();
        support_.reserve(atoms.size());
        psi_.reserve(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const long long x = atoms[i].x;
            const Rat value = Rat(x) + measure_.tail_above(x) / measure_.mass_at(x);
            if (denominator(value) != 1 || value < 0)
                throw std::invalid_argument("embedding: psi(" + std::to_string(x) + ") = " +
                                            format_rational(value) +
                                            " is not a nonnegative integer (integrality assumption fails)");
            const long long psi = numerator(value).convert_to<long long>();
            if (!psi_.empty() && psi <= psi_.back())
                throw std::invalid_argument("embedding: psi is not strictly increasing between x=" +
                                            std::to_string(support_.back()) + " and x=" + std::to_string(x) +
                                            " (monotonicity assumption fails)");
            support_.push_back(x);
            psi_.push_back(psi);
        }
        for (std::size_t i = 0; i < psi_.size(); ++i)
            if (psi_[i] != static_cast<long long>(i))
                throw std::logic_error("embedding: psi(x_" + std::to_string(i) + ") = " + std::to_string(psi_[i]) +
                                       " != " + std::to_string(i) + "; measure violates the index identity");
        shift_ = psi_.front() - support_.front();
    }

    const CenteredMeasure& measure() const { return measure_; }
    const std::vector<long long>& support() const { return support_; }
    const std::vector<long long>& psi() const { return psi_; }
    /// C = psi(x_0) - x_0, the largest value of psi - x on the support.
    long long shift() const { return shift_; }

    /// psi at a walk position, or nothing when z is off the support. For
    /// the geometric family the rule extends past the truncated atom
    /// list: psi(x) = x + n on the whole support.
    std::optional<long long> psi_of(long long z) const {
        if (measure_.kind() == MeasureKind::geometric) {
            if (z < -measure_.geometric_n()) return std::nullopt;
            return z + measure_.geometric_n();
        }
        auto it = std::lower_bound(support_.begin(), support_.end(), z);
        if (it == support_.end() || *it != z) return std::nullopt;
        return psi_[static_cast<std::size_t>(it - support_.begin())];
    }

private:
    CenteredMeasure measure_;
    std::vector<long long> support_;
    std::vector<long long> psi_;
    long long shift_ = 0;
};

inline EmbeddingPlan build_plan(const CenteredMeasure& measure) { return EmbeddingPlan(measure); }

/// Law of the stopped walk plus the mean stopping time, in one of two
/// modes: exact rationals (finite measures, absorbing-chain computation)
/// or Monte Carlo with standard errors.
struct StoppedLaw {
    enum class Mode { exact, monte_carlo };

    struct McAtom {
        long long x = 0;
        std::uint64_t count = 0;
        double freq = 0;
        double stderr_freq = 0;
    };

    Mode mode = Mode::exact;
    std::string method;  // "linear-solve" | "iteration" | "monte-carlo"

    // exact mode
    std::vector<std::pair<long long, Rat>> atoms;
    Rat expected_T;
    Rat total_mass;
    long long transient_states = 0;

    // Monte Carlo mode
    std::vector<McAtom> mc_atoms;
    double expected_T_mc = 0;
    double expected_T_stderr = 0;
    std::uint64_t runs = 0;
    std::uint64_t completed_runs = 0;
    std::uint64_t capped_runs = 0;
    std::uint64_t step_cap = 0;
    std::uint64_t seed = 0;
    int threads = 1;

    std::vector<std::string> warnings;

    nlohmann::json to_json() const {
        nlohmann::json doc;
        if (mode == Mode::exact) {
            doc["mode"] = "exact";
            doc["method"] = method;
            nlohmann::json list = nlohmann::json::array();
            for (const auto& [x, p] : atoms) list.push_back({{"x", x}, {"p", format_rational(p)}});
            doc["atoms"] = std::move(list);
            doc["expected_T"] = format_rational(expected_T);
            doc["total_mass"] = format_rational(total_mass);
            doc["transient_states"] = transient_states;
        } else {
            doc["mode"] = "monte-carlo";
            doc["method"] = method;
            nlohmann::json list = nlohmann::json::array();
            for (const McAtom& atom : mc_atoms)
                list.push_back({{"x", atom.x}, {"p", atom.freq}, {"stderr", atom.stderr_freq}, {"count", atom.count}});
            doc["atoms"] = std::move(list);
            doc["expected_T"] = expected_T_mc;
            doc["expected_T_stderr"] = expected_T_stderr;
            doc["runs"] = runs;
            doc["completed_runs"] = completed_runs;
            doc["capped_runs"] = capped_runs;
            doc["step_cap"] = step_cap;
            doc["seed"] = seed;
            doc["threads"] = threads;
            doc["prng"] = SplitMix64::kAlgorithm;
        }
        if (!warnings.empty()) doc["warnings"] = warnings;
        return doc;
    }
};

namespace detail {

/// Finite absorbing chain of the pair (walk, running maximum) under an
/// embedding plan: state (z, m) is absorbing when m = psi(z). Transient
/// states are enumerated by breadth-first search from (0, 0); for a valid
/// finite plan the search is confined to x_level(m) < z <= m <= top atom.
struct AbsorbingChain {
    std::vector<State> transient;           // BFS discovery order
    std::map<State, int> transient_index;
    std::vector<int> up_to, down_to, stay_to;  // successor transient index, or ~atom_index if absorbing
    std::vector<bool> atom_reached;
    int start = -1;                          // -1: (0,0) is itself absorbing
    long long max_descent = 1;               // worst z - x_level over transient states

    static constexpr long long kStateLimit = 2'000'000;

    AbsorbingChain(const EmbeddingPlan& plan, const WalkParams& params) {
        atom_reached.assign(plan.support().size(), false);
        const auto absorb_index = [&](long long z, long long m) -> std::optional<int> {
            const auto psi = plan.psi_of(z);
            if (psi && *psi == m) return static_cast<int>(*psi);  // psi(x_i) = i indexes the atom
            return std::nullopt;
        };
        if (const auto atom = absorb_index(0, 0)) {
            atom_reached[static_cast<std::size_t>(*atom)] = true;
            return;
        }
        transient.push_back(State{0, 0});
        transient_index[State{0, 0}] = 0;
        start = 0;
        const bool lazy = params.stay() != 0;
        for (std::size_t head = 0; head < transient.size(); ++head) {
            const State state = transient[head];  // copy: vector may grow
            const auto handle = [&](long long z, long long m) -> int {
                if (const auto atom = absorb_index(z, m)) {
                    atom_reached[static_cast<std::size_t>(*atom)] = true;
                    return ~*atom;
                }
                auto [it, inserted] = transient_index.try_emplace(State{z, m}, static_cast<int>(transient.size()));
                if (inserted) {
                    transient.push_back(State{z, m});
                    if (static_cast<long long>(transient.size()) > kStateLimit)
                        throw std::runtime_error("embedding: transient state space exceeds safety limit");
                }
                return it->second;
            };
            const long long up_z = state.z + 1;
            up_to.push_back(handle(up_z, std::max(state.m, up_z)));
            down_to.push_back(handle(state.z - 1, state.m));
            stay_to.push_back(lazy ? handle(state.z, state.m) : 0);
        }
        for (const State& state : transient) {
            // absorbing level m sits at z = support[m]; every down-run from
            // (z, m) meets it within z - support[m] steps
            const long long floor_z = plan.support()[static_cast<std::size_t>(state.m)];
            max_descent = std::max(max_descent, state.z - floor_z);
        }
    }
};

}  // namespace detail

/// Exact stopped law by the fundamental-matrix route: solve the linear
/// system for expected visit counts of every transient state, then read
/// off absorption masses and E[T] as the total visit count.
inline StoppedLaw stopped_law_solve(const EmbeddingPlan& plan, const WalkParams& params) {
    if (!params.symmetric())
        throw std::domain_error("embedding: exact mode requires the symmetric walk (p = q)");
    if (plan.measure().kind() != MeasureKind::finite)
        throw std::domain_error("embedding: exact mode requires a finite-support measure");

    const detail::AbsorbingChain chain(plan, params);
    const std::size_t n = chain.transient.size();
    StoppedLaw law;
    law.mode = StoppedLaw::Mode::exact;
    law.method = "linear-solve";
    law.transient_states = static_cast<long long>(n);

    std::vector<Rat> visits;
    if (chain.start < 0) {
        visits.assign(n, Rat(0));
    } else {
        // A = (I - Q)^T augmented with e_start; Gaussian elimination over
        // exact rationals.
        std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n + 1, Rat(0)));
        for (std::size_t i = 0; i < n; ++i) a[i][i] = 1;
        const auto scatter = [&](std::size_t from, int to, const Rat& p) {
            if (to >= 0) a[static_cast<std::size_t>(to)][from] -= p;
        };
        for (std::size_t i = 0; i < n; ++i) {
            scatter(i, chain.up_to[i], params.up());
            scatter(i, chain.down_to[i], params.down());
            if (params.stay() != 0) scatter(i, chain.stay_to[i], params.stay());
        }
        a[static_cast<std::size_t>(chain.start)][n] = 1;

        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && a[pivot][col] == 0) ++pivot;
            if (pivot == n) throw std::runtime_error("embedding: singular transient system");
            if (pivot != col) std::swap(a[pivot], a[col]);
            const Rat inv = 1 / a[col][col];
            for (std::size_t j = col; j <= n; ++j) a[col][j] *= inv;
            for (std::size_t row = 0; row < n; ++row) {
                if (row == col || a[row][col] == 0) continue;
                const Rat factor = a[row][col];
                for (std::size_t j = col; j <= n; ++j) a[row][j] -= factor * a[col][j];
            }
        }
        visits.resize(n);
        for (std::size_t i = 0; i < n; ++i) visits[i] = a[i][n];
    }

    std::vector<Rat> absorbed(plan.support().size(), Rat(0));
    if (chain.start < 0) {
        absorbed[0] = 1;  // (0,0) absorbing means the measure is the point mass at 0
    } else {
        const auto collect = [&](std::size_t from, int to, const Rat& p) {
            if (to < 0) absorbed[static_cast<std::size_t>(~to)] += visits[from] * p;
        };
        for (std::size_t i = 0; i < n; ++i) {
            collect(i, chain.up_to[i], params.up());
            collect(i, chain.down_to[i], params.down());
            if (params.stay() != 0) collect(i, chain.stay_to[i], params.stay());
        }
    }

    law.expected_T = 0;
    for (const Rat& v : visits) law.expected_T += v;
    law.total_mass = 0;
    for (std::size_t j = 0; j < absorbed.size(); ++j) {
        law.total_mass += absorbed[j];
        if (absorbed[j] != 0) law.atoms.emplace_back(plan.support()[j], absorbed[j]);
    }
    for (std::size_t j = 0; j < chain.atom_reached.size(); ++j)
        if (!chain.atom_reached[j])
            law.warnings.push_back("absorbing atom x=" + std::to_string(plan.support()[j]) +
                                   " is unreachable from the origin");
    if (law.total_mass != 1) throw std::runtime_error("embedding: absorbed mass != 1 in exact solve");
    return law;
}

/// Exact stopped law by certified iteration: propagate rational mass
/// until the transient remainder drops below 2^-tail_exponent, bracket
/// every answer by rigorous enclosures, then recover the exact rationals
/// as the simplest fractions inside the brackets.
///
/// The enclosure for E[T] uses the descent argument: from any transient
/// state, `max_descent` consecutive down-steps force absorption, so the
/// transient mass contracts by at least (1 - down^max_descent) every
/// max_descent steps and the tail of sum_t m_t is at most
/// m_T * max_descent / down^max_descent.
inline StoppedLaw stopped_law_iterate(const EmbeddingPlan& plan, const WalkParams& params,
                                      unsigned tail_exponent = 192) {
    if (!params.symmetric())
        throw std::domain_error("embedding: exact mode requires the symmetric walk (p = q)");
    if (plan.measure().kind() != MeasureKind::finite)
        throw std::domain_error("embedding: exact mode requires a finite-support measure");

    const detail::AbsorbingChain chain(plan, params);
    const std::size_t n = chain.transient.size();
    StoppedLaw law;
    law.mode = StoppedLaw::Mode::exact;
    law.method = "iteration";
    law.transient_states = static_cast<long long>(n);

    std::vector<Rat> absorbed(plan.support().size(), Rat(0));
    Rat time_sum(0);     // sum of transient mass over elapsed steps = E[T] lower partial
    Rat transient_mass(0);

    if (chain.start < 0) {
        absorbed[0] = 1;
    } else {
        const Rat threshold = pow_rat(Rat(1, 2), static_cast<long long>(tail_exponent));
        std::vector<Rat> mass(n, Rat(0)), next(n, Rat(0));
        mass[static_cast<std::size_t>(chain.start)] = 1;
        transient_mass = 1;
        Rat absorbed_total(0);
        while (transient_mass >= threshold) {
            time_sum += transient_mass;
            for (Rat& v : next) v = 0;
            const auto flow = [&](std::size_t from, int to, const Rat& p) {
                if (mass[from] == 0) return;
                const Rat amount = mass[from] * p;
                if (to >= 0)
                    next[static_cast<std::size_t>(to)] += amount;
                else {
                    absorbed[static_cast<std::size_t>(~to)] += amount;
                    absorbed_total += amount;
                }
            };
            for (std::size_t i = 0; i < n; ++i) {
                flow(i, chain.up_to[i], params.up());
                flow(i, chain.down_to[i], params.down());
                if (params.stay() != 0) flow(i, chain.stay_to[i], params.stay());
            }
            mass.swap(next);
            transient_mass = 0;
            for (const Rat& v : mass) transient_mass += v;
            if (absorbed_total + transient_mass != 1)
                throw std::runtime_error("embedding: mass-conservation certificate failed during iteration");
        }
    }

    // Enclosures: each atom lies in [absorbed_j, absorbed_j + remainder];
    // E[T] lies in [time_sum + remainder-as-one-step, time_sum + tail bound].
    const Rat remainder = transient_mass;
    law.total_mass = 0;
    for (std::size_t j = 0; j < absorbed.size(); ++j) {
        const Rat exact = simplest_in_interval(absorbed[j], absorbed[j] + remainder);
        law.total_mass += exact;
        if (exact != 0) law.atoms.emplace_back(plan.support()[j], exact);
    }
    if (remainder == 0) {
        law.expected_T = time_sum;
    } else {
        const Rat tail_cap =
            remainder * Rat(chain.max_descent) / pow_rat(params.down(), chain.max_descent);
        law.expected_T = simplest_in_interval(time_sum + remainder, time_sum + tail_cap);
    }
    for (std::size_t j = 0; j < chain.atom_reached.size(); ++j)
        if (!chain.atom_reached[j])
            law.warnings.push_back("absorbing atom x=" + std::to_string(plan.support()[j]) +
                                   " is unreachable from the origin");
    if (law.total_mass != 1)
        throw std::runtime_error("embedding: reconstructed law does not sum to 1; raise tail_exponent");
    return law;
}

enum class ExactMethod { automatic, linear_solve, iteration };

/// Exact stopped law. The linear solve is used while the transient state
/// count stays within `solve_state_limit` (its cost grows cubically);
/// beyond it the certified iteration takes over.
inline StoppedLaw stopped_law_exact(const EmbeddingPlan& plan, const WalkParams& params,
                                    ExactMethod method = ExactMethod::automatic,
                                    long long solve_state_limit = 10'000) {
    if (!params.symmetric())
        throw std::domain_error("embedding: exact mode requires the symmetric walk (p = q)");
    if (plan.measure().kind() != MeasureKind::finite)
        throw std::domain_error("embedding: exact mode requires a finite-support measure");
    switch (method) {
        case ExactMethod::linear_solve: return stopped_law_solve(plan, params);
        case ExactMethod::iteration: return stopped_law_iterate(plan, params);
        default: break;
    }
    const detail::AbsorbingChain chain(plan, params);
    if (static_cast<long long>(chain.transient.size()) <= solve_state_limit)
        return stopped_law_solve(plan, params);
    return stopped_law_iterate(plan, params);
}

struct McOptions {
    std::uint64_t step_cap = 10'000'000;
    int threads = 1;
    double capped_warn_fraction = 1e-3;
};

/// Monte Carlo stopped law: simulate until the maximum meets psi(Z), with
/// a per-run step cap. Deterministic for fixed (seed, threads): each
/// worker owns a split stream and results merge in worker order.
inline StoppedLaw stopped_law_mc(const EmbeddingPlan& plan, const WalkParams& params, std::uint64_t n_runs,
                                 std::uint64_t seed, const McOptions& options = {}) {
    if (!params.symmetric())
        throw std::domain_error("embedding: requires the symmetric walk (p = q)");
    if (n_runs < 1) throw std::invalid_argument("embedding: need at least one run");
    const int threads = std::max(1, options.threads);

    struct Accumulator {
        std::map<long long, std::uint64_t> hits;
        double t_sum = 0, t_sq_sum = 0;
        std::uint64_t capped = 0;
    };
    std::vector<Accumulator> partial(static_cast<std::size_t>(threads));
    const detail::StepThresholds thresholds(params);
    const SplitMix64 root(seed);

    const auto worker = [&](int index) {
        const std::uint64_t base = n_runs / static_cast<std::uint64_t>(threads);
        const std::uint64_t extra = n_runs % static_cast<std::uint64_t>(threads);
        const std::uint64_t mine = base + (static_cast<std::uint64_t>(index) < extra ? 1 : 0);
        SplitMix64 rng = root.split(static_cast<std::uint64_t>(index));
        Accumulator& acc = partial[static_cast<std::size_t>(index)];
        for (std::uint64_t run = 0; run < mine; ++run) {
            long long z = 0, m = 0;
            std::uint64_t t = 0;
            bool stopped = false;
            while (t <= options.step_cap) {
                const auto psi = plan.psi_of(z);
                if (psi && *psi == m) {
                    stopped = true;
                    break;
                }
                const int step = thresholds.step(rng.next());
                z += step;
                if (z > m) m = z;
                ++t;
            }
            if (!stopped) {
                ++acc.capped;
                continue;
            }
            ++acc.hits[z];
            acc.t_sum += static_cast<double>(t);
            acc.t_sq_sum += static_cast<double>(t) * static_cast<double>(t);
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker, i);
        for (std::thread& th : pool) th.join();
    }

    Accumulator total;
    for (const Accumulator& acc : partial) {
        for (const auto& [x, count] : acc.hits) total.hits[x] += count;
        total.t_sum += acc.t_sum;
        total.t_sq_sum += acc.t_sq_sum;
        total.capped += acc.capped;
    }

    StoppedLaw law;
    law.mode = StoppedLaw::Mode::monte_carlo;
    law.method = "monte-carlo";
    law.runs = n_runs;
    law.capped_runs = total.capped;
    law.completed_runs = n_runs - total.capped;
    law.step_cap = options.step_cap;
    law.seed = seed;
    law.threads = threads;

    const double n = static_cast<double>(law.completed_runs);
    for (const auto& [x, count] : total.hits) {
        StoppedLaw::McAtom atom;
        atom.x = x;
        atom.count = count;
        atom.freq = static_cast<double>(count) / n;
        atom.stderr_freq = std::sqrt(atom.freq * (1 - atom.freq) / n);
        law.mc_atoms.push_back(atom);
    }
    if (law.completed_runs > 0) {
        law.expected_T_mc = total.t_sum / n;
        if (law.completed_runs > 1) {
            const double variance = (total.t_sq_sum - total.t_sum * total.t_sum / n) / (n - 1);
            law.expected_T_stderr = std::sqrt(std::max(variance, 0.0) / n);
        }
    }
    if (static_cast<double>(total.capped) >
        options.capped_warn_fraction * static_cast<double>(n_runs))
        law.warnings.push_back("termination warning: " + std::to_string(total.capped) + " of " +
                               std::to_string(n_runs) + " runs hit the step cap");
    return law;
}

struct VerifyOptions {
    double band_factor = 3.0;  // width of the Monte Carlo acceptance band in standard errors
    double min_mass = 0.0;     // skip MC atom checks below this target mass
};

struct EmbeddingVerdict {
    bool pass = true;
    long long checks = 0;
    std::vector<std::string> failures;

    void record(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            pass = false;
            failures.push_back(what);
        }
    }
};

/// Checks (i) that the stopped law reproduces the measure atom by atom
/// and (ii) the structural identity P(Z_T > x) = (psi(x) - x) P(Z_T = x)
/// on the support: exact equality in exact mode, band_factor standard
/// errors plus the declared truncation budget in Monte Carlo mode.
inline EmbeddingVerdict verify_embedding(const EmbeddingPlan& plan, const WalkParams& params,
                                         const StoppedLaw& law, const VerifyOptions& options = {}) {
    (void)params;
    EmbeddingVerdict verdict;
    const CenteredMeasure& mu = plan.measure();

    if (law.mode == StoppedLaw::Mode::exact) {
        std::map<long long, Rat> got(law.atoms.begin(), law.atoms.end());
        for (const Atom& atom : mu.atoms()) {
            auto it = got.find(atom.x);
            const Rat freq = it == got.end() ? Rat(0) : it->second;
            verdict.record(freq == atom.mass, "atom x=" + std::to_string(atom.x) + ": law gives " +
                                                  format_rational(freq) + ", measure needs " +
                                                  format_rational(atom.mass));
            if (it != got.end()) got.erase(it);
        }
        for (const auto& [x, p] : got)
            verdict.record(false, "law puts mass " + format_rational(p) + " outside the support at x=" +
                                      std::to_string(x));
        // structural identity, exact
        Rat tail(0);
        for (std::size_t j = plan.support().size(); j-- > 0;) {
            const long long x = plan.support()[j];
            auto it = std::find_if(law.atoms.begin(), law.atoms.end(),
                                   [&](const auto& a) { return a.first == x; });
            const Rat at_x = it == law.atoms.end() ? Rat(0) : it->second;
            const Rat factor(plan.psi()[j] - x);
            verdict.record(tail == factor * at_x,
                           "identity P(Z>x) = (psi-x) P(Z=x) fails at x=" + std::to_string(x) + ": " +
                               format_rational(tail) + " vs " + format_rational(factor * at_x));
            tail += at_x;
        }
        return verdict;
    }

    // Monte Carlo: compare against hypothesized masses with bands
    // band_factor * se + truncation budget, se from the target law.
    if (law.completed_runs == 0) {
        verdict.record(false, "no completed runs: every run hit the step cap");
        return verdict;
    }
    const double n = static_cast<double>(law.completed_runs);
    const double budget =
        mu.kind() == MeasureKind::geometric ? to_double(mu.truncation_tail()) : 0.0;
    std::map<long long, double> freq;
    for (const auto& atom : law.mc_atoms) {
        freq[atom.x] = atom.freq;
        verdict.record(mu.in_support(atom.x) && mu.mass_at(atom.x) > 0,
                       "observed stop at x=" + std::to_string(atom.x) + " outside the support");
    }
    for (const Atom& atom : mu.atoms()) {
        const double target = to_double(atom.mass);
        if (target < options.min_mass) continue;
        const double observed = freq.count(atom.x) ? freq[atom.x] : 0.0;
        const double se = std::sqrt(target * (1 - target) / n);
        const double band = options.band_factor * se + budget;
        verdict.record(std::abs(observed - target) <= band,
                       "atom x=" + std::to_string(atom.x) + ": |" + std::to_string(observed) + " - " +
                           std::to_string(target) + "| exceeds band " + std::to_string(band));
    }
    for (std::size_t j = 0; j < plan.support().size(); ++j) {
        const long long x = plan.support()[j];
        const double target_mass = to_double(mu.mass_at(x));
        if (target_mass < options.min_mass) continue;
        const double target_tail = to_double(mu.tail_above(x));
        const double c = static_cast<double>(plan.psi()[j] - x);
        double observed_tail = 0, observed_at = 0;
        for (const auto& [x2, f] : freq) {
            if (x2 > x) observed_tail += f;
            if (x2 == x) observed_at = f;
        }
        const double variance = target_tail * (1 - target_tail) + c * c * target_mass * (1 - target_mass) +
                                2 * c * target_tail * target_mass;
        const double band = options.band_factor * std::sqrt(variance / n) + (1 + c) * budget;
        verdict.record(std::abs(observed_tail - c * observed_at) <= band,
                       "identity P(Z>x) = (psi-x) P(Z=x) off band at x=" + std::to_string(x));
    }
    return verdict;
}

/// E[U_t] for the stopped-law proof martingale of one support point,
///   U_t = 1_{M_t > psi} - 1_{M_t = psi} (M_t - Z_t);
/// exactly zero for the symmetric walk at every t.
inline Rat embedding_witness_mean(const WalkParams& params, long long t, long long psi) {
    const JointDist dist = joint_dist(params, t);
    return expectation(dist, [&](const State& s) {
        if (s.m > psi) return Rat(1);
        if (s.m == psi) return -Rat(s.m - s.z);
        return Rat(0);
    });
}

}  // namespace rwmax
