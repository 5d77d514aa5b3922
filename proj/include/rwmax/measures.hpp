#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rwmax/rational.hpp"

namespace rwmax {

enum class MeasureKind { finite, geometric };

struct Atom {
    long long x;
    Rat mass;
};

/// A centered probability measure on the integers with exact atoms.
///
/// Finite measures carry their full support. The centered geometric
/// family has infinite support, so it is stored parametrically: the atom
/// list is truncated at the smallest x_max whose remaining tail is below
/// the declared truncation_tail, but each listed atom keeps its exact
/// untruncated mass and tail queries use the closed form.
class CenteredMeasure {
public:
    static CenteredMeasure from_atoms(std::vector<std::pair<long long, Rat>> pairs) {
        if (pairs.empty()) throw std::invalid_argument("measure: empty atom list");
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        CenteredMeasure mu;
        mu.kind_ = MeasureKind::finite;
        Rat total(0), mean(0);
        for (const auto& [x, mass] : pairs) {
            if (!mu.atoms_.empty() && mu.atoms_.back().x == x)
                throw std::invalid_argument("measure: duplicate atom at x=" + std::to_string(x));
            if (mass <= 0)
                throw std::invalid_argument("measure: nonpositive mass at x=" + std::to_string(x));
            total += mass;
            mean += Rat(x) * mass;
            mu.atoms_.push_back(Atom{x, mass});
        }
        if (total != 1)
            throw std::invalid_argument("measure: masses sum to " + format_rational(total) + ", expected 1");
        if (mean != 0)
            throw std::invalid_argument("measure: not centered, mean = " + format_rational(mean));
        return mu;
    }

    /// Centered geometric family: mu({x}) = pi (1-pi)^(x+n) for x >= -n
    /// with pi = 1/(1+n). Atoms are listed up to the smallest x_max whose
    /// remaining tail mass is strictly below truncation_tail.
    static CenteredMeasure centered_geometric(int n, Rat truncation_tail) {
        if (n < 1) throw std::invalid_argument("centered geometric: n must be >= 1");
        if (truncation_tail <= 0 || truncation_tail >= 1)
            throw std::invalid_argument("centered geometric: truncation tail must be in (0, 1)");
        CenteredMeasure mu;
        mu.kind_ = MeasureKind::geometric;
        mu.n_ = n;
        mu.truncation_tail_ = truncation_tail;
        const Rat pi = Rat(1, 1 + n);
        const Rat ratio = 1 - pi;  // = n/(n+1)
        Rat mass = pi;             // mu({-n})
        Rat tail = ratio;          // mu({-n+1, -n+2, ...})
        for (long long x = -n;; ++x) {
            mu.atoms_.push_back(Atom{x, mass});
            if (tail < truncation_tail) break;
            mass *= ratio;
            tail *= ratio;
        }
        return mu;
    }

    MeasureKind kind() const { return kind_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    int geometric_n() const { return n_; }
    const Rat& truncation_tail() const { return truncation_tail_; }

    bool in_support(long long x) const {
        if (kind_ == MeasureKind::geometric) return x >= -n_;
        return find_atom(x) != nullptr;
    }

    /// mu({x}); for the geometric kind this is the exact closed form for
    /// every support point, listed or not.
    Rat mass_at(long long x) const {
        if (kind_ == MeasureKind::geometric) {
            if (x < -n_) return Rat(0);
            const Rat pi = Rat(1, 1 + n_);
            return pi * pow_rat(1 - pi, x + n_);
        }
        const Atom* atom = find_atom(x);
        return atom ? atom->mass : Rat(0);
    }

    /// mu({x+1, x+2, ...}), exact in both kinds.
    Rat tail_above(long long x) const {
        if (kind_ == MeasureKind::geometric) {
            if (x < -n_) return Rat(1);
            return pow_rat(Rat(n_, 1 + n_), x + 1 + n_);
        }
        Rat tail(0);
        for (auto it = atoms_.rbegin(); it != atoms_.rend() && it->x > x; ++it) tail += it->mass;
        return tail;
    }

    nlohmann::json to_json() const {
        nlohmann::json doc;
        if (kind_ == MeasureKind::geometric) {
            doc["kind"] = "geometric";
            doc["n"] = n_;
            doc["truncation_tail"] = format_rational(truncation_tail_);
        } else {
            doc["kind"] = "finite";
            nlohmann::json list = nlohmann::json::array();
            for (const Atom& atom : atoms_) list.push_back({{"x", atom.x}, {"mass", format_rational(atom.mass)}});
            doc["atoms"] = std::move(list);
        }
        return doc;
    }

    static CenteredMeasure from_json(const nlohmann::json& doc) {
        if (!doc.is_object()) throw std::invalid_argument("measure file: expected an object");
        const std::string kind = require(doc, "kind").get<std::string>();
        if (kind == "finite") {
            reject_unknown_keys(doc, {"kind", "atoms"});
            const auto& list = require(doc, "atoms");
            if (!list.is_array()) throw std::invalid_argument("measure file: \"atoms\" must be an array");
            std::vector<std::pair<long long, Rat>> pairs;
            for (const auto& entry : list) {
                reject_unknown_keys(entry, {"x", "mass"});
                if (!require(entry, "x").is_number_integer())
                    throw std::invalid_argument("measure file: atom \"x\" must be an integer");
                pairs.emplace_back(require(entry, "x").get<long long>(),
                                   parse_rational(require(entry, "mass").get<std::string>()));
            }
            return from_atoms(std::move(pairs));
        }
        if (kind == "geometric") {
            reject_unknown_keys(doc, {"kind", "n", "truncation_tail"});
            if (!require(doc, "n").is_number_integer())
                throw std::invalid_argument("measure file: \"n\" must be an integer");
            return centered_geometric(require(doc, "n").get<int>(),
                                      parse_rational(require(doc, "truncation_tail").get<std::string>()));
        }
        throw std::invalid_argument("measure file: unknown kind \"" + kind + "\"");
    }

    static CenteredMeasure load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open measure file: " + path);
        nlohmann::json doc;
        in >> doc;
        return from_json(doc);
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::invalid_argument("cannot write measure file: " + path);
        out << to_json().dump(2) << '\n';
    }

private:
    const Atom* find_atom(long long x) const {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                   [](const Atom& atom, long long key) { return atom.x < key; });
        return (it != atoms_.end() && it->x == x) ? &*it : nullptr;
    }

    static const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
        auto it = doc.find(key);
        if (it == doc.end())
            throw std::invalid_argument(std::string("measure file: missing key \"") + key + "\"");
        return *it;
    }

    static void reject_unknown_keys(const nlohmann::json& doc, std::initializer_list<const char*> allowed) {
        if (!doc.is_object()) throw std::invalid_argument("measure file: expected an object");
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            bool ok = false;
            for (const char* key : allowed) ok = ok || it.key() == key;
            if (!ok) throw std::invalid_argument("measure file: unknown key \"" + it.key() + "\"");
        }
    }

    MeasureKind kind_ = MeasureKind::finite;
    std::vector<Atom> atoms_;
    int n_ = 0;
    Rat truncation_tail_ = 0;
};

}  // namespace rwmax
