#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dopt/block.hpp"
#include "dopt/modring.hpp"
#include "dopt/params.hpp"

namespace dopt {

/// Orbit-coded provenance of a family: blocks are unions of H-orbits with
/// representative lists I and J.
struct OrbitSpec {
    UnitSubgroup H;
    std::vector<Int> I;
    std::vector<Int> J;
};

struct DifferenceFamily {
    Int v = 1;
    Block X;
    Block Y;
    std::optional<OrbitSpec> orbit_spec;

    DifferenceFamily() = default;
    DifferenceFamily(Block x, Block y, std::optional<OrbitSpec> spec = std::nullopt)
        : v(x.v), X(std::move(x)), Y(std::move(y)), orbit_spec(std::move(spec)) {
        if (X.v != Y.v) throw std::invalid_argument("DifferenceFamily: modulus mismatch");
    }
};

/// counts[d] = number of ordered pairs (a,b) of distinct block elements with
/// a - b = d (mod v). counts[0] stays 0.
struct DifferenceCounts {
    Int v = 1;
    std::vector<Int> counts;
};

inline DifferenceCounts difference_counts(const Block& b) {
    DifferenceCounts dc{b.v, std::vector<Int>(static_cast<size_t>(b.v), 0)};
    for (Int p : b.members)
        for (Int q : b.members)
            if (p != q) ++dc.counts[static_cast<size_t>(((p - q) % b.v + b.v) % b.v)];
    return dc;
}

struct DifferenceViolation {
    Int d = 0;
    Int got = 0;
};

struct VerifyReport {
    bool pass = false;
    bool size_x_ok = false;
    bool size_y_ok = false;
    Int expected_lambda = 0;
    std::vector<DifferenceViolation> violations;  // every d with wrong combined count
};

/// Coverage check: |X| = r, |Y| = s and every nonzero difference occurs
/// exactly lambda times across both blocks.
inline VerifyReport verify_df(const DifferenceFamily& df, const ParameterSet& ps) {
    if (df.v != ps.v) throw std::invalid_argument("verify_df: modulus mismatch");
    VerifyReport rep;
    rep.expected_lambda = ps.lambda;
    rep.size_x_ok = df.X.size() == ps.r;
    rep.size_y_ok = df.Y.size() == ps.s;
    const DifferenceCounts cx = difference_counts(df.X);
    const DifferenceCounts cy = difference_counts(df.Y);
    for (Int d = 1; d < df.v; ++d) {
        const Int got = cx.counts[static_cast<size_t>(d)] + cy.counts[static_cast<size_t>(d)];
        if (got != ps.lambda) rep.violations.push_back({d, got});
    }
    rep.pass = rep.size_x_ok && rep.size_y_ok && rep.violations.empty();
    return rep;
}

struct MultiplierReport {
    Int mu = 1;
    bool holds = false;
};

/// Does mu*X = Y as sets?
inline MultiplierReport is_multiplier(const DifferenceFamily& df, Int mu) {
    if (mu < 0 || mu >= df.v || gcd_int(mu, df.v) != 1)
        throw std::invalid_argument("is_multiplier: " + std::to_string(mu) + " is not a unit mod " +
                                    std::to_string(df.v));
    return MultiplierReport{mu, scale(df.X, mu) == df.Y};
}

/// All units mu with mu*X = Y; empty or a single coset of the setwise
/// stabilizer of X. A size mismatch yields the empty set plus a diagnostic.
inline std::vector<Int> find_multipliers(const DifferenceFamily& df,
                                         std::string* diagnostic = nullptr) {
    std::vector<Int> out;
    if (df.X.size() != df.Y.size()) {
        if (diagnostic) *diagnostic = "blocks differ in size; no multiplier can exist";
        return out;
    }
    for (Int mu = 1; mu < df.v; ++mu)
        if (gcd_int(mu, df.v) == 1 && scale(df.X, mu) == df.Y) out.push_back(mu);
    if (df.v == 1) out.push_back(0);  // trivial group
    return out;
}

inline Int intersection_size(const Block& a, const Block& b) {
    if (a.v != b.v) throw std::invalid_argument("intersection_size: modulus mismatch");
    Int n = 0;
    for (Int e : a.members)
        if (b.contains(e)) ++n;
    return n;
}

namespace detail {

/// Lexicographically least sorted translate of a sorted residue list.
/// For each shift the sorted result is a wrap-around split of the input.
inline std::vector<Int> min_translate(Int v, const std::vector<Int>& sorted_members) {
    const size_t r = sorted_members.size();
    std::vector<Int> best, cur;
    if (r == 0) return best;
    best.reserve(r);
    cur.reserve(r);
    for (Int g = 0; g < v; ++g) {
        cur.clear();
        // members >= v-g wrap to the front
        const Int split = v - g;
        auto it = std::lower_bound(sorted_members.begin(), sorted_members.end(), split);
        for (auto p = it; p != sorted_members.end(); ++p) cur.push_back(*p + g - v);
        for (auto p = sorted_members.begin(); p != it; ++p) cur.push_back(*p + g);
        if (g == 0 || cur < best) best = cur;
    }
    return best;
}

inline std::vector<Int> units_mod(Int v) {
    std::vector<Int> out;
    for (Int u = 1; u < v; ++u)
        if (gcd_int(u, v) == 1) out.push_back(u);
    if (v == 1) out.push_back(0);
    return out;
}

inline std::vector<Int> scaled_sorted(Int v, const std::vector<Int>& members, Int mu) {
    std::vector<Int> out;
    out.reserve(members.size());
    for (Int e : members) out.push_back(e * mu % v);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Equality up to one unit multiplier on both blocks, independent block
/// translations, and a block swap when the blocks have equal size.
inline bool equivalent(const DifferenceFamily& a, const DifferenceFamily& b) {
    if (a.v != b.v) throw std::invalid_argument("equivalent: modulus mismatch");
    const bool same_sizes = a.X.size() == b.X.size() && a.Y.size() == b.Y.size();
    const bool swap_ok = a.X.size() == a.Y.size();
    const bool swapped_sizes = a.X.size() == b.Y.size() && a.Y.size() == b.X.size();
    if (!same_sizes && !(swap_ok && swapped_sizes))
        throw std::invalid_argument("equivalent: parameter mismatch");
    const auto bx = detail::min_translate(b.v, b.X.members);
    const auto by = detail::min_translate(b.v, b.Y.members);
    for (Int mu : detail::units_mod(a.v)) {
        const auto mx = detail::min_translate(a.v, detail::scaled_sorted(a.v, a.X.members, mu));
        const auto my = detail::min_translate(a.v, detail::scaled_sorted(a.v, a.Y.members, mu));
        if (mx == bx && my == by) return true;
        if (swap_ok && mx == by && my == bx) return true;
    }
    return false;
}

/// Lexicographically least member of the equivalence class of df, ordered by
/// (X members, Y members). Idempotent; equal canonical forms characterize
/// equivalence.
inline DifferenceFamily canonical_form(const DifferenceFamily& df) {
    const bool swap_ok = df.X.size() == df.Y.size();
    std::vector<Int> best_x, best_y;
    bool first = true;
    auto consider = [&](std::vector<Int> x, std::vector<Int> y) {
        if (first || x < best_x || (x == best_x && y < best_y)) {
            best_x = std::move(x);
            best_y = std::move(y);
            first = false;
        }
    };
    for (Int mu : detail::units_mod(df.v)) {
        auto mx = detail::min_translate(df.v, detail::scaled_sorted(df.v, df.X.members, mu));
        auto my = detail::min_translate(df.v, detail::scaled_sorted(df.v, df.Y.members, mu));
        if (swap_ok) consider(my, mx);
        consider(std::move(mx), std::move(my));
    }
    return DifferenceFamily(Block(df.v, std::move(best_x)), Block(df.v, std::move(best_y)));
}

}  // namespace dopt
