#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace dopt {

using Int = std::int64_t;

/// Normalized coordinate pair for the parameter-set bijection, x >= y >= 0.
struct XYPair {
    Int x = 0;
    Int y = 0;

    friend bool operator==(const XYPair&, const XYPair&) = default;
};

/// A two-block design parameter set (v; r,s; lambda).
/// n = r + s - lambda and v = 2n + 1 for the sets handled here.
struct ParameterSet {
    Int v = 0;
    Int r = 0;
    Int s = 0;
    Int lambda = 0;

    Int n() const { return r + s - lambda; }

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
    friend auto operator<=>(const ParameterSet&, const ParameterSet&) = default;
};

inline std::string to_string(const ParameterSet& ps) {
    return "(" + std::to_string(ps.v) + "; " + std::to_string(ps.r) + "," +
           std::to_string(ps.s) + "; " + std::to_string(ps.lambda) + ")";
}

/// (v-1)/2 >= r >= s.
inline bool is_normalized(const ParameterSet& ps) {
    return (ps.v - 1) / 2 >= ps.r && ps.r >= ps.s;
}

/// Full consistency: v odd positive, v = 2n+1, normalized, s >= lambda >= 0,
/// 2v-1 = (x+y+1)^2 + (x-y)^2 and lambda(v-1) = r(r-1) + s(s-1).
inline bool is_consistent(const ParameterSet& ps) {
    if (ps.v <= 0 || ps.v % 2 == 0) return false;
    if (ps.lambda < 0 || ps.s < ps.lambda) return false;
    if (ps.v != 2 * ps.n() + 1) return false;
    if (!is_normalized(ps)) return false;
    const Int x = ps.r - ps.lambda;
    const Int y = ps.s - ps.lambda;
    if ((x + y + 1) * (x + y + 1) + (x - y) * (x - y) != 2 * ps.v - 1) return false;
    return ps.lambda * (ps.v - 1) == ps.r * (ps.r - 1) + ps.s * (ps.s - 1);
}

inline ParameterSet ps_from_xy(const XYPair& p) {
    if (p.y < 0 || p.x < p.y)
        throw std::invalid_argument("ps_from_xy: requires x >= y >= 0");
    const Int x = p.x, y = p.y;
    return ParameterSet{
        1 + x + x * x + y + y * y,
        x * (x + 1) / 2 + y * (y - 1) / 2,
        x * (x - 1) / 2 + y * (y + 1) / 2,
        x * (x - 1) / 2 + y * (y - 1) / 2,
    };
}

inline XYPair xy_from_ps(const ParameterSet& ps) {
    if (!is_consistent(ps))
        throw std::invalid_argument("xy_from_ps: inconsistent parameter set " + to_string(ps));
    return XYPair{ps.r - ps.lambda, ps.s - ps.lambda};
}

/// All ways to write odd n as a^2 + b^2 with a > b >= 0, sorted by b
/// ascending. Empty when no representation exists.
inline std::vector<std::pair<Int, Int>> two_square_representations(Int n) {
    if (n < 1) throw std::invalid_argument("two_square_representations: n must be positive");
    if (n % 2 == 0) throw std::invalid_argument("two_square_representations: n must be odd");
    std::vector<std::pair<Int, Int>> out;
    for (Int b = 0; 2 * b * b < n; ++b) {
        const Int a2 = n - b * b;
        Int a = static_cast<Int>(std::sqrt(static_cast<double>(a2)));
        while (a * a > a2) --a;
        while ((a + 1) * (a + 1) <= a2) ++a;
        if (a * a == a2) out.emplace_back(a, b);
    }
    return out;
}

/// Parameter sets for one group order, largest r first.
inline std::vector<ParameterSet> ps_list_for_v(Int v) {
    if (v < 1 || v % 2 == 0) throw std::invalid_argument("ps_list_for_v: v must be odd and positive");
    std::vector<ParameterSet> out;
    for (const auto& [a, b] : two_square_representations(2 * v - 1)) {
        // exactly one of a, b is odd, so both quotients are exact
        out.push_back(ps_from_xy(XYPair{(a + b - 1) / 2, (a - b - 1) / 2}));
    }
    std::sort(out.begin(), out.end(),
              [](const ParameterSet& l, const ParameterSet& m) { return l.r > m.r; });
    return out;
}

/// Concatenation of ps_list_for_v over odd v in [v_min, v_max).
inline std::vector<ParameterSet> enumerate_ps(Int v_min, Int v_max) {
    if (v_min > v_max) throw std::invalid_argument("enumerate_ps: empty range");
    std::vector<ParameterSet> out;
    for (Int v = v_min; v < v_max; ++v) {
        if (v % 2 == 0 || v < 1) continue;
        auto part = ps_list_for_v(v);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

/// Borderline series lambda = s, i.e. y = 0.
inline ParameterSet series_lambda_eq_s(Int x) {
    if (x < 1) throw std::invalid_argument("series_lambda_eq_s: x must be >= 1");
    return ps_from_xy(XYPair{x, 0});
}

/// Borderline series r = s, i.e. y = x.
inline ParameterSet series_r_eq_s(Int x) {
    if (x < 1) throw std::invalid_argument("series_r_eq_s: x must be >= 1");
    return ps_from_xy(XYPair{x, x});
}

/// Exact determinant ceiling 2^v (m-1) (v-1)^(v-1) for order m = 2v.
struct BoundValue {
    Int m = 0;
    mpz_class value;
};

inline BoundValue alpha_bound(Int v) {
    if (v < 3 || v % 2 == 0) throw std::invalid_argument("alpha_bound: v must be odd and >= 3");
    mpz_class value;
    mpz_ui_pow_ui(value.get_mpz_t(), 2, static_cast<unsigned long>(v));
    value *= 2 * v - 1;
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(v - 1),
                  static_cast<unsigned long>(v - 1));
    value *= pw;
    return BoundValue{2 * v, value};
}

}  // namespace dopt
