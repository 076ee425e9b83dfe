#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dopt/block.hpp"
#include "dopt/family.hpp"
#include "dopt/params.hpp"

namespace dopt {

/// A +-1 sequence of length v; position i is -1 iff i lies in the
/// generating block.
struct SignSequence {
    Int v = 0;
    std::vector<int8_t> entries;
};

/// Circulant determined by its first row: row i is the first row shifted
/// cyclically right by i, entry (i,j) = first_row[(j - i) mod v].
struct CirculantMatrix {
    SignSequence first_row;

    Int order() const { return first_row.v; }
    int entry(Int i, Int j) const {
        const Int v = first_row.v;
        return first_row.entries[static_cast<size_t>((((j - i) % v) + v) % v)];
    }
};

inline CirculantMatrix circulant_from_block(const Block& b) {
    SignSequence s{b.v, std::vector<int8_t>(static_cast<size_t>(b.v), 1)};
    for (Int e : b.members) s.entries[static_cast<size_t>(e)] = -1;
    return CirculantMatrix{std::move(s)};
}

/// Periodic autocorrelation sum_i a_i a_{i+d mod v}.
inline Int paf(const SignSequence& seq, Int d) {
    if (d < 1 || d >= seq.v) throw std::invalid_argument("paf: shift out of range");
    Int acc = 0;
    for (Int i = 0; i < seq.v; ++i)
        acc += static_cast<Int>(seq.entries[static_cast<size_t>(i)]) *
               static_cast<Int>(seq.entries[static_cast<size_t>((i + d) % seq.v)]);
    return acc;
}

struct GramViolation {
    Int row = 0;
    Int col = 0;
    Int got = 0;
    Int expected = 0;
};

struct GramReport {
    bool pass = false;
    bool commute = false;
    std::optional<GramViolation> first_violation;
};

namespace detail {

// first row of the product of two circulants (cyclic convolution)
inline std::vector<Int> circulant_product_row(const CirculantMatrix& a, const CirculantMatrix& b) {
    const Int v = a.order();
    std::vector<Int> out(static_cast<size_t>(v), 0);
    for (Int j = 0; j < v; ++j) {
        Int acc = 0;
        for (Int k = 0; k < v; ++k)
            acc += static_cast<Int>(a.first_row.entries[static_cast<size_t>(k)]) *
                   static_cast<Int>(b.first_row.entries[static_cast<size_t>((((j - k) % v) + v) % v)]);
        out[static_cast<size_t>(j)] = acc;
    }
    return out;
}

}  // namespace detail

/// Checks AA^T + BB^T = (2v-2) I + 2 J scalar-wise through autocorrelations:
/// the off-diagonal entries equal paf_A(d) + paf_B(d) and the diagonal is
/// 2v automatically. Commutation AB = BA is verified explicitly rather than
/// assumed.
inline GramReport gram_check(const CirculantMatrix& a, const CirculantMatrix& b) {
    if (a.order() != b.order()) throw std::invalid_argument("gram_check: order mismatch");
    GramReport rep;
    rep.commute = detail::circulant_product_row(a, b) == detail::circulant_product_row(b, a);
    const Int v = a.order();
    for (Int d = 1; d < v; ++d) {
        const Int got = paf(a.first_row, d) + paf(b.first_row, d);
        if (got != 2) {
            rep.first_violation = GramViolation{0, d, got, 2};
            rep.pass = false;
            return rep;
        }
    }
    rep.pass = rep.commute;
    return rep;
}

/// The order-2v block array [[A, B], [-B^T, A^T]], stored row-wise as signs.
struct BlockMatrix {
    Int order = 0;
    std::vector<std::vector<int8_t>> rows;
};

inline BlockMatrix assemble(const CirculantMatrix& a, const CirculantMatrix& b) {
    if (a.order() != b.order()) throw std::invalid_argument("assemble: order mismatch");
    const Int v = a.order();
    BlockMatrix m{2 * v, {}};
    m.rows.assign(static_cast<size_t>(2 * v), std::vector<int8_t>(static_cast<size_t>(2 * v), 0));
    for (Int i = 0; i < v; ++i) {
        for (Int j = 0; j < v; ++j) {
            m.rows[i][j] = static_cast<int8_t>(a.entry(i, j));
            m.rows[i][j + v] = static_cast<int8_t>(b.entry(i, j));
            m.rows[i + v][j] = static_cast<int8_t>(-b.entry(j, i));
            m.rows[i + v][j + v] = static_cast<int8_t>(a.entry(j, i));
        }
    }
    return m;
}

struct DetBudgetExceeded : std::runtime_error {
    DetBudgetExceeded() : std::runtime_error("determinant time budget exceeded") {}
};

/// Fraction-free Bareiss elimination over exact integers. Every division is
/// exact; row swaps flip the sign. Optional wall-clock budget in seconds.
inline mpz_class det_bareiss(std::vector<std::vector<mpz_class>> m,
                             std::optional<double> budget_seconds = std::nullopt) {
    const size_t n = m.size();
    if (n == 0) return 1;
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument("det_bareiss: matrix not square");
    const auto start = std::chrono::steady_clock::now();
    int sign = 1;
    mpz_class prev = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (budget_seconds) {
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (elapsed.count() > *budget_seconds) throw DetBudgetExceeded();
        }
        if (m[k][k] == 0) {
            size_t p = k + 1;
            while (p < n && m[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

inline mpz_class det_exact(const BlockMatrix& m,
                           std::optional<double> budget_seconds = std::nullopt) {
    std::vector<std::vector<mpz_class>> z(static_cast<size_t>(m.order));
    for (size_t i = 0; i < z.size(); ++i) {
        z[i].resize(static_cast<size_t>(m.order));
        for (size_t j = 0; j < z[i].size(); ++j) z[i][j] = static_cast<int>(m.rows[i][j]);
    }
    return det_bareiss(std::move(z), budget_seconds);
}

enum class CheckLevel { skipped, pass, fail };

struct Certificate {
    CheckLevel family_level = CheckLevel::skipped;
    CheckLevel gram_level = CheckLevel::skipped;
    CheckLevel det_level = CheckLevel::skipped;
    VerifyReport family_report;
    GramReport gram_report;
    std::optional<mpz_class> det;
    std::optional<mpz_class> bound;
    bool det_budget_exceeded = false;

    bool ok() const {
        return family_level == CheckLevel::pass && gram_level == CheckLevel::pass &&
               det_level != CheckLevel::fail;
    }
};

struct CertifyOptions {
    // determinant level runs automatically up to this order; force with
    // run_determinant, cap with det_budget_seconds
    std::optional<bool> run_determinant;
    Int det_auto_max_order = 30;
    std::optional<double> det_budget_seconds = 600.0;
};

/// Runs the coverage check, the Gram check and optionally the exact
/// determinant against the order bound. Failures are recorded in the
/// certificate, never thrown.
inline Certificate certify_d_optimal(const DifferenceFamily& df, const ParameterSet& ps,
                                     const CertifyOptions& opts = {}) {
    Certificate cert;
    cert.family_report = verify_df(df, ps);
    cert.family_level = cert.family_report.pass ? CheckLevel::pass : CheckLevel::fail;
    const CirculantMatrix a = circulant_from_block(df.X);
    const CirculantMatrix b = circulant_from_block(df.Y);
    cert.gram_report = gram_check(a, b);
    cert.gram_level = cert.gram_report.pass ? CheckLevel::pass : CheckLevel::fail;
    const bool run_det = opts.run_determinant.value_or(2 * ps.v <= opts.det_auto_max_order);
    if (run_det && ps.v >= 3) {
        cert.bound = alpha_bound(ps.v).value;
        try {
            cert.det = det_exact(assemble(a, b), opts.det_budget_seconds);
            cert.det_level = (*cert.det == *cert.bound) ? CheckLevel::pass : CheckLevel::fail;
        } catch (const DetBudgetExceeded&) {
            cert.det_budget_exceeded = true;
            cert.det_level = CheckLevel::skipped;
        }
    }
    return cert;
}

}  // namespace dopt
