#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dopt/catalog.hpp"
#include "dopt/matrices.hpp"
#include "oracles.hpp"

using namespace dopt;

namespace {

const CatalogEntry& entry(const std::string& label) {
    for (const CatalogEntry& e : builtin_catalog().entries)
        if (e.label == label) return e;
    FAIL("missing catalog entry " + label);
    throw std::logic_error("unreachable");
}

std::vector<std::vector<mpz_class>> to_mpz(const BlockMatrix& m) {
    std::vector<std::vector<mpz_class>> z(static_cast<size_t>(m.order));
    for (size_t i = 0; i < z.size(); ++i) {
        z[i].resize(static_cast<size_t>(m.order));
        for (size_t j = 0; j < z[i].size(); ++j) z[i][j] = static_cast<int>(m.rows[i][j]);
    }
    return z;
}

Block random_block(Int v, Int size, std::mt19937& rng) {
    std::vector<Int> all(static_cast<size_t>(v));
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<size_t>(size));
    return Block(v, std::move(all));
}

}  // namespace

TEST_CASE("circulant_from_block sets -1 on block positions") {
    const CirculantMatrix a = circulant_from_block(Block(3, {0}));
    CHECK(a.first_row.entries == std::vector<int8_t>{-1, 1, 1});

    const CirculantMatrix ones = circulant_from_block(Block(3, {}));
    CHECK(ones.first_row.entries == std::vector<int8_t>{1, 1, 1});

    const CirculantMatrix c = circulant_from_block(Block(13, {0, 1, 4, 6}));
    int minus = 0;
    for (Int i = 0; i < 13; ++i) {
        const bool neg = c.first_row.entries[static_cast<size_t>(i)] == -1;
        minus += neg;
        CHECK(neg == (i == 0 || i == 1 || i == 4 || i == 6));
    }
    CHECK(minus == 4);

    // row i is the first row shifted right by i
    CHECK(a.entry(1, 0) == 1);
    CHECK(a.entry(1, 1) == -1);
    CHECK(a.entry(2, 2) == -1);
}

TEST_CASE("paf") {
    const CirculantMatrix a = circulant_from_block(Block(3, {0}));
    CHECK(paf(a.first_row, 1) == -1);
    CHECK(paf(a.first_row, 2) == -1);

    const SignSequence ones{5, {1, 1, 1, 1, 1}};
    for (Int d = 1; d < 5; ++d) CHECK(paf(ones, d) == 5);

    const CirculantMatrix c = circulant_from_block(Block(13, {0, 1, 4, 6}));
    for (Int d = 1; d < 13; ++d) CHECK(paf(c.first_row, d) == 1);

    CHECK_THROWS_AS(paf(ones, 0), std::invalid_argument);
    CHECK_THROWS_AS(paf(ones, 5), std::invalid_argument);
}

TEST_CASE("paf identity against difference counts") {
    std::mt19937 rng(1234);
    for (int iter = 0; iter < 30; ++iter) {
        const Int v = 3 + 2 * (rng() % 24);  // odd v <= 49
        const Int size = static_cast<Int>(rng() % static_cast<unsigned long>(v + 1));
        const Block b = random_block(v, size, rng);
        const DifferenceCounts dc = difference_counts(b);
        const CirculantMatrix c = circulant_from_block(b);
        for (Int d = 1; d < v; ++d) {
            CAPTURE(v, size, d);
            CHECK(paf(c.first_row, d) ==
                  v - 4 * (b.size() - dc.counts[static_cast<size_t>(d)]));
        }
    }
}

TEST_CASE("gram_check") {
    const GramReport pass3 =
        gram_check(circulant_from_block(Block(3, {0})), circulant_from_block(Block(3, {})));
    CHECK(pass3.pass);
    CHECK(pass3.commute);
    CHECK_FALSE(pass3.first_violation.has_value());

    const DifferenceFamily df = family_from_entry(entry("111a-1"));
    CHECK(gram_check(circulant_from_block(df.X), circulant_from_block(df.Y)).pass);

    const GramReport fail3 =
        gram_check(circulant_from_block(Block(3, {0})), circulant_from_block(Block(3, {0})));
    CHECK_FALSE(fail3.pass);
    REQUIRE(fail3.first_violation.has_value());
    CHECK(fail3.first_violation->got == -2);
    CHECK(fail3.first_violation->expected == 2);

    CHECK_THROWS_AS(
        gram_check(circulant_from_block(Block(3, {0})), circulant_from_block(Block(5, {0}))),
        std::invalid_argument);
}

TEST_CASE("assemble lays out the four quadrants") {
    const BlockMatrix m2 =
        assemble(circulant_from_block(Block(1, {})), circulant_from_block(Block(1, {})));
    REQUIRE(m2.order == 2);
    CHECK(m2.rows[0] == std::vector<int8_t>{1, 1});
    CHECK(m2.rows[1] == std::vector<int8_t>{-1, 1});
    CHECK(det_exact(m2) == 2);

    const BlockMatrix m6 =
        assemble(circulant_from_block(Block(3, {0})), circulant_from_block(Block(3, {})));
    REQUIRE(m6.order == 6);
    CHECK(m6.rows[0] == std::vector<int8_t>{-1, 1, 1, 1, 1, 1});
    for (const auto& row : m6.rows) {
        REQUIRE(row.size() == 6);
        for (int8_t e : row) CHECK((e == 1 || e == -1));
    }
    // transposed quadrants: row v+i, col j carries -B^T, col v+j carries A^T
    CHECK(m6.rows[3][3] == -1);  // (A^T)_{0,0} = a_0
    CHECK(m6.rows[4][3] == 1);   // (A^T)_{1,0} = A_{0,1}
}

TEST_CASE("det_bareiss agrees with cofactor expansion") {
    std::mt19937 rng(999);
    for (int iter = 0; iter < 25; ++iter) {
        const size_t n = 1 + rng() % 7;
        std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n));
        for (auto& row : m)
            for (auto& e : row) e = static_cast<long>(rng() % 11) - 5;
        CHECK(det_bareiss(m) == oracle::naive_det(m));
    }
    // singular inputs
    std::vector<std::vector<mpz_class>> dup{{1, 2, 3}, {1, 2, 3}, {0, 1, 1}};
    CHECK(det_bareiss(dup) == 0);
    std::vector<std::vector<mpz_class>> zcol{{0, 2, 3}, {0, 1, 1}, {0, 5, 9}};
    CHECK(det_bareiss(zcol) == 0);
    // pivot requires a row swap
    std::vector<std::vector<mpz_class>> swap2{{0, 1}, {1, 0}};
    CHECK(det_bareiss(swap2) == -1);
}

TEST_CASE("det squared equals det of the Gram product") {
    std::mt19937 rng(4242);
    for (int iter = 0; iter < 10; ++iter) {
        const size_t n = 2 + rng() % 11;  // order <= 12
        std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n));
        for (auto& row : m)
            for (auto& e : row) e = (rng() % 2) ? 1 : -1;
        std::vector<std::vector<mpz_class>> mmt(n, std::vector<mpz_class>(n, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                for (size_t k = 0; k < n; ++k) mmt[i][j] += m[i][k] * m[j][k];
        const mpz_class d = det_bareiss(m);
        CHECK(d * d == det_bareiss(mmt));
    }
}

TEST_CASE("designs meet the determinant ceiling at small orders") {
    const BlockMatrix m6 =
        assemble(circulant_from_block(Block(3, {0})), circulant_from_block(Block(3, {})));
    CHECK(det_exact(m6) == alpha_bound(3).value);
    CHECK(det_exact(m6) == 160);
    CHECK(det_exact(m6) == oracle::naive_det(to_mpz(m6)));

    const BlockMatrix m14 =
        assemble(circulant_from_block(Block(7, {1, 2, 4})), circulant_from_block(Block(7, {0})));
    CHECK(det_exact(m14) == alpha_bound(7).value);
    CHECK(det_exact(m14) == 77635584);

    const BlockMatrix m26 = assemble(circulant_from_block(Block(13, {0, 1, 4, 6})),
                                     circulant_from_block(Block(13, {0, 1, 4, 6})));
    CHECK(det_exact(m26) == alpha_bound(13).value);
}

TEST_CASE("circulants of equal order commute") {
    std::mt19937 rng(31337);
    for (int iter = 0; iter < 20; ++iter) {
        const Int v = 2 + rng() % 20;
        const Block a = random_block(v, static_cast<Int>(rng() % static_cast<unsigned long>(v)), rng);
        const Block b = random_block(v, static_cast<Int>(rng() % static_cast<unsigned long>(v)), rng);
        CHECK(gram_check(circulant_from_block(a), circulant_from_block(b)).commute);
    }
}

TEST_CASE("coverage and Gram checks agree") {
    std::mt19937 rng(5150);
    int passing = 0;
    for (int iter = 0; iter < 120; ++iter) {
        Int v;
        Block x, y;
        if (iter % 6 == 0) {
            // plant a verified family, optionally perturbed
            v = 13;
            x = Block(13, {0, 1, 3, 9});
            y = Block(13, {0, 2, 5, 6});
            if (iter % 12 == 0) {
                auto members = y.members;
                members[rng() % members.size()] = 12 - static_cast<Int>(rng() % 3);
                std::sort(members.begin(), members.end());
                members.erase(std::unique(members.begin(), members.end()), members.end());
                y = Block(13, std::move(members));
            }
        } else {
            v = 3 + 2 * (rng() % 12);  // odd v <= 25
            x = random_block(v, static_cast<Int>(rng() % static_cast<unsigned long>(v + 1)), rng);
            y = random_block(v, static_cast<Int>(rng() % static_cast<unsigned long>(v + 1)), rng);
        }
        // the lambda forced by the Gram identity for these block sizes
        const ParameterSet ps{v, x.size(), y.size(), x.size() + y.size() - (v - 1) / 2};
        const bool df_pass = verify_df(DifferenceFamily(x, y), ps).pass;
        const bool gram_pass =
            gram_check(circulant_from_block(x), circulant_from_block(y)).pass;
        CAPTURE(v, x.members, y.members);
        CHECK(df_pass == gram_pass);
        passing += df_pass;
    }
    CHECK(passing > 0);
}

TEST_CASE("certify_d_optimal") {
    const CatalogEntry& e129 = entry("129a-1");
    const Certificate c129 = certify_d_optimal(family_from_entry(e129), e129.ps);
    CHECK(c129.family_level == CheckLevel::pass);
    CHECK(c129.gram_level == CheckLevel::pass);
    CHECK(c129.det_level == CheckLevel::skipped);  // order 258 stays above the auto cutoff
    CHECK(c129.ok());

    // one moved residue breaks both checks
    const DifferenceFamily good = family_from_entry(e129);
    auto members = good.X.members;
    REQUIRE(!good.X.contains(2));
    members[0] = 2;
    std::sort(members.begin(), members.end());
    const DifferenceFamily corrupted(Block(good.v, members), good.Y);
    const Certificate bad = certify_d_optimal(corrupted, e129.ps);
    CHECK(bad.family_level == CheckLevel::fail);
    CHECK(bad.gram_level == CheckLevel::fail);
    CHECK_FALSE(bad.ok());

    const Certificate c3 = certify_d_optimal(
        DifferenceFamily(Block(3, {0}), Block(3, {})), ParameterSet{3, 1, 0, 0});
    CHECK(c3.family_level == CheckLevel::pass);
    CHECK(c3.gram_level == CheckLevel::pass);
    CHECK(c3.det_level == CheckLevel::pass);
    REQUIRE(c3.det.has_value());
    CHECK(*c3.det == 160);

    // exhausted budget downgrades the determinant level to skipped
    CertifyOptions opts;
    opts.run_determinant = true;
    opts.det_budget_seconds = 0.0;
    const CatalogEntry& e111 = entry("111a-1");
    const Certificate squeezed = certify_d_optimal(family_from_entry(e111), e111.ps, opts);
    CHECK(squeezed.det_level == CheckLevel::skipped);
    CHECK(squeezed.det_budget_exceeded);
    CHECK(squeezed.ok());
}
