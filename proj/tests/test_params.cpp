#include <catch2/catch_amalgamated.hpp>

#include "dopt/params.hpp"
#include "oracles.hpp"

using namespace dopt;

TEST_CASE("ps_from_xy matches the closed formulas") {
    CHECK(ps_from_xy({10, 0}) == ParameterSet{111, 55, 45, 45});
    CHECK(ps_from_xy({0, 0}) == ParameterSet{1, 0, 0, 0});
    CHECK(ps_from_xy({9, 4}) == ParameterSet{111, 51, 46, 42});
    CHECK(ps_from_xy({8, 5}) == ParameterSet{103, 46, 43, 38});
    CHECK_THROWS_AS(ps_from_xy({3, 4}), std::invalid_argument);
    CHECK_THROWS_AS(ps_from_xy({2, -1}), std::invalid_argument);
}

TEST_CASE("xy_from_ps inverts the bijection and validates") {
    CHECK(xy_from_ps({129, 57, 56, 49}) == XYPair{8, 7});
    CHECK(xy_from_ps({3, 1, 0, 0}) == XYPair{1, 0});
    const XYPair p = xy_from_ps({139, 67, 58, 56});
    CHECK(p == XYPair{11, 2});
    CHECK(ps_from_xy(p) == ParameterSet{139, 67, 58, 56});

    // each invariant violation is rejected
    CHECK_THROWS_AS(xy_from_ps({112, 55, 45, 45}), std::invalid_argument);  // even v
    CHECK_THROWS_AS(xy_from_ps({111, 55, 45, 44}), std::invalid_argument);  // v != 2n+1
    CHECK_THROWS_AS(xy_from_ps({111, 45, 55, 45}), std::invalid_argument);  // r < s
    CHECK_THROWS_AS(xy_from_ps({111, 58, 45, 48}), std::invalid_argument);  // sum-of-squares broken
}

TEST_CASE("two_square_representations") {
    // independent scan fixes the expected values
    CHECK(oracle::brute_two_squares(325) ==
          std::vector<std::pair<Int, Int>>{{18, 1}, {17, 6}, {15, 10}});
    CHECK(two_square_representations(325) ==
          std::vector<std::pair<Int, Int>>{{18, 1}, {17, 6}, {15, 10}});
    CHECK(two_square_representations(25) == std::vector<std::pair<Int, Int>>{{5, 0}, {4, 3}});
    CHECK(two_square_representations(3).empty());
    CHECK(two_square_representations(1) == std::vector<std::pair<Int, Int>>{{1, 0}});
    CHECK_THROWS_AS(two_square_representations(4), std::invalid_argument);
    CHECK_THROWS_AS(two_square_representations(0), std::invalid_argument);

    for (Int n = 1; n < 600; n += 2) CHECK(two_square_representations(n) == oracle::brute_two_squares(n));
}

TEST_CASE("ps_list_for_v") {
    CHECK(ps_list_for_v(111) ==
          std::vector<ParameterSet>{{111, 55, 45, 45}, {111, 51, 46, 42}});
    CHECK(ps_list_for_v(163) == std::vector<ParameterSet>{{163, 79, 69, 67},
                                                          {163, 76, 70, 65},
                                                          {163, 73, 72, 64}});
    CHECK(ps_list_for_v(99) == std::vector<ParameterSet>{{99, 43, 42, 36}});
    CHECK(ps_list_for_v(11).empty());  // 21 = 3*7 has no representation
    CHECK_THROWS_AS(ps_list_for_v(4), std::invalid_argument);
}

TEST_CASE("enumerate_ps covers odd v in [v_min, v_max)") {
    CHECK(enumerate_ps(1, 3) == std::vector<ParameterSet>{{1, 0, 0, 0}});
    CHECK(enumerate_ps(84, 86) ==
          std::vector<ParameterSet>{{85, 39, 34, 31}, {85, 36, 36, 30}});
    CHECK(enumerate_ps(100, 200).size() == 40);
    CHECK_THROWS_AS(enumerate_ps(10, 5), std::invalid_argument);
}

TEST_CASE("borderline series") {
    CHECK(series_lambda_eq_s(12) == ParameterSet{157, 78, 66, 66});
    CHECK(series_lambda_eq_s(1) == ParameterSet{3, 1, 0, 0});
    CHECK(series_lambda_eq_s(14) == ParameterSet{211, 105, 91, 91});
    CHECK_THROWS_AS(series_lambda_eq_s(0), std::invalid_argument);

    CHECK(series_r_eq_s(8) == ParameterSet{145, 64, 64, 56});
    CHECK(series_r_eq_s(1) == ParameterSet{5, 1, 1, 0});
    CHECK(series_r_eq_s(10) == ParameterSet{221, 100, 100, 90});
    CHECK_THROWS_AS(series_r_eq_s(0), std::invalid_argument);

    for (Int x = 1; x <= 20; ++x) {
        CHECK(series_lambda_eq_s(x) == ps_from_xy({x, 0}));
        CHECK(series_r_eq_s(x) == ps_from_xy({x, x}));
    }
}

TEST_CASE("alpha_bound is exact") {
    CHECK(alpha_bound(3).value == 160);
    CHECK(alpha_bound(3).m == 6);
    CHECK(alpha_bound(7).value == 77635584);

    // independent route: plain multiply loop
    mpz_class expected = 25;
    for (int i = 0; i < 13; ++i) expected *= 2;
    for (int i = 0; i < 12; ++i) expected *= 12;
    CHECK(alpha_bound(13).value == expected);

    CHECK_THROWS_AS(alpha_bound(1), std::invalid_argument);
    CHECK_THROWS_AS(alpha_bound(6), std::invalid_argument);
}

TEST_CASE("parameter algebra properties") {
    for (Int x = 0; x <= 40; ++x) {
        for (Int y = 0; y <= x; ++y) {
            const ParameterSet ps = ps_from_xy({x, y});
            CAPTURE(x, y);
            if (ps.v > 1) {
                CHECK(xy_from_ps(ps) == XYPair{x, y});
            }
            // 2v-1 = (x+y+1)^2 + (x-y)^2
            CHECK((x + y + 1) * (x + y + 1) + (x - y) * (x - y) == 2 * ps.v - 1);
            // lambda(v-1) = r(r-1) + s(s-1)
            CHECK(ps.lambda * (ps.v - 1) == ps.r * (ps.r - 1) + ps.s * (ps.s - 1));
            // normalization chain
            CHECK((ps.v - 1) / 2 >= ps.r);
            CHECK(ps.r >= ps.s);
            CHECK(ps.s >= ps.lambda);
            CHECK(ps.lambda >= 0);
        }
    }
}

TEST_CASE("ps_list_for_v agrees with the direct (x,y) scan up to 500") {
    for (Int v = 1; v <= 500; v += 2) {
        std::vector<ParameterSet> expected;
        for (Int x = 0; 1 + x + x * x <= v; ++x)
            for (Int y = 0; y <= x; ++y)
                if (1 + x + x * x + y + y * y == v) expected.push_back(ps_from_xy({x, y}));
        std::sort(expected.begin(), expected.end(),
                  [](const ParameterSet& l, const ParameterSet& m) { return l.r > m.r; });
        CAPTURE(v);
        CHECK(ps_list_for_v(v) == expected);
        CHECK(ps_list_for_v(v).empty() == two_square_representations(2 * v - 1).empty());
    }
}
