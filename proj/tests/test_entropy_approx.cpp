#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "volcut/binary_energy.hpp"
#include "volcut/common.hpp"
#include "volcut/entropy_approx.hpp"

using namespace volcut;

namespace {

double g_exact(long long c, long long n) {
    return (c <= 0 || c >= n) ? 0.0 : -double(c) * std::log(double(c) / double(n));
}

}  // namespace

TEST_CASE("approximation vanishes at the endpoints") {
    auto a = build_entropy_approx(100, 12);
    CHECK(a.value(0) == Catch::Approx(0.0).margin(1e-9));
    CHECK(a.value(100) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("approximation is exact at every breakpoint") {
    for (long long n : {10ll, 100ll, 5000ll}) {
        auto a = build_entropy_approx(n, 12);
        for (long long c : a.breakpoints)
            CHECK(a.value(c) == Catch::Approx(g_exact(c, n)).margin(1e-9));
    }
}

TEST_CASE("sup error matches an exhaustive integer scan and shrinks with refinement") {
    const long long n = 100;
    auto coarse = build_entropy_approx(n, 12);
    double scan = 0;
    for (long long c = 0; c <= n; ++c)
        scan = std::max(scan, std::abs(coarse.value(c) - g_exact(c, n)));
    CHECK(coarse.sup_error == Catch::Approx(scan).margin(1e-12));

    auto fine = build_entropy_approx(n, 24);
    CHECK(fine.sup_error < coarse.sup_error);
}

TEST_CASE("sup error non-increasing along a refinement chain") {
    double prev = kInf;
    for (int b : {8, 16, 32, 64}) {
        auto a = build_entropy_approx(1000, b);
        CHECK(a.sup_error <= prev + 1e-12);
        prev = a.sup_error;
    }
}

TEST_CASE("approximation is concave on the integers") {
    for (long long n : {50ll, 1000ll}) {
        auto a = build_entropy_approx(n, 16);
        for (long long c = 1; c < n; ++c) {
            double second = a.value(c + 1) - 2.0 * a.value(c) + a.value(c - 1);
            CHECK(second <= 1e-9);
        }
    }
}

TEST_CASE("every term is concave with pieces crossing in range") {
    auto a = build_entropy_approx(200, 16);
    for (const auto& t : a.terms) {
        CHECK(t.a_lower >= t.a_upper);
        if (t.a_lower > t.a_upper) {
            double cross = t.b_upper / (t.a_lower - t.a_upper);
            CHECK(cross >= t.c_lo - 1e-9);
            CHECK(cross <= t.c_hi + 1e-9);
        }
    }
}

TEST_CASE("degenerate triangle reduces to a plain unary") {
    TriangleTerm t{2.5, 2.5, 0.0, 0.0, 4.0};
    auto f = reduce_binary(t, 1, 3);
    std::vector<std::uint8_t> x = {1, 0, 1};
    CHECK(f.min_value(x) == Catch::Approx(2.5 * 2).margin(1e-12));
    // both auxiliary branches agree, so the auxiliary variable is irrelevant
    CHECK(f.table_value(false, x) == Catch::Approx(f.table_value(true, x)).margin(1e-12));
}

TEST_CASE("binary reduction matches direct evaluation on a 2-element domain") {
    TriangleTerm t{1.7, -0.3, 2.0, 0.0, 2.0};
    for (int k : {0, 1}) {
        auto f = reduce_binary(t, k, 2);
        for (int mask = 0; mask < 4; ++mask) {
            std::vector<std::uint8_t> x = {std::uint8_t(mask & 1), std::uint8_t((mask >> 1) & 1)};
            long long c = 0;
            for (auto xi : x) c += (k == 1) ? xi : 1 - xi;
            CHECK(f.min_value(x) == Catch::Approx(t.value(double(c))).margin(1e-12));
            // table route: min over the auxiliary variable equals the closed form
            double table_min = std::min(f.table_value(false, x), f.table_value(true, x));
            CHECK(table_min == Catch::Approx(t.value(double(c))).margin(1e-12));
        }
    }
}

TEST_CASE("all elements in the other segment contribute min(0, b_upper)") {
    TriangleTerm t{3.0, -1.0, 5.0, 0.0, 3.0};
    auto f = reduce_binary(t, 1, 3);
    std::vector<std::uint8_t> x = {0, 0, 0};
    CHECK(f.min_value(x) == Catch::Approx(std::min(0.0, t.b_upper)).margin(1e-12));
}

TEST_CASE("non-concave term is rejected") {
    TriangleTerm bad{-1.0, 2.0, 1.0, 0.0, 5.0};
    try {
        reduce_binary(bad, 0, 4);
        FAIL("expected NotSubmodular");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotSubmodular);
    }
}

TEST_CASE("emitted pairwise potentials are submodular") {
    auto a = build_entropy_approx(64, 12);
    Labeling s;
    s.assignments = {0, 1, 2, 0, 1, kOutlier, 2, 1};
    s.num_labels = 3;
    for (const auto& t : a.terms) {
        for (int k = 0; k < 3; ++k) {
            for (int alpha = 0; alpha < 3; ++alpha) {
                auto f = reduce_expansion(t, k, alpha, s);
                for (const auto& p : f.pairs) CHECK(p.e00 + p.e11 <= p.e01 + p.e10 + 1e-12);
            }
        }
        for (int k = 0; k < 2; ++k) {
            auto f = reduce_binary(t, k, 8);
            for (const auto& p : f.pairs) CHECK(p.e00 + p.e11 <= p.e01 + p.e10 + 1e-12);
        }
    }
}

TEST_CASE("expansion reduction: null and full moves") {
    TriangleTerm t{2.0, -0.5, 3.0, 0.0, 6.0};
    Labeling s;
    s.assignments = {0, 0, 1, 2, 1, 0};
    s.num_labels = 3;
    const int alpha = 1;

    for (int k = 0; k < 3; ++k) {
        auto f = reduce_expansion(t, k, alpha, s);
        // x == 0: every element keeps its label
        std::vector<std::uint8_t> x0(s.assignments.size(), 0);
        long long ck = 0;
        for (int a : s.assignments) ck += a == k;
        CHECK(f.min_value(x0) == Catch::Approx(t.value(double(ck))).margin(1e-12));

        // x == 1: everything switches to alpha
        std::vector<std::uint8_t> x1(s.assignments.size(), 1);
        double expected = k == alpha ? t.value(double(s.assignments.size())) : t.value(0.0);
        CHECK(f.min_value(x1) == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("expansion reduction: exhaustive 3-element enumeration") {
    TriangleTerm t{1.3, -0.7, 2.1, 0.0, 3.0};
    Labeling s;
    s.assignments = {0, 1, 1};
    s.num_labels = 2;
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int k = 0; k < 2; ++k) {
            auto f = reduce_expansion(t, k, alpha, s);
            for (int mask = 0; mask < 8; ++mask) {
                std::vector<std::uint8_t> x(3);
                for (int i = 0; i < 3; ++i) x[std::size_t(i)] = (mask >> i) & 1;
                // cardinality of segment k after the move
                long long c = 0;
                for (int i = 0; i < 3; ++i) {
                    int lab = (s.assignments[std::size_t(i)] == alpha || x[std::size_t(i)])
                                  ? alpha
                                  : s.assignments[std::size_t(i)];
                    c += lab == k;
                }
                double direct = t.value(double(c));
                // the fragment treats x of currently-alpha elements as forced;
                // mask bits for those elements must read as 1
                std::vector<std::uint8_t> xe = x;
                for (int i = 0; i < 3; ++i)
                    if (s.assignments[std::size_t(i)] == alpha) xe[std::size_t(i)] = 1;
                CHECK(f.min_value(xe) == Catch::Approx(direct).margin(1e-12));
                double table_min = std::min(f.table_value(false, xe), f.table_value(true, xe));
                CHECK(table_min == Catch::Approx(direct).margin(1e-12));
            }
        }
    }
}

TEST_CASE("reduction soundness on domains up to 12 elements") {
    Rng rng(5150);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + rng.uniform_int(12);
        double a_u = rng.uniform(-3.0, 1.0);
        double a_l = a_u + rng.uniform(0.0, 4.0);
        TriangleTerm t{a_l, a_u, rng.uniform(0.0, 5.0), 0.0, double(n)};
        int k = rng.uniform_int(2);
        auto f = reduce_binary(t, k, n);
        std::vector<std::uint8_t> x(std::size_t(n), 0);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            long long c = 0;
            for (int i = 0; i < n; ++i) {
                x[std::size_t(i)] = (mask >> i) & 1u;
                c += (k == 1) ? x[std::size_t(i)] : 1 - x[std::size_t(i)];
            }
            double table_min = std::min(f.table_value(false, x), f.table_value(true, x));
            REQUIRE(table_min == Catch::Approx(t.value(double(c))).margin(1e-9));
        }
    }
}

TEST_CASE("quantized fragments solve to the enumerated minimum") {
    Rng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + rng.uniform_int(8);
        BinaryProblem p(n);
        for (int v = 0; v < n; ++v) p.add_unary(v, rng.uniform(-2, 2), rng.uniform(-2, 2));
        auto approx = build_entropy_approx(n, 3 + rng.uniform_int(5));
        for (const auto& t : approx.terms) {
            p.fragments.push_back(reduce_binary(t, 1, n));
            p.fragments.push_back(reduce_binary(t, 0, n));
        }
        auto q = quantize(p);
        auto sol = solve_quantized(q);

        long long best = std::numeric_limits<long long>::max();
        std::vector<std::uint8_t> x(std::size_t(n), 0);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            for (int i = 0; i < n; ++i) x[std::size_t(i)] = (mask >> i) & 1u;
            best = std::min(best, q.evaluate(x));
        }
        REQUIRE(sol.q_value == best);
        REQUIRE(q.evaluate(sol.x) == best);
    }
}
