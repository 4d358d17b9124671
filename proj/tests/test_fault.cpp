#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "msde/fault.hpp"
#include "oracles.hpp"

using namespace msde;
using Catch::Approx;

namespace {

LevelPmf random_pmf(const QuantGrid& g, std::mt19937_64& rng) {
    LevelPmf p(g);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : p.mass) v = u(rng);
    p.normalize();
    return p;
}

}  // namespace

TEST_CASE("pattern_error_prob") {
    CHECK(pattern_error_prob(0b00010u, 0.1, 5) == Approx(0.1 * 0.9 * 0.9 * 0.9 * 0.9).epsilon(1e-14));
    CHECK(pattern_error_prob(0u, 0.2, 5) == Approx(std::pow(0.8, 5)).epsilon(1e-14));
    double total = 0.0;
    for (std::uint32_t e = 0; e < 32; ++e) total += pattern_error_prob(e, 0.3, 5);
    CHECK(total == Approx(1.0).epsilon(1e-13));
    REQUIRE_THROWS_AS(pattern_error_prob(0, 0.6, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(pattern_error_prob(0, -0.1, 5), std::invalid_argument);
}

TEST_CASE("transition law invariants") {
    SECTION("rows sum to one and the law is symmetric") {
        for (double delta : {0.0, 0.05, 0.3, 0.5}) {
            FaultChannel ch = FaultChannel::make(delta, 5);
            for (std::uint32_t p = 0; p < ch.num_patterns(); ++p) {
                double row = 0.0;
                for (std::uint32_t q = 0; q < ch.num_patterns(); ++q) {
                    row += ch.transition(p, q);
                    CHECK(ch.transition(p, q) == ch.transition(q, p));
                }
                CHECK(row == Approx(1.0).margin(1e-12));
            }
        }
    }
    SECTION("delta = 0 is the identity") {
        FaultChannel ch = FaultChannel::make(0.0, 4);
        for (std::uint32_t p = 0; p < ch.num_patterns(); ++p)
            for (std::uint32_t q = 0; q < ch.num_patterns(); ++q)
                CHECK(ch.transition(p, q) == (p == q ? 1.0 : 0.0));
    }
    SECTION("delta = 1/2 is uniform") {
        FaultChannel ch = FaultChannel::make(0.5, 5);
        for (std::uint32_t q = 0; q < 32; ++q)
            CHECK(ch.transition(7, q) == Approx(1.0 / 32.0).epsilon(1e-14));
    }
    REQUIRE_THROWS_AS(FaultChannel::make(0.51, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(FaultChannel::make(-0.01, 5), std::invalid_argument);
    REQUIRE_NOTHROW(FaultChannel::make_unchecked(1.0, 5));
}

TEST_CASE("corrupt_pmf basics") {
    QuantGrid g(5, 1.0);
    std::mt19937_64 rng(7);
    LevelPmf p = random_pmf(g, rng);

    SECTION("delta = 0 returns the input exactly") {
        LevelPmf out = corrupt_pmf(p, FaultChannel::make(0.0, 5));
        for (int i = 0; i < g.num_levels(); ++i) CHECK(out.mass[i] == p.mass[i]);
    }
    SECTION("delta = 1/2 flattens any input to the pattern-uniform law") {
        LevelPmf out = corrupt_pmf(p, FaultChannel::make(0.5, 5));
        CHECK(out.mass[g.zero_index()] == Approx(2.0 / 32.0).epsilon(1e-12));
        for (int i = 0; i < g.num_levels(); ++i)
            if (i != g.zero_index()) CHECK(out.mass[i] == Approx(1.0 / 32.0).epsilon(1e-12));
    }
    SECTION("bit-width mismatch is rejected") {
        REQUIRE_THROWS_AS(corrupt_pmf(p, FaultChannel::make(0.1, 4)), std::invalid_argument);
    }
    SECTION("total probability preserved") {
        LevelPmf out = corrupt_pmf(p, FaultChannel::make(0.07, 5));
        CHECK(out.sum() == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("corrupt_pmf point mass example, b = 3") {
    QuantGrid g(3, 1.0);
    LevelPmf p = LevelPmf::point_mass(g, g.zero_index() + 1);
    LevelPmf out = corrupt_pmf(p, FaultChannel::make(0.1, 3));
    CHECK(out.mass[g.zero_index()] == Approx(0.09).epsilon(1e-12));
    CHECK(out.mass[g.zero_index() + 1] == Approx(0.729).epsilon(1e-12));
    // full enumeration oracle covers every level
    LevelPmf ref = oracle::corrupt_bruteforce(p, 0.1);
    for (int i = 0; i < g.num_levels(); ++i)
        CHECK(out.mass[i] == Approx(ref.mass[i]).margin(1e-12));
}

TEST_CASE("corrupt_pmf equals the brute-force double enumeration") {
    std::mt19937_64 rng(123);
    for (int b : {2, 3, 4, 5}) {
        QuantGrid g(b, 1.0);
        for (double delta : {0.003, 0.1, 0.42}) {
            for (int t = 0; t < 25; ++t) {
                LevelPmf p = random_pmf(g, rng);
                LevelPmf got = corrupt_pmf(p, FaultChannel::make(delta, b));
                LevelPmf ref = oracle::corrupt_bruteforce(p, delta);
                for (int i = 0; i < g.num_levels(); ++i)
                    REQUIRE(got.mass[i] == Approx(ref.mass[i]).margin(1e-12));
            }
        }
    }
}

TEST_CASE("corrupt_pmf mirror antisymmetry") {
    QuantGrid g(5, 1.0);
    std::mt19937_64 rng(99);
    FaultChannel ch = FaultChannel::make(0.08, 5);
    for (int t = 0; t < 50; ++t) {
        LevelPmf p = random_pmf(g, rng);
        LevelPmf a = mirror(corrupt_pmf(p, ch));
        LevelPmf b = corrupt_pmf(mirror(p), ch);
        for (int i = 0; i < g.num_levels(); ++i)
            REQUIRE(a.mass[i] == Approx(b.mass[i]).margin(1e-13));
    }
}

TEST_CASE("corrupt_pmf composes like cascaded BSCs") {
    QuantGrid g(4, 1.0);
    std::mt19937_64 rng(5);
    double d1 = 0.04, d2 = 0.11;
    double dcomp = d1 * (1.0 - d2) + d2 * (1.0 - d1);
    FaultChannel c1 = FaultChannel::make(d1, 4);
    FaultChannel c2 = FaultChannel::make(d2, 4);
    FaultChannel cc = FaultChannel::make(dcomp, 4);
    SECTION("exact on sign-symmetric inputs") {
        for (int t = 0; t < 30; ++t) {
            LevelPmf half = random_pmf(g, rng);
            LevelPmf p(g);
            for (int i = 0; i < g.num_levels(); ++i)
                p.mass[i] = (half.mass[i] + half.mass[g.mirror_index(i)]) / 2.0;
            LevelPmf two = corrupt_pmf(corrupt_pmf(p, c1), c2);
            LevelPmf one = corrupt_pmf(p, cc);
            for (int i = 0; i < g.num_levels(); ++i)
                REQUIRE(two.mass[i] == Approx(one.mass[i]).margin(1e-12));
        }
    }
    SECTION("general inputs agree up to the zero-sign re-randomization") {
        // Collapsing "+0"/"-0" between the two applications re-splits the
        // zero mass evenly (a stored zero gets a fresh random sign), so the
        // cascade identity holds to O(d1*d2) rather than exactly.
        for (int t = 0; t < 30; ++t) {
            LevelPmf p = random_pmf(g, rng);
            LevelPmf two = corrupt_pmf(corrupt_pmf(p, c1), c2);
            LevelPmf one = corrupt_pmf(p, cc);
            for (int i = 0; i < g.num_levels(); ++i)
                REQUIRE(two.mass[i] == Approx(one.mass[i]).margin(d1 * d2));
        }
    }
}

TEST_CASE("corrupt_message") {
    QuantGrid g(5, 1.0);
    std::mt19937_64 rng(2024);
    SECTION("delta = 0 never changes the word") {
        FaultChannel ch = FaultChannel::make(0.0, 5);
        for (int t = 0; t < 1000; ++t) {
            SignMagPattern p{static_cast<std::uint32_t>(rng() & 31u)};
            CHECK(corrupt_message(p, ch, rng).word == p.word);
        }
    }
    SECTION("delta = 1 complements every bit (test-only extension)") {
        FaultChannel ch = FaultChannel::make_unchecked(1.0, 5);
        for (std::uint32_t w = 0; w < 32; ++w)
            CHECK(corrupt_message(SignMagPattern{w}, ch, rng).word == (w ^ 31u));
    }
    SECTION("empirical per-bit flip rate matches delta") {
        const double delta = 0.01;
        const int n = 1000000;
        FaultChannel ch = FaultChannel::make(delta, 5);
        std::array<long, 5> flips{};
        for (int t = 0; t < n; ++t) {
            std::uint32_t e = corrupt_message(SignMagPattern{0}, ch, rng).word;
            for (int j = 0; j < 5; ++j)
                if (e & (1u << j)) ++flips[j];
        }
        double se = std::sqrt(delta * (1.0 - delta) / n);
        for (int j = 0; j < 5; ++j)
            CHECK(std::abs(static_cast<double>(flips[j]) / n - delta) <= 3.0 * se);
    }
}
