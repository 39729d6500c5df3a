#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "hybridgrid/aa_model.hpp"

using namespace hybridgrid;

TEST_CASE("amplified probability identities") {
    for (double p : {0.0, 1e-7, 0.01, 0.3, 0.77, 1.0}) {
        CHECK(amplified_probability(p, 0) == doctest::Approx(p).epsilon(1e-12));
    }
    for (int k : {0, 1, 5, 100}) {
        CHECK(amplified_probability(0.0, k) == 0.0);
        CHECK(amplified_probability(1.0, k) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(amplified_probability(0.25, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(amplified_probability(1.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(amplified_probability(-0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(amplified_probability(0.5, -1), std::invalid_argument);
    CHECK(amplified_probability(1.0 + 1e-13, 3) <= 1.0);
}

TEST_CASE("amplified probability increases below the first peak") {
    for (double p : {1e-6, 1e-4, 0.003, 0.05}) {
        const double theta = std::asin(std::sqrt(p));
        double previous = -1.0;
        for (int k = 0; (2 * k + 1) * theta <= std::numbers::pi / 2; ++k) {
            const double now = amplified_probability(p, k);
            CHECK(now > previous);
            previous = now;
        }
    }
}

TEST_CASE("amplified probability matches explicit rotation") {
    for (double p = 0.0; p <= 1.0; p += 1.0 / 64) {
        const double s0 = std::sqrt(1.0 - p);
        const double s1 = std::sqrt(p);
        double bad = s0;
        double good = s1;
        for (int k = 0; k < 64; ++k) {
            CHECK(std::abs(amplified_probability(p, k) - good * good) <= 1e-12);
            good = -good;
            const double overlap = s0 * bad + s1 * good;
            bad = 2.0 * overlap * s0 - bad;
            good = 2.0 * overlap * s1 - good;
        }
    }
}

TEST_CASE("iteration choices") {
    CHECK(iteration_choices(1.0, IterationBound::ceil) == 1);
    CHECK(iteration_choices(1.0, IterationBound::floor) == 1);
    CHECK(iteration_choices(2.0, IterationBound::ceil) == 2);
    CHECK(iteration_choices(2.0, IterationBound::floor) == 2);
    CHECK(iteration_choices(2.5, IterationBound::ceil) == 3);
    CHECK(iteration_choices(2.5, IterationBound::floor) == 2);
    CHECK(iteration_choices(1.25, IterationBound::floor) == 1);
    CHECK(iteration_choices(1.25, IterationBound::ceil) == 2);
}

TEST_CASE("sample_k support and uniformity") {
    Rng rng = make_rng(11);
    BoyerState s;
    s.m = 1.0;
    for (int i = 0; i < 100; ++i) CHECK(sample_k(s, rng) == 0);

    s.m = 2.5;
    std::set<std::int64_t> ceil_support;
    std::set<std::int64_t> floor_support;
    for (int i = 0; i < 2000; ++i) {
        ceil_support.insert(sample_k(s, rng, IterationBound::ceil));
        floor_support.insert(sample_k(s, rng, IterationBound::floor));
    }
    CHECK(ceil_support == std::set<std::int64_t>{0, 1, 2});
    CHECK(floor_support == std::set<std::int64_t>{0, 1});

    s.m = 2.0;
    const int n = 10000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += static_cast<int>(sample_k(s, rng));
    CHECK(std::abs(ones - n / 2) <= 4.0 * std::sqrt(n * 0.25));
}

TEST_CASE("grow_m") {
    BoyerState s = BoyerState::at_length(4);
    CHECK(s.m_max() == 16.0);
    s = grow_m(s);
    CHECK(s.m == 1.25);
    CHECK(s.length == 4);
    for (int j = 2; j <= 13; ++j) {
        s = grow_m(s);
        CHECK(s.m == doctest::Approx(std::min(std::pow(1.25, j), 16.0)).epsilon(1e-14));
    }
    CHECK(s.m == 16.0);
    CHECK(grow_m(s).m == 16.0);
    CHECK(std::isinf(BoyerState::at_length(5000).m_max()));
}

TEST_CASE("jump probability") {
    CHECK(jump_probability(1.0, 7) == 0.0);
    CHECK(jump_probability(2.0, 1) == 1.0);
    for (int l : {1, 2, 5, 16, 64}) CHECK(jump_probability(std::ldexp(1.0, l), l) == 1.0);
    CHECK(jump_probability(1.5, 3) < jump_probability(1.6, 3));
    CHECK(jump_probability(1.5, 3) > jump_probability(1.5, 4));
    CHECK_THROWS_AS(jump_probability(0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(jump_probability(2.0, 0), std::invalid_argument);

    for (int l : {1, 4, 32, 256}) {
        BoyerState s = BoyerState::at_length(l);
        int steps = 0;
        while (jump_probability(s.m, l) < 1.0) {
            s = grow_m(s);
            REQUIRE(++steps < 10000);
        }
    }
}
