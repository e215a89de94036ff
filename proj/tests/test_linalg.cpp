#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "parhyb/linalg.hpp"
#include "parhyb/rng.hpp"

using namespace parhyb;

TEST_CASE("inner product basics") {
    CHECK(inner({1.0, 0.0}, {0.0, 1.0}) == 0.0);
    CHECK(inner({1.0, 2.0}, {3.0, 4.0}) == 11.0);
    CHECK_THROWS_AS(inner({1.0}, {1.0, 2.0}), std::invalid_argument);

    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Vector a = rng.gaussian_vector(5);
        const Vector b = rng.gaussian_vector(5);
        CHECK(inner(a, a) == doctest::Approx(norm(a) * norm(a)).epsilon(1e-12));
        CHECK(inner(a, b) == inner(b, a));
        const double s = rng.uniform(-3.0, 3.0);
        CHECK(inner(scaled(a, s), b) == doctest::Approx(s * inner(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("norm basics") {
    CHECK(norm({3.0, 4.0}) == 5.0);
    CHECK(norm(zeros(4)) == 0.0);

    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const Vector a = rng.gaussian_vector(4);
        const double s = rng.uniform(-2.0, 2.0);
        CHECK(norm(scaled(a, s)) == doctest::Approx(std::abs(s) * norm(a)).epsilon(1e-12));
    }
}

TEST_CASE("Cauchy-Schwarz and parallelogram law") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        const Vector a = rng.gaussian_vector(6, 2.0);
        const Vector b = rng.gaussian_vector(6, 2.0);
        CHECK(std::abs(inner(a, b)) <= norm(a) * norm(b) + 1e-12);

        const double lhs = norm_sq(add(a, b)) + norm_sq(sub(a, b));
        const double rhs = 2.0 * (norm_sq(a) + norm_sq(b));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + rhs));
    }
}

TEST_CASE("solve_small on fixed systems") {
    SUBCASE("identity") {
        const auto x = solve_small({Matrix::identity(2), {5.0, 7.0}});
        REQUIRE(x.has_value());
        CHECK((*x)[0] == 5.0);
        CHECK((*x)[1] == 7.0);
    }
    SUBCASE("diagonal") {
        Matrix m(2, 2);
        m(0, 0) = 2.0;
        m(1, 1) = 4.0;
        const auto x = solve_small({m, {2.0, 8.0}});
        REQUIRE(x.has_value());
        CHECK((*x)[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((*x)[1] == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("singular flags instead of crashing") {
        Matrix m(2, 2);
        m(0, 0) = m(0, 1) = m(1, 0) = m(1, 1) = 1.0;
        CHECK_FALSE(solve_small({m, {1.0, 2.0}}).has_value());
    }
    SUBCASE("size cap") {
        CHECK_THROWS_AS(solve_small({Matrix::identity(9), Vector(9, 1.0)}),
                        std::invalid_argument);
    }
}

TEST_CASE("solve_small residual bound on random systems") {
    Rng rng(10);
    int solved = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform(0.0, 8.0));
        Matrix a(m, m);
        for (auto& v : a.data) v = rng.uniform(-1.0, 1.0);
        Vector b(m);
        for (auto& v : b) v = rng.uniform(-1.0, 1.0);

        const auto x = solve_small({a, b});
        if (!x) continue;  // singular flag is a legal outcome
        ++solved;
        double resid = 0.0, bmax = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < m; ++j) s -= a(i, j) * (*x)[j];
            resid = std::max(resid, std::abs(s));
            bmax = std::max(bmax, std::abs(b[i]));
        }
        CHECK(resid <= 1e-10 * (1.0 + bmax));
    }
    CHECK(solved > 900);  // nearly all random systems are regular
}

TEST_CASE("finite-entry validation") {
    CHECK_THROWS_AS(ensure_finite({1.0, std::nan("")}, "v"), std::invalid_argument);
    CHECK_THROWS_AS(ensure_finite({std::numeric_limits<double>::infinity()}, "v"),
                    std::invalid_argument);
}
