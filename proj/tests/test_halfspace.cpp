#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "parhyb/halfspace.hpp"
#include "parhyb/rng.hpp"

using namespace parhyb;

TEST_CASE("bisector half-space") {
    const HalfSpace degenerate = bisector_halfspace({1.0, 1.0}, {1.0, 1.0});
    CHECK(norm(degenerate.normal) == 0.0);
    CHECK(degenerate.offset == 0.0);
    CHECK(halfspace_is_whole(degenerate));

    const HalfSpace h = bisector_halfspace({-1.0, 0.0}, {1.0, 0.0});
    CHECK(h.normal == Vector{2.0, 0.0});
    CHECK(h.offset == 0.0);

    Rng rng(24);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform(0.0, 6.0));
        const Vector a = rng.gaussian_vector(d, 2.0);
        const Vector b = rng.gaussian_vector(d, 2.0);
        const HalfSpace hs = bisector_halfspace(a, b);
        const Vector mid = lin_comb(0.5, a, 0.5, b);
        CHECK(std::abs(inner(hs.normal, mid) - hs.offset) <= 1e-12);
        // the near point satisfies, the far point does not (strictly inside/outside)
        CHECK(inner(hs.normal, a) <= hs.offset + 1e-12);
    }
}

TEST_CASE("monotonicity half-space") {
    CHECK(halfspace_is_whole(monotonicity_halfspace({1.0, 2.0}, {1.0, 2.0})));

    const HalfSpace q = monotonicity_halfspace({1.0, 0.0}, {0.5, 0.0});
    CHECK(q.normal == Vector{0.5, 0.0});
    CHECK(q.offset == doctest::Approx(0.25).epsilon(1e-15));
    // i.e. {v : v1 <= 0.5}
    CHECK(inner(q.normal, Vector{0.5, 7.0}) == doctest::Approx(q.offset));

    Rng rng(25);
    for (int i = 0; i < 500; ++i) {
        const Vector x0 = rng.gaussian_vector(3, 2.0);
        const Vector xn = rng.gaussian_vector(3, 2.0);
        const HalfSpace h = monotonicity_halfspace(x0, xn);
        // x_n sits on its own boundary
        CHECK(std::abs(inner(h.normal, xn) - h.offset) <= 1e-12);
    }
}

TEST_CASE("project_two case split") {
    SUBCASE("interior point returns unchanged with zero multipliers") {
        const HalfSpace cn{{1.0, 0.0}, 1.0};
        const HalfSpace qn{{0.0, 1.0}, 1.0};
        const auto sol = project_two({0.0, 0.0}, cn, qn);
        CHECK(sol.point == Vector{0.0, 0.0});
        CHECK(sol.multipliers.empty());
        CHECK(sol.active_set.empty());
    }
    SUBCASE("single-constraint formula when the other constraint is slack") {
        const HalfSpace cn = bisector_halfspace({-1.0, 0.0}, {1.0, 0.0});  // {v1 <= 0}
        const HalfSpace qn{{0.0, 0.0}, 0.0};                               // whole space
        const auto sol = project_two({2.0, 1.0}, cn, qn);
        CHECK(dist(sol.point, {0.0, 1.0}) <= 1e-14);
        REQUIRE(sol.active_set.size() == 1);
        CHECK(sol.active_set[0] == 0);
    }
    SUBCASE("two active constraints solve the 2x2 system") {
        const HalfSpace cn{{1.0, 0.0}, 0.0};
        const HalfSpace qn{{0.0, 1.0}, 0.0};
        const auto sol = project_two({1.0, 1.0}, cn, qn);
        CHECK(dist(sol.point, {0.0, 0.0}) <= 1e-14);
        REQUIRE(sol.multipliers.size() == 2);
        CHECK(sol.multipliers[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sol.multipliers[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("parallel normals fall back to enumeration") {
        const HalfSpace a{{1.0, 0.0}, 1.0};
        const HalfSpace b{{2.0, 0.0}, 1.0};  // same direction, tighter: v1 <= 0.5
        const auto sol = project_two({3.0, 0.0}, a, b);
        CHECK(dist(sol.point, {0.5, 0.0}) <= 1e-12);
    }
}

TEST_CASE("project_two equals project_intersection on random pairs") {
    Rng rng(26);
    int compared = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
        Vector n1 = rng.gaussian_vector(d), n2 = rng.gaussian_vector(d);
        if (norm(n1) < 1e-6 || norm(n2) < 1e-6) continue;
        const HalfSpace a{n1, rng.uniform(-1.0, 2.0)};
        const HalfSpace b{n2, rng.uniform(-1.0, 2.0)};
        const Vector x0 = rng.gaussian_vector(d, 2.0);
        KktSolution fast, full;
        try {
            fast = project_two(x0, a, b);
            full = project_intersection(x0, {a, b});
        } catch (const InfeasibleIntersection&) {
            continue;
        }
        ++compared;
        CHECK(dist(fast.point, full.point) <= 1e-10);
        CHECK(kkt_max_error(x0, {a, b}, fast) <= 1e-9);
        CHECK(kkt_max_error(x0, {a, b}, full) <= 1e-9);
    }
    CHECK(compared > 9000);
}

TEST_CASE("project_intersection basics") {
    SUBCASE("single half-space matches the convex-set projection") {
        const HalfSpace h{{1.0, 0.0}, 0.0};
        const auto sol = project_intersection({2.0, 3.0}, {h});
        CHECK(dist(sol.point, {0.0, 3.0}) <= 1e-14);
        CHECK(sol.point == project(ConvexSet(h), {2.0, 3.0}));
    }
    SUBCASE("empty and degenerate lists return the anchor") {
        CHECK(project_intersection({2.0, 3.0}, {}).point == Vector{2.0, 3.0});
        const HalfSpace whole{{0.0, 0.0}, 1.0};
        CHECK(project_intersection({2.0, 3.0}, {whole, whole}).point == Vector{2.0, 3.0});
    }
    SUBCASE("zero normal with negative offset is rejected") {
        const HalfSpace empty{{0.0, 0.0}, -1.0};
        CHECK_THROWS_AS(project_intersection({0.0, 0.0}, {empty}), InfeasibleIntersection);
    }
    SUBCASE("empty intersection raises") {
        const HalfSpace a{{1.0, 0.0}, -1.0};   // v1 <= -1
        const HalfSpace b{{-1.0, 0.0}, -1.0};  // v1 >= 1
        CHECK_THROWS_AS(project_intersection({0.0, 0.0}, {a, b}), InfeasibleIntersection);
    }
}

TEST_CASE("project_intersection against the grid oracle in R3") {
    Rng rng(27);
    for (int inst = 0; inst < 25; ++inst) {
        HalfSpaceList hs;
        for (int k = 0; k < 3; ++k) {
            Vector n = rng.gaussian_vector(3);
            while (norm(n) < 1e-6) n = rng.gaussian_vector(3);
            hs.push_back({n, rng.uniform(0.0, 1.5)});  // nonneg offset: contains the origin
        }
        const Vector x0 = rng.gaussian_vector(3, 2.0);
        const auto sol = project_intersection(x0, hs);
        CHECK(kkt_max_error(x0, hs, sol) <= 1e-9);

        const auto feasible = [&](const Vector& v) {
            for (const auto& h : hs) {
                if (inner(h.normal, v) > h.offset + 1e-12) return false;
            }
            return true;
        };
        const Vector oracle = oracles::grid_project(x0, zeros(3), feasible);
        CHECK(dist(sol.point, oracle) <= 1e-6);
    }
}

TEST_CASE("projector is firmly nonexpansive and idempotent") {
    Rng rng(28);
    const HalfSpaceList hs{{{1.0, 0.3, -0.2}, 0.4}, {{-0.5, 1.0, 0.0}, 0.9},
                           {{0.0, -0.4, 1.0}, 1.3}, {{0.2, 0.2, 0.2}, 2.0}};
    for (int i = 0; i < 1000; ++i) {
        const Vector x = rng.gaussian_vector(3, 2.0);
        const Vector y = rng.gaussian_vector(3, 2.0);
        const Vector px = project_intersection(x, hs).point;
        const Vector py = project_intersection(y, hs).point;
        CHECK(norm_sq(sub(px, py)) - inner(sub(px, py), sub(x, y)) <= 1e-8);
        CHECK(dist(project_intersection(px, hs).point, px) <= 1e-12);
    }
}

TEST_CASE("multipliers reconstruct the projection point") {
    Rng rng(29);
    for (int i = 0; i < 500; ++i) {
        HalfSpaceList hs;
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform(0.0, 4.0));
        for (std::size_t k = 0; k < m; ++k) {
            Vector n = rng.gaussian_vector(2);
            while (norm(n) < 1e-6) n = rng.gaussian_vector(2);
            hs.push_back({n, rng.uniform(0.0, 1.0)});
        }
        const Vector x0 = rng.gaussian_vector(2, 3.0);
        const auto sol = project_intersection(x0, hs);
        Vector rebuilt = x0;
        for (std::size_t j = 0; j < sol.active_set.size(); ++j) {
            CHECK(sol.multipliers[j] >= 0.0);
            rebuilt = sub(rebuilt, scaled(hs[sol.active_set[j]].normal, sol.multipliers[j]));
        }
        CHECK(dist(rebuilt, sol.point) <= 1e-9);
    }
}
