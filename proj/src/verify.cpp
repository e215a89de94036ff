#include "parhyb/verify.hpp"

#include <cmath>
#include <sstream>

#include "parhyb/halfspace.hpp"
#include "parhyb/problem_io.hpp"
#include "parhyb/reference_problems.hpp"
#include "parhyb/rng.hpp"
#include "parhyb/solver.hpp"

namespace parhyb {

namespace {

PropertyReport report(std::string name, int samples, double worst, double tol) {
    return {std::move(name), samples, worst, tol, worst <= tol};
}

std::vector<ConvexSet> set_catalogue() {
    return {
        Box{{0.0, 0.0}, {1.0, 1.0}},
        Box{{-2.0, 0.5, -1.0}, {-1.0, 0.5, 4.0}},
        Ball{{0.0, 0.0}, 1.0},
        Ball{{1.0, -2.0, 0.5}, 0.75},
        HalfSpace{{1.0, 0.0}, 0.0},
        HalfSpace{{1.0, -2.0, 3.0}, 1.5},
        WholeSpace{3},
        AffineSubspace{{1.0, 1.0, 0.0}, {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}}},
    };
}

Matrix random_psd(Rng& rng, std::size_t d, double ridge) {
    Matrix g(d, d);
    for (auto& x : g.data) x = rng.gaussian();
    Matrix s(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += g(k, i) * g(k, j);
            s(i, j) = acc;
        }
    }
    for (std::size_t i = 0; i < d; ++i) s(i, i) += ridge;
    return s;
}

HalfSpace random_halfspace(Rng& rng, std::size_t d) {
    Vector n = rng.gaussian_vector(d);
    while (norm(n) < 1e-6) n = rng.gaussian_vector(d);
    // Offset chosen so the set contains a neighborhood-ish region around the
    // origin roughly half the time and excludes x0 otherwise.
    return {n, rng.uniform(-1.0, 2.0)};
}

}  // namespace

SuiteReport run_projection_suite(int samples, std::uint64_t seed) {
    SuiteReport out{"projections", {}};
    Rng rng(seed);
    const auto sets = set_catalogue();

    double idem = 0.0, firm = 0.0, distineq = 0.0, charact = 0.0;
    for (const auto& set : sets) {
        const std::size_t d = set_dim(set);
        for (int s = 0; s < samples; ++s) {
            const Vector x = rng.gaussian_vector(d, 3.0);
            const Vector y = rng.gaussian_vector(d, 3.0);
            const Vector px = project(set, x);
            const Vector py = project(set, y);

            idem = std::max(idem, dist(project(set, px), px));
            firm = std::max(firm, norm_sq(sub(px, py)) - inner(sub(px, py), sub(x, y)));

            const Vector inside = sample_point(set, rng, 2.0);
            distineq = std::max(distineq, norm_sq(sub(inside, py)) + norm_sq(sub(py, y)) -
                                              norm_sq(sub(inside, y)));
        }
        Rng sample_rng(seed + 17);
        for (int s = 0; s < 64; ++s) {
            const Vector x = rng.gaussian_vector(d, 3.0);
            const Vector p = project(set, x);
            const Vector y = sample_point(set, sample_rng, 2.0);
            charact = std::max(charact, -inner(sub(x, p), sub(p, y)));
        }
    }
    out.properties.push_back(report("projection idempotence", samples, idem, 1e-12));
    out.properties.push_back(report("firm nonexpansiveness", samples, firm, 1e-9));
    out.properties.push_back(report("distance inequality", samples, distineq, 1e-9));
    out.properties.push_back(report("variational characterization", 64, charact, 1e-9));
    return out;
}

SuiteReport run_resolvent_suite(int samples, std::uint64_t seed) {
    SuiteReport out{"resolvents", {}};
    Rng rng(seed + 1);

    struct Case {
        Bifunction f;
        ConvexSet c;
        double r;
    };
    std::vector<Case> cases;
    cases.push_back({make_zero_bifunction(2), Box{{0.0, 0.0}, {1.0, 1.0}}, 1.0});
    cases.push_back({make_zero_bifunction(2), Ball{{0.0, 0.0}, 1.0}, 2.0});
    cases.push_back({make_linear_monotone(Matrix::identity(2), zeros(2)), WholeSpace{2}, 1.0});
    cases.push_back({make_linear_monotone(random_psd(rng, 3, 0.1), {0.3, -0.2, 0.5}),
                     Box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}}, 0.7});
    cases.push_back({make_convex_difference(Matrix::identity(2), zeros(2), 0.0),
                     Box{{-1.0, -1.0}, {1.0, 1.0}}, 1.5});
    cases.push_back(
        {make_convex_difference(random_psd(rng, 2, 0.2), {0.1, 0.4}, 1.0), WholeSpace{2}, 1.0});

    double firm = 0.0;
    for (const auto& c : cases) {
        const auto rep =
            verify_resolvent_properties(c.f, c.c, c.r, std::max(1, samples / 4), seed + 2);
        firm = std::max(firm, rep.max_violation);
    }
    out.properties.push_back(report("firm nonexpansiveness", samples, firm, 1e-8));

    double zero_gap = 0.0;
    const ConvexSet ball = Ball{{0.5, -0.5}, 2.0};
    const Bifunction zf = make_zero_bifunction(2);
    for (int s = 0; s < samples; ++s) {
        const Vector x = rng.gaussian_vector(2, 3.0);
        zero_gap = std::max(zero_gap, dist(resolvent(zf, ball, 1.0, x), project(ball, x)));
    }
    out.properties.push_back(report("zero bifunction equals projection", samples, zero_gap, 1e-12));

    double subst = 0.0;
    {
        const Matrix p = random_psd(rng, 3, 0.05);
        const Vector q{0.2, -0.7, 0.1};
        const Bifunction f = make_linear_monotone(p, q);
        const ConvexSet h = WholeSpace{3};
        for (int s = 0; s < samples; ++s) {
            const Vector x = rng.gaussian_vector(3, 2.0);
            const double r = rng.uniform(0.2, 3.0);
            const Vector z = resolvent(f, h, r, x);
            // (I + rP) z - (x - r q)
            Vector resid = add(z, scaled(matvec(p, z), r));
            resid = sub(resid, sub(x, scaled(q, r)));
            subst = std::max(subst, norm(resid));
        }
    }
    out.properties.push_back(report("whole-space substitution residual", samples, subst, 1e-10));

    double single = 0.0, certificate = 0.0;
    {
        const Bifunction f = make_linear_monotone(random_psd(rng, 2, 0.3), {0.4, -0.1});
        const ConvexSet box = Box{{-1.0, -1.0}, {1.0, 1.0}};
        for (int s = 0; s < std::max(1, samples / 10); ++s) {
            const Vector x = rng.gaussian_vector(2, 2.0);
            const Vector start = rng.gaussian_vector(2, 2.0);
            const Vector z1 = resolvent(f, box, 1.0, x);
            const Vector z2 = resolvent(f, box, 1.0, x, {}, &start);
            single = std::max(single, dist(z1, z2));
            certificate = std::max(certificate,
                                   resolvent_certificate(f, box, 1.0, x, z1, seed + 3));
        }
    }
    out.properties.push_back(report("single-valuedness", samples / 10, single, 1e-8));
    out.properties.push_back(report("regularized inequality certificate", samples / 10,
                                    certificate, 1e-8));

    // Fixed-point property at a seeded equilibrium point: for f built around
    // u, T_r^f u = u.
    double fixed = 0.0;
    {
        const Vector u{0.2, -0.3};
        Matrix p = Matrix::identity(2);
        const Bifunction f = make_linear_monotone(p, scaled(u, -1.0));
        const ConvexSet box = Box{{-1.0, -1.0}, {1.0, 1.0}};
        for (double r : {0.5, 1.0, 2.0}) {
            fixed = std::max(fixed, dist(resolvent(f, box, r, u), u));
        }
    }
    out.properties.push_back(report("equilibrium fixed point", 3, fixed, 1e-8));
    return out;
}

SuiteReport run_projector_suite(int samples, std::uint64_t seed) {
    SuiteReport out{"projector", {}};
    Rng rng(seed + 5);

    double two_vs_enum = 0.0, kkt = 0.0, idem = 0.0;
    for (int s = 0; s < samples; ++s) {
        const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
        const HalfSpace a = random_halfspace(rng, d);
        const HalfSpace b = random_halfspace(rng, d);
        const Vector x0 = rng.gaussian_vector(d, 2.0);

        KktSolution fast, full;
        try {
            fast = project_two(x0, a, b);
            full = project_intersection(x0, {a, b});
        } catch (const InfeasibleIntersection&) {
            continue;  // random pair with empty intersection
        }
        two_vs_enum = std::max(two_vs_enum, dist(fast.point, full.point));
        kkt = std::max(kkt, kkt_max_error(x0, {a, b}, fast));
        kkt = std::max(kkt, kkt_max_error(x0, {a, b}, full));
        idem = std::max(idem, dist(project_intersection(full.point, {a, b}).point, full.point));
    }
    out.properties.push_back(report("two-half-space fast path vs enumeration", samples,
                                    two_vs_enum, 1e-10));
    out.properties.push_back(report("KKT certificate", samples, kkt, 1e-9));
    out.properties.push_back(report("projection idempotence", samples, idem, 1e-12));

    double firm = 0.0;
    {
        const HalfSpaceList hs{{{1.0, 0.2, -0.3}, 0.5}, {{-0.4, 1.0, 0.1}, 0.8},
                               {{0.3, -0.5, 1.0}, 1.2}};
        for (int s = 0; s < samples; ++s) {
            const Vector x = rng.gaussian_vector(3, 2.0);
            const Vector y = rng.gaussian_vector(3, 2.0);
            const Vector px = project_intersection(x, hs).point;
            const Vector py = project_intersection(y, hs).point;
            firm = std::max(firm, norm_sq(sub(px, py)) - inner(sub(px, py), sub(x, y)));
        }
    }
    out.properties.push_back(report("firm nonexpansiveness", samples, firm, 1e-8));

    double midpoint = 0.0;
    for (int s = 0; s < samples; ++s) {
        const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
        const Vector nearp = rng.gaussian_vector(d, 2.0);
        const Vector farp = rng.gaussian_vector(d, 2.0);
        const HalfSpace h = bisector_halfspace(nearp, farp);
        const Vector mid = lin_comb(0.5, nearp, 0.5, farp);
        midpoint = std::max(midpoint, std::abs(inner(h.normal, mid) - h.offset));
    }
    out.properties.push_back(report("bisector midpoint on boundary", samples, midpoint, 1e-12));
    return out;
}

SuiteReport run_solver_suite(std::uint64_t seed) {
    (void)seed;  // runs are deterministic; the seed only feeds witness checks
    SuiteReport out{"solver", {}};

    double limit_err = 0.0;
    double fejer = 0.0;
    int monitor_violations = 0;
    bool thread_invariant = true;
    int failed_runs = 0;

    for (const auto& c : reference_cases()) {
        SolverParams params = c.params;
        params.threads = 1;
        const SolveResult res = solve(c.problem, params);
        if (res.status == SolveStatus::NumericalBreakdown) {
            ++failed_runs;
            continue;
        }
        limit_err = std::max(limit_err, dist(res.final_point, c.expected));
        monitor_violations += static_cast<int>(res.monitor_violations.size());
        for (std::size_t i = 1; i < res.trace.size(); ++i) {
            fejer = std::max(fejer, res.trace[i - 1].fejer - res.trace[i].fejer);
        }

        std::ostringstream base;
        write_trace(base, res);
        for (unsigned t : {2u, 0u}) {
            SolverParams alt = c.params;
            alt.threads = t;
            std::ostringstream other;
            write_trace(other, solve(c.problem, alt));
            if (other.str() != base.str()) thread_invariant = false;
        }
    }

    out.properties.push_back(report("runs free of numerical breakdown", 0, failed_runs, 0.0));
    out.properties.push_back(report("limit matches known solution", 0, limit_err, 1e-4));
    out.properties.push_back(report("anchor distance nondecreasing", 0, fejer, 1e-10));
    out.properties.push_back(report("monitor violations", 0, monitor_violations, 0.0));
    out.properties.push_back(
        report("traces independent of thread count", 0, thread_invariant ? 0.0 : 1.0, 0.0));
    return out;
}

std::vector<SuiteReport> run_suites(const std::string& which, int samples,
                                    std::uint64_t seed) {
    std::vector<SuiteReport> out;
    const bool all = which == "all";
    if (all || which == "projections") out.push_back(run_projection_suite(samples, seed));
    if (all || which == "resolvents") out.push_back(run_resolvent_suite(samples, seed));
    if (all || which == "projector") out.push_back(run_projector_suite(samples, seed));
    if (all || which == "solver") out.push_back(run_solver_suite(seed));
    if (out.empty()) throw std::invalid_argument("unknown suite: " + which);
    return out;
}

}  // namespace parhyb
