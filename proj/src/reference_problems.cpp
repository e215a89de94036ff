#include "parhyb/reference_problems.hpp"

namespace parhyb {

namespace {

Matrix diag(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

// x -> x - (<a, x> - beta) a for a unit vector a: the projection onto the
// hyperplane <a, x> = beta, written as an affine contraction.
NonexpansiveMap hyperplane_projector(const Vector& a, double beta) {
    Matrix m = Matrix::identity(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m(i, j) -= a[i] * a[j];
    return make_nonexpansive(AffineContraction{std::move(m), scaled(a, beta)},
                             scaled(a, beta));
}

// dim 1, single zero map: the iterates shrink geometrically, x_n = 2^{-n},
// limit 0.
ReferenceCase shrink_1d() {
    ReferenceCase c;
    c.name = "shrink1d";
    c.problem.dim = 1;
    c.problem.feasible_set = WholeSpace{1};
    c.problem.maps.push_back(
        make_nonexpansive(ProjectionOnto{Box{{0.0}, {0.0}}}, Vector{0.0}));
    c.problem.x0 = {1.0};
    c.problem.solution_witness = Vector{0.0};
    c.params.variant = Variant::MainHybrid;
    c.params.alpha_schedule = Schedule{ConstantSchedule{0.0}};
    c.expected = {0.0};
    return c;
}

// Two overlapping unit balls; x0 sits on the symmetry axis above the lens, so
// the projection is the upper circle-intersection corner.
ReferenceCase two_ball() {
    ReferenceCase c;
    c.name = "twoball";
    c.problem.dim = 2;
    c.problem.feasible_set = WholeSpace{2};
    c.problem.maps.push_back(make_nonexpansive(ProjectionOnto{Ball{{0.0, 0.0}, 1.0}}));
    c.problem.maps.push_back(make_nonexpansive(ProjectionOnto{Ball{{1.2, 0.0}, 1.0}}));
    c.problem.x0 = {0.6, 2.0};
    c.problem.solution_witness = Vector{0.6, 0.0};
    c.params.variant = Variant::FixedPointOnlyCor36;
    c.params.alpha_schedule = Schedule{ConstantSchedule{0.0}};
    c.expected = {0.6, 0.8};
    return c;
}

// Two bifunctions, two operators, two maps, all solved exactly at u, so the
// common solution set is the singleton {u}.
ReferenceCase mixed_222() {
    ReferenceCase c;
    c.name = "mixed222";
    const Vector u{0.25, -0.4, 0.1};
    c.problem.dim = 3;
    c.problem.feasible_set = Box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    c.problem.bifunctions.push_back(
        make_linear_monotone(Matrix::identity(3), scaled(u, -1.0)));
    c.problem.bifunctions.push_back(make_zero_bifunction(3));
    c.problem.ism_ops.push_back(make_affine_monotone(Matrix::identity(3), u));
    const Matrix m2 = diag({1.0, 2.0, 1.0});
    c.problem.ism_ops.push_back(make_affine_monotone(m2, matvec(m2, u)));
    c.problem.maps.push_back(make_nonexpansive(ProjectionOnto{Ball{u, 0.3}}, u));
    c.problem.maps.push_back(make_nonexpansive(
        ProjectionOnto{Box{{0.05, -0.6, -0.1}, {0.45, -0.2, 0.3}}}, u));
    c.problem.x0 = {0.9, 0.8, -0.7};
    c.problem.solution_witness = u;
    c.params.variant = Variant::MainHybrid;
    c.expected = u;
    return c;
}

// F is the box [-1,0]^2, realized as the intersection of two box-projection
// fixed-point sets; the limit is the componentwise clamp of x0.
ReferenceCase box_fix() {
    ReferenceCase c;
    c.name = "boxfix";
    c.problem.dim = 2;
    c.problem.feasible_set = WholeSpace{2};
    c.problem.maps.push_back(
        make_nonexpansive(ProjectionOnto{Box{{-1.0, -1.0}, {0.0, 1.0}}}));
    c.problem.maps.push_back(
        make_nonexpansive(ProjectionOnto{Box{{-1.0, -1.0}, {1.0, 0.0}}}));
    c.problem.x0 = {1.0, 1.0};
    c.problem.solution_witness = Vector{-0.5, -0.5};
    c.params.variant = Variant::MainHybrid;
    c.params.alpha_schedule = Schedule{ConstantSchedule{0.0}};
    c.expected = {0.0, 0.0};
    return c;
}

// Operator A = I - P_{inner ball} on the unit ball: its solution set is the
// inner ball, so the limit is the radial projection of x0 onto it.
ReferenceCase alg34_ball() {
    ReferenceCase c;
    c.name = "alg34ball";
    c.problem.dim = 2;
    c.problem.feasible_set = Ball{{0.0, 0.0}, 1.0};
    c.problem.ism_ops.push_back(make_residual_of_nonexpansive(
        make_nonexpansive(ProjectionOnto{Ball{{0.0, 0.0}, 0.5}})));
    c.problem.maps.push_back(make_nonexpansive(Identity{2}));
    c.problem.x0 = {2.0, 0.0};
    c.problem.solution_witness = Vector{0.25, 0.0};
    c.params.variant = Variant::SimplifiedAlg34;
    c.expected = {0.5, 0.0};
    return c;
}

// Consistent linear system <a_i, x> = beta_i with orthonormal a_i; the
// x0-nearest solution is x0 minus its residual components along the a_i.
ReferenceCase min_norm_ls() {
    ReferenceCase c;
    c.name = "minnorm_ls";
    const Vector a1{0.5, 0.5, 0.5, 0.5};
    const Vector a2{0.5, -0.5, 0.5, -0.5};
    c.problem.dim = 4;
    c.problem.feasible_set = WholeSpace{4};
    c.problem.ism_ops.push_back(make_residual_of_nonexpansive(hyperplane_projector(a1, 0.5)));
    c.problem.ism_ops.push_back(make_residual_of_nonexpansive(hyperplane_projector(a2, -1.2)));
    c.problem.x0 = {0.3, 0.3, 0.3, 0.3};
    c.problem.solution_witness = Vector{-0.35, 0.85, -0.35, 0.85};
    c.params.variant = Variant::MinNormCor32;
    c.params.mu = 0.25;
    c.expected = {-0.35, 0.85, -0.35, 0.85};
    return c;
}

// dim 10, one box projection map: the limit clamps x0 to the box.
ReferenceCase dim10_box() {
    ReferenceCase c;
    c.name = "dim10box";
    const std::size_t d = 10;
    c.problem.dim = d;
    c.problem.feasible_set = WholeSpace{d};
    c.problem.maps.push_back(
        make_nonexpansive(ProjectionOnto{Box{Vector(d, -0.5), Vector(d, 0.5)}}));
    c.problem.x0 = {1.0, -1.0, 2.0, 0.3, -0.2, 0.8, -1.5, 0.1, 0.6, -0.9};
    c.problem.solution_witness = Vector(d, 0.0);
    c.params.variant = Variant::MainHybrid;
    c.expected = {0.5, -0.5, 0.5, 0.3, -0.2, 0.5, -0.5, 0.1, 0.5, -0.5};
    return c;
}

}  // namespace

std::vector<ReferenceCase> reference_cases() {
    std::vector<ReferenceCase> cases;
    cases.push_back(shrink_1d());
    cases.push_back(two_ball());
    cases.push_back(mixed_222());
    cases.push_back(box_fix());
    cases.push_back(alg34_ball());
    cases.push_back(min_norm_ls());
    cases.push_back(dim10_box());
    for (auto& c : cases) validate_problem(c.problem);
    return cases;
}

}  // namespace parhyb
