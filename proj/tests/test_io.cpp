#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "parhyb/problem_io.hpp"
#include "parhyb/reference_problems.hpp"

using namespace parhyb;
using nlohmann::json;

namespace {

// one of everything, for the round-trip check
ProblemInstance full_problem() {
    ProblemInstance p;
    p.dim = 2;
    p.feasible_set = Box{{-1.0, -1.0}, {1.0, 1.0}};
    p.bifunctions.push_back(make_zero_bifunction(2));
    p.bifunctions.push_back(make_linear_monotone(Matrix::identity(2), {0.125, -0.25}));
    p.bifunctions.push_back(make_convex_difference(Matrix::identity(2), {0.5, 0.0}, 1.5));
    p.ism_ops.push_back(make_zero_operator(2));
    p.ism_ops.push_back(make_affine_monotone(Matrix::identity(2), {0.0625, 0.0}));
    p.ism_ops.push_back(make_residual_of_nonexpansive(
        make_nonexpansive(ProjectionOnto{Ball{{0.0, 0.0}, 0.5}})));
    p.maps.push_back(make_nonexpansive(Identity{2}));
    p.maps.push_back(make_nonexpansive(PlaneRotation{2, 0, 1, 0.375}, Vector{0.0, 0.0}));
    p.maps.push_back(make_nonexpansive(ProjectionOnto{Box{{-0.5, -0.5}, {0.5, 0.5}}}));
    p.x0 = {0.3333333333333333, -0.7777777777777778};
    p.solution_witness = Vector{0.0, 0.0};
    return p;
}

}  // namespace

TEST_CASE("problem file round trip is bitwise on numeric fields") {
    const ProblemInstance p = full_problem();
    const Schedule alpha{HarmonicDecaySchedule{0.9}};
    const Schedule r{ConstantSchedule{1.25}};
    const json j = problem_to_json(p, alpha, r);
    const LoadedProblem re = problem_from_json(j);

    CHECK(re.problem.dim == p.dim);
    CHECK(re.problem.x0 == p.x0);
    REQUIRE(re.problem.solution_witness.has_value());
    CHECK(*re.problem.solution_witness == *p.solution_witness);

    REQUIRE(re.problem.bifunctions.size() == 3);
    REQUIRE(re.problem.ism_ops.size() == 3);
    REQUIRE(re.problem.maps.size() == 3);
    CHECK(std::get<LinearMonotone>(re.problem.bifunctions[1].form).q ==
          std::get<LinearMonotone>(p.bifunctions[1].form).q);
    CHECK(std::get<AffineMonotone>(re.problem.ism_ops[1].form).b ==
          std::get<AffineMonotone>(p.ism_ops[1].form).b);
    CHECK(std::get<PlaneRotation>(re.problem.maps[1].form).angle ==
          std::get<PlaneRotation>(p.maps[1].form).angle);
    CHECK(re.problem.ism_ops[1].modulus == p.ism_ops[1].modulus);

    REQUIRE(re.alpha_schedule.has_value());
    CHECK(std::get<HarmonicDecaySchedule>(re.alpha_schedule->rule).scale == 0.9);
    REQUIRE(re.r_schedule.has_value());
    CHECK(std::get<ConstantSchedule>(re.r_schedule->rule).value == 1.25);

    // a second serialization is byte-identical
    CHECK(problem_to_json(re.problem, re.alpha_schedule, re.r_schedule).dump() == j.dump());
}

TEST_CASE("schema errors carry the offending path") {
    json j = problem_to_json(full_problem());
    j["ism_operators"][1]["kind"] = "mystery";
    try {
        problem_from_json(j);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("$.ism_operators[1].kind") != std::string::npos);
    }

    json missing = problem_to_json(full_problem());
    missing.erase("dim");
    CHECK_THROWS_WITH_AS(problem_from_json(missing), doctest::Contains("$.dim"),
                         SchemaError);

    json bad_set = problem_to_json(full_problem());
    bad_set["feasible_set"]["kind"] = "simplex";
    CHECK_THROWS_WITH_AS(problem_from_json(bad_set),
                         doctest::Contains("$.feasible_set.kind"), SchemaError);

    json bad_witness = problem_to_json(full_problem());
    bad_witness["witness"] = json::array({0.9, 0.9});  // not a common solution
    CHECK_THROWS_AS(problem_from_json(bad_witness), SchemaError);

    json bad_box = problem_to_json(full_problem());
    bad_box["feasible_set"]["lower"] = json::array({2.0, 2.0});
    CHECK_THROWS_WITH_AS(problem_from_json(bad_box), doctest::Contains("$.feasible_set"),
                         SchemaError);
}

TEST_CASE("trace files round trip") {
    ReferenceCase c;
    for (auto& rc : reference_cases()) {
        if (rc.name == "shrink1d") c = rc;
    }
    SolverParams params = c.params;
    params.threads = 1;
    const SolveResult res = solve(c.problem, params);

    std::ostringstream os;
    write_trace(os, res);
    const std::string text = os.str();

    // line count = iterations + summary
    std::size_t lines = 0;
    for (char ch : text) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == res.iterations + 1);

    std::istringstream is(text);
    const TraceSummary summary = read_trace(is);
    CHECK(summary.iterations == res.iterations);
    CHECK(summary.status == status_name(res.status));
    CHECK(summary.final_point == res.final_point);
    CHECK(summary.records.size() == res.trace.size());
    CHECK(summary.fejer_monotone);
    for (std::size_t i = 0; i < summary.records.size(); ++i) {
        CHECK(summary.records[i].step_norm == res.trace[i].step_norm);
        CHECK(summary.records[i].fejer == res.trace[i].fejer);
    }
}

TEST_CASE("malformed traces are rejected") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_trace(empty), TraceFormatError);

    std::istringstream garbage("not json\n");
    CHECK_THROWS_AS(read_trace(garbage), TraceFormatError);

    std::istringstream no_summary(R"({"n":0,"step_norm":1.0,"stage_residual":1.0,"fejer":0.0})"
                                  "\n");
    CHECK_THROWS_AS(read_trace(no_summary), TraceFormatError);
}

TEST_CASE("reference problems serialize and reload") {
    for (const auto& c : reference_cases()) {
        const json j = problem_to_json(c.problem);
        const LoadedProblem re = problem_from_json(j);
        CHECK(re.problem.dim == c.problem.dim);
        CHECK(re.problem.x0 == c.problem.x0);
        SolverParams params = c.params;
        params.threads = 1;
        params.max_iter = 50;
        const SolveResult a = solve(c.problem, params);
        const SolveResult b = solve(re.problem, params);
        CHECK(a.final_point == b.final_point);
    }
}
