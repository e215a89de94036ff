#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "parhyb/convex_set.hpp"
#include "parhyb/halfspace.hpp"
#include "parhyb/linalg.hpp"
#include "parhyb/operators.hpp"

namespace parhyb {

// ---------------------------------------------------------------------------
// Problem and parameters
// ---------------------------------------------------------------------------

// The three families plus the feasible set C and the anchor x0. The witness,
// when present, is a known common solution used only by monitors and tests.
struct ProblemInstance {
    std::size_t dim = 0;
    ConvexSet feasible_set = WholeSpace{1};
    std::vector<Bifunction> bifunctions;     // {f_l}, l = 1..K
    std::vector<IsmOperator> ism_ops;        // {A_k}, k = 1..M
    std::vector<NonexpansiveMap> maps;       // {S_i}, i = 1..N
    Vector x0;
    std::optional<Vector> solution_witness;
};

// Shape checks plus witness verification (fixed-point, VI and sampled
// equilibrium inequalities). Throws std::invalid_argument.
void validate_problem(const ProblemInstance& prob, std::uint64_t seed = 42);

struct ConstantSchedule {
    double value = 0.0;
};

// value(n) = scale / (n + 1)
struct HarmonicDecaySchedule {
    double scale = 0.0;
};

struct Schedule {
    std::variant<ConstantSchedule, HarmonicDecaySchedule> rule = ConstantSchedule{0.0};

    double at(std::size_t n) const;
    double limsup() const;
    double min_value() const;
};

enum class Variant { MainHybrid, SimplifiedAlg34, MinNormCor32, FixedPointOnlyCor36 };

std::string variant_name(Variant v);

struct SolverParams {
    std::optional<double> lambda;  // default: the family modulus (midpoint of (0, 2a))
    Schedule alpha_schedule{ConstantSchedule{0.5}};
    Schedule r_schedule{ConstantSchedule{1.0}};
    double d = 1e-6;
    double stop_tol = 1e-8;
    std::size_t max_iter = 100000;
    Variant variant = Variant::MainHybrid;
    ResolventConfig resolvent_cfg;
    std::optional<double> mu;  // MinNormCor32 only; default modulus/2
    unsigned threads = 0;      // 0: hardware concurrency
    std::size_t trace_every = 1;
};

// ---------------------------------------------------------------------------
// Iteration state and results
// ---------------------------------------------------------------------------

// Snapshot after one step: x is x_{n+1}; candidates, selections, half-spaces
// and the projection certificate describe the step that produced it.
struct IterationState {
    std::size_t n = 0;
    Vector x;
    std::vector<Vector> z_candidates;
    std::vector<Vector> u_candidates;
    std::vector<Vector> y_candidates;
    std::optional<std::size_t> l_n, k_n, i_n;
    Vector z_bar, u_bar, y_bar;
    HalfSpaceList halfspaces;
    std::optional<KktSolution> last_projection;
};

struct TraceRecord {
    std::size_t n = 0;
    double step_norm = 0.0;         // ||x_{n+1} - x_n||
    double stage_residual = 0.0;    // ||x_n - y_bar||
    double z_residual = 0.0;        // ||x_n - z_bar||
    double zu_gap = 0.0;            // ||z_bar - u_bar||
    double fejer = 0.0;             // ||x_n - x0||
    std::optional<double> witness_distance;
    std::optional<double> witness_slack;  // max half-space violation of the witness
    std::optional<double> c_slack;        // containment slack of x_n in C (C != H)
    double stage_seconds = 0.0;           // not serialized: traces stay thread-count independent
};

enum class SolveStatus { Converged, MaxIterations, StoppedAtFixedPoint, NumericalBreakdown };

std::string status_name(SolveStatus s);

struct MonitorViolation {
    std::size_t n = 0;
    std::string check;
    double magnitude = 0.0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::MaxIterations;
    Vector final_point;
    std::size_t iterations = 0;
    std::vector<TraceRecord> trace;
    std::vector<MonitorViolation> monitor_violations;
    std::string diagnostic;  // breakdown details
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Lowest index attaining the maximum distance from x; throws on empty input.
std::pair<std::size_t, Vector> select_farthest(const std::vector<Vector>& candidates,
                                               const Vector& x);

// One full iteration of each scheme. Empty families pass the point through.
IterationState hybrid_step(const IterationState& state, const ProblemInstance& prob,
                           const SolverParams& params);
IterationState simplified_step_alg34(const IterationState& state,
                                     const ProblemInstance& prob,
                                     const SolverParams& params);
IterationState min_norm_step_cor32(const IterationState& state,
                                   const ProblemInstance& prob,
                                   const SolverParams& params);
IterationState fixed_point_step_cor36(const IterationState& state,
                                      const ProblemInstance& prob,
                                      const SolverParams& params);

IterationState make_initial_state(const ProblemInstance& prob);

// Per-iteration witness checks: containment in every generated half-space,
// the distance chain ||u-y|| <= ||u-z|| <= ||u-x||, and the nondecreasing
// anchor distance. Reports, never aborts.
std::vector<MonitorViolation> monitor_invariants(const IterationState& before,
                                                 const IterationState& after,
                                                 const ProblemInstance& prob,
                                                 const Vector& x0);

// Validates parameters against the problem (lambda range, schedule bounds,
// variant preconditions). Throws std::invalid_argument.
void validate_params(const ProblemInstance& prob, const SolverParams& params);

SolveResult solve(const ProblemInstance& prob, const SolverParams& params);

}  // namespace parhyb
