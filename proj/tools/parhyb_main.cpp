#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "parhyb/problem_io.hpp"
#include "parhyb/reference_problems.hpp"
#include "parhyb/solver.hpp"
#include "parhyb/verify.hpp"

namespace {

constexpr int kExitBadInput = 64;
constexpr int kExitBadTrace = 65;

parhyb::Variant parse_variant(const std::string& name) {
    if (name == "main") return parhyb::Variant::MainHybrid;
    if (name == "alg34") return parhyb::Variant::SimplifiedAlg34;
    if (name == "minnorm") return parhyb::Variant::MinNormCor32;
    if (name == "fixedpoint") return parhyb::Variant::FixedPointOnlyCor36;
    throw std::invalid_argument("unknown variant: " + name);
}

unsigned threads_from_env() {
    if (const char* env = std::getenv("SOLVER_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return 0;
}

void print_vector(std::ostream& os, const parhyb::Vector& v) {
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << "]";
}

struct SolveOptions {
    std::string problem_path;
    std::string variant = "main";
    double lambda = 0.0;
    bool has_lambda = false;
    double alpha = 0.0;
    bool has_alpha = false;
    double r = 0.0;
    bool has_r = false;
    double mu = 0.0;
    bool has_mu = false;
    double tol = 1e-8;
    std::size_t max_iter = 100000;
    std::string trace_path;
    unsigned threads = 0;
    bool has_threads = false;
    std::uint64_t seed = 42;
};

int run_solve(const SolveOptions& opt) {
    using namespace parhyb;
    LoadedProblem loaded;
    SolverParams params;
    try {
        loaded = load_problem_file(opt.problem_path, opt.seed);
        params.variant = parse_variant(opt.variant);
        if (loaded.alpha_schedule) params.alpha_schedule = *loaded.alpha_schedule;
        if (loaded.r_schedule) params.r_schedule = *loaded.r_schedule;
        if (opt.has_alpha) params.alpha_schedule = Schedule{ConstantSchedule{opt.alpha}};
        if (opt.has_r) params.r_schedule = Schedule{ConstantSchedule{opt.r}};
        if (opt.has_lambda) params.lambda = opt.lambda;
        if (opt.has_mu) params.mu = opt.mu;
        params.stop_tol = opt.tol;
        params.max_iter = opt.max_iter;
        params.threads = opt.has_threads ? opt.threads : threads_from_env();
        validate_params(loaded.problem, params);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    const SolveResult result = solve(loaded.problem, params);

    if (!opt.trace_path.empty()) {
        std::ofstream out(opt.trace_path);
        if (!out) {
            std::cerr << "error: cannot write trace file " << opt.trace_path << "\n";
            return kExitBadInput;
        }
        write_trace(out, result);
    }

    std::cout << "status: " << status_name(result.status) << "\n";
    std::cout << "iterations: " << result.iterations << "\n";
    std::cout.precision(17);
    std::cout << "final: ";
    print_vector(std::cout, result.final_point);
    std::cout << "\n";
    if (!result.monitor_violations.empty()) {
        std::cout << "monitor violations: " << result.monitor_violations.size() << "\n";
        for (const auto& v : result.monitor_violations) {
            std::cout << "  n=" << v.n << " " << v.check << " (" << v.magnitude << ")\n";
        }
    }
    if (!result.diagnostic.empty()) {
        std::cout << "diagnostic: " << result.diagnostic << "\n";
    }

    switch (result.status) {
        case SolveStatus::Converged:
        case SolveStatus::StoppedAtFixedPoint:
            return 0;
        case SolveStatus::MaxIterations:
            return 2;
        case SolveStatus::NumericalBreakdown:
            return 3;
    }
    return 3;
}

int run_verify(const std::string& suite, int samples, std::uint64_t seed) {
    using namespace parhyb;
    if (samples <= 0) {
        std::cerr << "error: --samples must be positive\n";
        return kExitBadInput;
    }
    std::vector<SuiteReport> reports;
    try {
        reports = run_suites(suite, samples, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    bool all_pass = true;
    for (const auto& rep : reports) {
        std::cout << "suite " << rep.suite << "\n";
        for (const auto& p : rep.properties) {
            std::cout << "  " << (p.pass ? "ok  " : "FAIL") << "  " << p.property
                      << ": max slack " << p.max_violation << " (tolerance " << p.tolerance
                      << ")\n";
            all_pass = all_pass && p.pass;
        }
    }
    return all_pass ? 0 : 1;
}

int run_trace_summary(const std::string& path) {
    using namespace parhyb;
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open trace file " << path << "\n";
        return kExitBadTrace;
    }
    TraceSummary summary;
    try {
        summary = read_trace(in);
    } catch (const TraceFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadTrace;
    }

    std::cout << "iterations: " << summary.iterations << "\n";
    std::cout << "status: " << summary.status << "\n";
    if (!summary.records.empty()) {
        const auto& last = summary.records.back();
        std::cout << "final step norm: " << last.step_norm << "\n";
        std::cout << "final stage residual: " << last.stage_residual << "\n";
    }
    std::cout << "fejer: "
              << (summary.fejer_monotone
                      ? std::string("monotone")
                      : "violated at n=" + std::to_string(summary.fejer_violation_at))
              << "\n";
    std::cout << "n,step_norm,stage_residual,fejer\n";
    std::cout.precision(17);
    for (const auto& r : summary.records) {
        std::cout << r.n << "," << r.step_norm << "," << r.stage_residual << "," << r.fejer
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel hybrid projection solver for systems of equilibrium problems, "
                 "variational inequalities and fixed-point constraints"};
    app.require_subcommand(1);

    SolveOptions sopt;
    auto* solve_cmd = app.add_subcommand("solve", "Run the solver on a problem file");
    solve_cmd->add_option("--problem", sopt.problem_path, "Problem file (JSON)")->required();
    solve_cmd->add_option("--variant", sopt.variant,
                          "main | alg34 | minnorm | fixedpoint (default main)");
    auto* lam = solve_cmd->add_option("--lambda", sopt.lambda, "Operator step length");
    auto* alp = solve_cmd->add_option("--alpha", sopt.alpha, "Constant relaxation weight");
    auto* rr = solve_cmd->add_option("--r", sopt.r, "Constant resolvent regularization");
    auto* mu = solve_cmd->add_option("--mu", sopt.mu, "Min-norm step (minnorm variant)");
    solve_cmd->add_option("--tol", sopt.tol, "Stopping tolerance (default 1e-8)");
    solve_cmd->add_option("--max-iter", sopt.max_iter, "Iteration cap (default 100000)");
    solve_cmd->add_option("--trace", sopt.trace_path, "Write a JSON-lines trace here");
    auto* thr = solve_cmd->add_option("--threads", sopt.threads,
                                      "Stage worker count (default: all cores)");
    solve_cmd->add_option("--seed", sopt.seed, "Seed for property sampling (default 42)");

    std::string suite = "all";
    int samples = 1000;
    std::uint64_t vseed = 42;
    auto* verify_cmd = app.add_subcommand("verify", "Run the property suites");
    verify_cmd->add_option("--suite", suite,
                           "projections | resolvents | projector | solver | all");
    verify_cmd->add_option("--samples", samples, "Sample count per property (default 1000)");
    verify_cmd->add_option("--seed", vseed, "Sampling seed (default 42)");

    std::string trace_path;
    auto* summary_cmd =
        app.add_subcommand("trace-summary", "Summarize a previously written trace");
    summary_cmd->add_option("--trace", trace_path, "Trace file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitBadInput;
    }

    sopt.has_lambda = lam->count() > 0;
    sopt.has_alpha = alp->count() > 0;
    sopt.has_r = rr->count() > 0;
    sopt.has_mu = mu->count() > 0;
    sopt.has_threads = thr->count() > 0;

    if (solve_cmd->parsed()) return run_solve(sopt);
    if (verify_cmd->parsed()) return run_verify(suite, samples, vseed);
    if (summary_cmd->parsed()) return run_trace_summary(trace_path);
    return kExitBadInput;
}
