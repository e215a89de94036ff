#include "parhyb/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>

namespace parhyb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Fork-join executor for the per-family stages. Each index is computed
// independently into its own slot, so results do not depend on the worker
// count; the argmax reductions run sequentially afterwards. Workers persist
// across stages and iterations.
class StagePool {
public:
    explicit StagePool(unsigned threads) {
        const unsigned extra = threads > 1 ? threads - 1 : 0;
        workers_.reserve(extra);
        for (unsigned w = 0; w < extra; ++w) {
            workers_.emplace_back([this] { worker_loop(); });
        }
    }

    StagePool(const StagePool&) = delete;
    StagePool& operator=(const StagePool&) = delete;

    ~StagePool() {
        {
            std::lock_guard lk(m_);
            stop_ = true;
        }
        cv_work_.notify_all();
        for (auto& t : workers_) t.join();
    }

    void run(std::size_t count, const std::function<void(std::size_t)>& fn) {
        if (count == 0) return;
        if (workers_.empty() || count == 1) {
            for (std::size_t i = 0; i < count; ++i) fn(i);
            return;
        }
        std::vector<std::exception_ptr> errors(count);
        {
            std::lock_guard lk(m_);
            job_ = &fn;
            errors_ = &errors;
            count_ = count;
            cursor_.store(0, std::memory_order_relaxed);
            pending_ = workers_.size();
            ++generation_;
        }
        cv_work_.notify_all();
        drain();
        {
            std::unique_lock lk(m_);
            cv_done_.wait(lk, [&] { return pending_ == 0; });
            job_ = nullptr;
            errors_ = nullptr;
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);  // lowest index first
        }
    }

private:
    void drain() {
        const auto* job = job_;
        auto* errors = errors_;
        for (;;) {
            const std::size_t i = cursor_.fetch_add(1, std::memory_order_relaxed);
            if (i >= count_) return;
            try {
                (*job)(i);
            } catch (...) {
                (*errors)[i] = std::current_exception();
            }
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock lk(m_);
                cv_work_.wait(lk, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
            }
            drain();
            {
                std::lock_guard lk(m_);
                if (--pending_ == 0) cv_done_.notify_all();
            }
        }
    }

    std::vector<std::thread> workers_;
    std::mutex m_;
    std::condition_variable cv_work_;
    std::condition_variable cv_done_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::vector<std::exception_ptr>* errors_ = nullptr;
    std::size_t count_ = 0;
    std::atomic<std::size_t> cursor_{0};
    std::size_t pending_ = 0;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

struct ResolvedParams {
    double lambda = 0.0;
    double mu = 0.0;  // MinNormCor32 only
    unsigned threads = 1;
};

double default_lambda(double alpha) { return std::isfinite(alpha) ? alpha : 1.0; }

ResolvedParams resolve_params(const ProblemInstance& prob, const SolverParams& params) {
    ResolvedParams rp;
    const double alpha =
        family_modulus(std::span<const IsmOperator>(prob.ism_ops.data(), prob.ism_ops.size()));
    if (params.variant == Variant::MinNormCor32) {
        if (params.lambda) {
            throw std::invalid_argument(
                "minnorm sets lambda = 2*mu; pass mu instead of lambda");
        }
        rp.mu = params.mu ? *params.mu : (std::isfinite(alpha) ? alpha / 2.0 : 0.5);
        if (!(rp.mu > 0.0) || !(rp.mu < alpha)) {
            throw std::invalid_argument("mu out of (0, alpha): mu=" + std::to_string(rp.mu) +
                                        ", alpha=" + std::to_string(alpha));
        }
        rp.lambda = 2.0 * rp.mu;
    } else {
        rp.lambda = params.lambda ? *params.lambda : default_lambda(alpha);
        if (!(rp.lambda > 0.0) || !(rp.lambda < 2.0 * alpha)) {
            throw std::invalid_argument(
                "lambda out of (0, 2*alpha): lambda=" + std::to_string(rp.lambda) +
                ", 2*alpha=" + std::to_string(2.0 * alpha));
        }
    }
    rp.threads = params.threads != 0
                     ? params.threads
                     : std::max(1u, std::thread::hardware_concurrency());
    return rp;
}

struct StageOutputs {
    std::vector<Vector> z, u, y;
    std::optional<std::size_t> l_n, k_n, i_n;
    Vector z_bar, u_bar, y_bar;
    double minnorm_max_residual = 0.0;
    double seconds = 0.0;
};

class StageTimer {
public:
    explicit StageTimer(double& acc) : acc_(acc), t0_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        acc_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    double& acc_;
    std::chrono::steady_clock::time_point t0_;
};

StageOutputs run_stages(const Vector& x, std::size_t n, const ProblemInstance& prob,
                        const SolverParams& params, const ResolvedParams& rp,
                        StagePool& pool) {
    StageOutputs out;

    if (params.variant == Variant::MinNormCor32) {
        out.u.resize(prob.ism_ops.size());
        {
            StageTimer t(out.seconds);
            pool.run(prob.ism_ops.size(),
                     [&](std::size_t k) { out.u[k] = apply_ism(prob.ism_ops[k], x); });
        }
        auto [idx, residual] = select_farthest(out.u, zeros(x.size()));
        out.k_n = idx;
        out.minnorm_max_residual = norm(residual);
        out.z_bar = x;
        // The equivalent relaxation point x - 2 mu A x; the C_n half-space is
        // built from the corollary's inner-product form, not from this.
        out.u_bar = sub(x, scaled(residual, 2.0 * rp.mu));
        out.y_bar = out.u_bar;
        return out;
    }

    const bool project_x_first = params.variant == Variant::SimplifiedAlg34 ||
                                 params.variant == Variant::FixedPointOnlyCor36;
    if (project_x_first) {
        out.z_bar = project(prob.feasible_set, x);
    } else if (!prob.bifunctions.empty()) {
        const double r_n = params.r_schedule.at(n);
        out.z.resize(prob.bifunctions.size());
        {
            StageTimer t(out.seconds);
            pool.run(prob.bifunctions.size(), [&](std::size_t l) {
                out.z[l] = resolvent(prob.bifunctions[l], prob.feasible_set, r_n, x,
                                     params.resolvent_cfg);
            });
        }
        auto [idx, far] = select_farthest(out.z, x);
        out.l_n = idx;
        out.z_bar = std::move(far);
    } else {
        out.z_bar = x;
    }

    if (!prob.ism_ops.empty()) {
        out.u.resize(prob.ism_ops.size());
        {
            StageTimer t(out.seconds);
            pool.run(prob.ism_ops.size(), [&](std::size_t k) {
                const Vector step =
                    sub(out.z_bar, scaled(apply_ism(prob.ism_ops[k], out.z_bar), rp.lambda));
                out.u[k] = project(prob.feasible_set, step);
            });
        }
        auto [idx, far] = select_farthest(out.u, x);
        out.k_n = idx;
        out.u_bar = std::move(far);
    } else {
        out.u_bar = out.z_bar;
    }

    if (!prob.maps.empty()) {
        const double alpha_n = params.alpha_schedule.at(n);
        out.y.resize(prob.maps.size());
        {
            StageTimer t(out.seconds);
            pool.run(prob.maps.size(), [&](std::size_t i) {
                out.y[i] = lin_comb(alpha_n, out.u_bar, 1.0 - alpha_n,
                                    apply_nonexpansive(prob.maps[i], out.u_bar));
            });
        }
        auto [idx, far] = select_farthest(out.y, x);
        out.i_n = idx;
        out.y_bar = std::move(far);
    } else {
        out.y_bar = out.u_bar;
    }
    return out;
}

HalfSpaceList build_halfspaces(const Vector& x, const Vector& x0, const StageOutputs& sg,
                               const SolverParams& params, const ResolvedParams& rp) {
    switch (params.variant) {
        case Variant::MainHybrid:
            return {bisector_halfspace(sg.y_bar, sg.z_bar), bisector_halfspace(sg.z_bar, x),
                    monotonicity_halfspace(x0, x)};
        case Variant::SimplifiedAlg34:
        case Variant::FixedPointOnlyCor36:
            return {bisector_halfspace(sg.y_bar, x), monotonicity_halfspace(x0, x)};
        case Variant::MinNormCor32: {
            const Vector& g = sg.u.at(*sg.k_n);
            const HalfSpace cn{g, inner(sub(x, scaled(g, rp.mu)), g)};
            return {cn, monotonicity_halfspace(x0, x)};
        }
    }
    throw std::logic_error("unknown variant");
}

IterationState complete_step(const IterationState& state, StageOutputs sg,
                             const ProblemInstance& prob, const SolverParams& params,
                             const ResolvedParams& rp) {
    IterationState next;
    next.n = state.n + 1;
    next.halfspaces = build_halfspaces(state.x, prob.x0, sg, params, rp);

    KktSolution kkt;
    if (params.variant == Variant::MainHybrid) {
        kkt = project_intersection(prob.x0, next.halfspaces);
    } else {
        kkt = project_two(prob.x0, next.halfspaces[0], next.halfspaces[1]);
    }
    next.x = kkt.point;
    next.last_projection = std::move(kkt);
    next.z_candidates = std::move(sg.z);
    next.u_candidates = std::move(sg.u);
    next.y_candidates = std::move(sg.y);
    next.l_n = sg.l_n;
    next.k_n = sg.k_n;
    next.i_n = sg.i_n;
    next.z_bar = std::move(sg.z_bar);
    next.u_bar = std::move(sg.u_bar);
    next.y_bar = std::move(sg.y_bar);
    return next;
}

IterationState full_step(const IterationState& state, const ProblemInstance& prob,
                         const SolverParams& params, Variant expected) {
    if (params.variant != expected) {
        throw std::invalid_argument("step function called with mismatched variant");
    }
    validate_params(prob, params);
    const ResolvedParams rp = resolve_params(prob, params);
    StagePool pool(rp.threads);
    StageOutputs sg = run_stages(state.x, state.n, prob, params, rp, pool);
    return complete_step(state, std::move(sg), prob, params, rp);
}

}  // namespace

double Schedule::at(std::size_t n) const {
    return std::visit(overloaded{
                          [](const ConstantSchedule& s) { return s.value; },
                          [&](const HarmonicDecaySchedule& s) {
                              return s.scale / static_cast<double>(n + 1);
                          },
                      },
                      rule);
}

double Schedule::limsup() const {
    return std::visit(overloaded{
                          [](const ConstantSchedule& s) { return s.value; },
                          [](const HarmonicDecaySchedule&) { return 0.0; },
                      },
                      rule);
}

double Schedule::min_value() const {
    return std::visit(overloaded{
                          [](const ConstantSchedule& s) { return s.value; },
                          [](const HarmonicDecaySchedule&) { return 0.0; },
                      },
                      rule);
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::MainHybrid: return "main";
        case Variant::SimplifiedAlg34: return "alg34";
        case Variant::MinNormCor32: return "minnorm";
        case Variant::FixedPointOnlyCor36: return "fixedpoint";
    }
    return "unknown";
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::StoppedAtFixedPoint: return "StoppedAtFixedPoint";
        case SolveStatus::NumericalBreakdown: return "NumericalBreakdown";
    }
    return "unknown";
}

std::pair<std::size_t, Vector> select_farthest(const std::vector<Vector>& candidates,
                                               const Vector& x) {
    if (candidates.empty()) throw std::invalid_argument("select_farthest: empty candidates");
    std::size_t best = 0;
    double best_dist = dist(candidates[0], x);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double d = dist(candidates[i], x);
        if (d > best_dist) {  // ties keep the lowest index
            best_dist = d;
            best = i;
        }
    }
    return {best, candidates[best]};
}

void validate_problem(const ProblemInstance& prob, std::uint64_t seed) {
    if (prob.dim == 0) throw std::invalid_argument("problem: dim must be >= 1");
    validate_set(prob.feasible_set);
    if (set_dim(prob.feasible_set) != prob.dim) {
        throw std::invalid_argument("problem: feasible_set dimension mismatch");
    }
    if (prob.x0.size() != prob.dim) throw std::invalid_argument("problem: x0 dimension mismatch");
    ensure_finite(prob.x0, "x0");
    if (prob.bifunctions.empty() && prob.ism_ops.empty() && prob.maps.empty()) {
        throw std::invalid_argument("problem: at least one family must be nonempty");
    }
    for (const auto& f : prob.bifunctions) {
        if (bifunction_dim(f) != prob.dim) {
            throw std::invalid_argument("problem: bifunction dimension mismatch");
        }
    }
    for (const auto& a : prob.ism_ops) {
        if (ism_dim(a) != prob.dim) {
            throw std::invalid_argument("problem: ism operator dimension mismatch");
        }
    }
    for (const auto& s : prob.maps) {
        if (map_dim(s) != prob.dim) {
            throw std::invalid_argument("problem: nonexpansive map dimension mismatch");
        }
    }
    if (!prob.solution_witness) return;

    const Vector& u = *prob.solution_witness;
    if (u.size() != prob.dim) throw std::invalid_argument("witness: dimension mismatch");
    ensure_finite(u, "witness");
    if (!contains(prob.feasible_set, u, 1e-8).inside) {
        throw std::invalid_argument("witness: not contained in the feasible set");
    }
    for (std::size_t i = 0; i < prob.maps.size(); ++i) {
        if (dist(apply_nonexpansive(prob.maps[i], u), u) > 1e-8) {
            throw std::invalid_argument("witness: not a fixed point of map " +
                                        std::to_string(i));
        }
    }
    const double alpha = family_modulus(
        std::span<const IsmOperator>(prob.ism_ops.data(), prob.ism_ops.size()));
    const double lambda_check = std::isfinite(alpha) ? std::min(1.0, alpha) : 1.0;
    for (std::size_t k = 0; k < prob.ism_ops.size(); ++k) {
        const Vector step = sub(u, scaled(apply_ism(prob.ism_ops[k], u), lambda_check));
        if (dist(project(prob.feasible_set, step), u) > 1e-8) {
            throw std::invalid_argument("witness: not a variational-inequality solution of operator " +
                                        std::to_string(k));
        }
    }
    for (std::size_t l = 0; l < prob.bifunctions.size(); ++l) {
        Rng rng(seed + l);
        const double scale = 2.0 * (1.0 + norm(u));
        for (int s = 0; s < 64; ++s) {
            const Vector y = sample_point(prob.feasible_set, rng, scale);
            if (bifunction_value(prob.bifunctions[l], u, y) < -1e-8) {
                throw std::invalid_argument("witness: equilibrium inequality fails for bifunction " +
                                            std::to_string(l));
            }
        }
    }
}

void validate_params(const ProblemInstance& prob, const SolverParams& params) {
    if (!(params.stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");
    if (params.max_iter == 0) throw std::invalid_argument("max_iter must be >= 1");
    if (params.trace_every == 0) throw std::invalid_argument("trace_every must be >= 1");
    if (!(params.d > 0.0)) throw std::invalid_argument("d must be positive");
    if (!(params.resolvent_cfg.inner_tol > 0.0) || params.resolvent_cfg.inner_max_iter < 1 ||
        !(params.resolvent_cfg.step_fraction > 0.0) ||
        !(params.resolvent_cfg.step_fraction < 1.0)) {
        throw std::invalid_argument("resolvent config out of range");
    }

    const double a_lim = params.alpha_schedule.limsup();
    if (!(a_lim < 1.0)) {
        throw std::invalid_argument("alpha schedule: limsup must be strictly below 1");
    }
    const bool alpha_range_ok = std::visit(
        overloaded{
            [](const ConstantSchedule& s) { return s.value >= 0.0 && s.value < 1.0; },
            [](const HarmonicDecaySchedule& s) { return s.scale >= 0.0 && s.scale <= 1.0; },
        },
        params.alpha_schedule.rule);
    if (!alpha_range_ok) throw std::invalid_argument("alpha schedule: values must stay in [0,1]");
    if (params.r_schedule.min_value() < params.d) {
        throw std::invalid_argument("r schedule must stay >= d > 0");
    }

    switch (params.variant) {
        case Variant::MainHybrid:
            break;
        case Variant::SimplifiedAlg34:
            if (!prob.bifunctions.empty()) {
                throw std::invalid_argument("alg34 requires no bifunctions (K = 0)");
            }
            break;
        case Variant::FixedPointOnlyCor36:
            if (!prob.bifunctions.empty() || !prob.ism_ops.empty()) {
                throw std::invalid_argument("fixedpoint requires K = 0 and M = 0");
            }
            break;
        case Variant::MinNormCor32:
            if (!is_whole_space(prob.feasible_set)) {
                throw std::invalid_argument("minnorm requires the whole space as feasible set");
            }
            if (!prob.maps.empty() || !prob.bifunctions.empty()) {
                throw std::invalid_argument("minnorm requires empty map and bifunction families");
            }
            if (prob.ism_ops.empty()) {
                throw std::invalid_argument("minnorm requires at least one operator");
            }
            break;
    }
    resolve_params(prob, params);  // lambda / mu range checks
}

IterationState make_initial_state(const ProblemInstance& prob) {
    IterationState st;
    st.n = 0;
    st.x = prob.x0;
    st.z_bar = prob.x0;
    st.u_bar = prob.x0;
    st.y_bar = prob.x0;
    return st;
}

IterationState hybrid_step(const IterationState& state, const ProblemInstance& prob,
                           const SolverParams& params) {
    return full_step(state, prob, params, Variant::MainHybrid);
}

IterationState simplified_step_alg34(const IterationState& state, const ProblemInstance& prob,
                                     const SolverParams& params) {
    return full_step(state, prob, params, Variant::SimplifiedAlg34);
}

IterationState min_norm_step_cor32(const IterationState& state, const ProblemInstance& prob,
                                   const SolverParams& params) {
    return full_step(state, prob, params, Variant::MinNormCor32);
}

IterationState fixed_point_step_cor36(const IterationState& state, const ProblemInstance& prob,
                                      const SolverParams& params) {
    return full_step(state, prob, params, Variant::FixedPointOnlyCor36);
}

std::vector<MonitorViolation> monitor_invariants(const IterationState& before,
                                                 const IterationState& after,
                                                 const ProblemInstance& prob,
                                                 const Vector& x0) {
    std::vector<MonitorViolation> out;
    if (!prob.solution_witness) return out;
    const Vector& u = *prob.solution_witness;

    for (std::size_t j = 0; j < after.halfspaces.size(); ++j) {
        const auto& h = after.halfspaces[j];
        const double n = norm(h.normal);
        if (n == 0.0) continue;
        const double slack = (inner(h.normal, u) - h.offset) / n;
        if (slack > 1e-8) {
            out.push_back({before.n, "witness outside half-space " + std::to_string(j), slack});
        }
    }

    const double dy = dist(u, after.y_bar);
    const double dz = dist(u, after.z_bar);
    const double dx = dist(u, before.x);
    if (dy > dz + 1e-8) {
        out.push_back({before.n, "chain ||u-y|| <= ||u-z|| violated", dy - dz});
    }
    if (dz > dx + 1e-8) {
        out.push_back({before.n, "chain ||u-z|| <= ||u-x|| violated", dz - dx});
    }

    const double fejer_before = dist(before.x, x0);
    const double fejer_after = dist(after.x, x0);
    if (fejer_after < fejer_before - 1e-10) {
        out.push_back({before.n, "anchor distance decreased", fejer_before - fejer_after});
    }
    return out;
}

SolveResult solve(const ProblemInstance& prob, const SolverParams& params) {
    validate_params(prob, params);
    const ResolvedParams rp = resolve_params(prob, params);

    SolveResult res;
    IterationState st = make_initial_state(prob);
    StagePool pool(rp.threads);
    const bool whole_c = is_whole_space(prob.feasible_set);

    const auto make_record = [&](const IterationState& cur, const Vector& z_bar,
                                 const Vector& u_bar, double step_norm, double stage_res,
                                 double seconds) {
        TraceRecord rec;
        rec.n = cur.n;
        rec.step_norm = step_norm;
        rec.stage_residual = stage_res;
        rec.z_residual = dist(cur.x, z_bar);
        rec.zu_gap = dist(z_bar, u_bar);
        rec.fejer = dist(cur.x, prob.x0);
        rec.stage_seconds = seconds;
        if (prob.solution_witness) {
            rec.witness_distance = dist(cur.x, *prob.solution_witness);
        }
        if (!whole_c) {
            rec.c_slack = contains(prob.feasible_set, cur.x, 0.0).violation;
        }
        return rec;
    };

    for (;;) {
        if (st.n >= params.max_iter) {
            res.status = SolveStatus::MaxIterations;
            res.final_point = st.x;
            res.iterations = st.n;
            return res;
        }

        StageOutputs sg;
        try {
            sg = run_stages(st.x, st.n, prob, params, rp, pool);
        } catch (const ResolventFailure& e) {
            res.status = SolveStatus::NumericalBreakdown;
            res.final_point = st.x;
            res.iterations = st.n;
            res.diagnostic = e.what();
            return res;
        }

        const double stage_res = dist(st.x, sg.y_bar);
        const bool minnorm = params.variant == Variant::MinNormCor32;
        const double stop_metric = minnorm ? sg.minnorm_max_residual : stage_res;
        const bool step6_applies =
            minnorm || params.variant == Variant::SimplifiedAlg34 ||
            params.variant == Variant::FixedPointOnlyCor36 || st.n == 0;

        if (step6_applies && stop_metric <= params.stop_tol) {
            res.status = (minnorm && st.n > 0) ? SolveStatus::Converged
                                               : SolveStatus::StoppedAtFixedPoint;
            res.final_point = st.x;
            res.iterations = st.n + 1;
            if (st.n % params.trace_every == 0) {
                res.trace.push_back(
                    make_record(st, sg.z_bar, sg.u_bar, 0.0, stage_res, sg.seconds));
            }
            return res;
        }

        const double stage_seconds = sg.seconds;
        IterationState next;
        try {
            next = complete_step(st, std::move(sg), prob, params, rp);
        } catch (const InfeasibleIntersection& e) {
            res.status = SolveStatus::NumericalBreakdown;
            res.final_point = st.x;
            res.iterations = st.n;
            res.diagnostic = e.what();
            return res;
        }

        const double step_norm = dist(next.x, st.x);
        if (prob.solution_witness) {
            auto v = monitor_invariants(st, next, prob, prob.x0);
            res.monitor_violations.insert(res.monitor_violations.end(), v.begin(), v.end());
        }
        if (st.n % params.trace_every == 0) {
            TraceRecord rec =
                make_record(st, next.z_bar, next.u_bar, step_norm, stage_res, stage_seconds);
            if (prob.solution_witness) {
                double worst = 0.0;
                for (const auto& h : next.halfspaces) {
                    const double n = norm(h.normal);
                    if (n == 0.0) continue;
                    worst = std::max(
                        worst, (inner(h.normal, *prob.solution_witness) - h.offset) / n);
                }
                rec.witness_slack = worst;
            }
            res.trace.push_back(rec);
        }

        if (!minnorm && step_norm <= params.stop_tol && stage_res <= params.stop_tol) {
            res.status = SolveStatus::Converged;
            res.final_point = next.x;
            res.iterations = next.n;
            return res;
        }
        st = std::move(next);
    }
}

}  // namespace parhyb
