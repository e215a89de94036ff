#include "parhyb/halfspace.hpp"

#include <algorithm>
#include <cmath>

namespace parhyb {

namespace {

constexpr double kFeasTol = 1e-10;
constexpr double kMultiplierTol = -1e-12;

struct UnitHalfSpace {
    Vector normal;        // unit length
    double offset = 0.0;  // scaled accordingly
    double scale = 1.0;   // original ||normal||
    std::size_t index = 0;
};

// Drop whole-space degenerates and rescale to unit normals so the Gram
// systems stay conditioned when bisector normals shrink near convergence.
std::vector<UnitHalfSpace> normalize_list(const HalfSpaceList& hs) {
    std::vector<UnitHalfSpace> out;
    out.reserve(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double n = norm(hs[i].normal);
        if (n == 0.0) {
            if (hs[i].offset < 0.0) {
                throw InfeasibleIntersection("half-space " + std::to_string(i) +
                                             " has zero normal and negative offset");
            }
            continue;
        }
        out.push_back({scaled(hs[i].normal, 1.0 / n), hs[i].offset / n, n, i});
    }
    return out;
}

double unit_violation(const UnitHalfSpace& h, const Vector& v) {
    return inner(h.normal, v) - h.offset;
}

bool all_feasible(const std::vector<UnitHalfSpace>& items, const Vector& v) {
    for (const auto& h : items) {
        if (unit_violation(h, v) > kFeasTol) return false;
    }
    return true;
}

// Candidate for one active subset: solve the Gram system G l = s and check
// multipliers and feasibility.
std::optional<KktSolution> try_subset(const Vector& x0,
                                      const std::vector<UnitHalfSpace>& items,
                                      const std::vector<std::size_t>& subset) {
    const std::size_t m = subset.size();
    if (m == 0) {
        if (all_feasible(items, x0)) return KktSolution{x0, {}, {}};
        return std::nullopt;
    }
    Matrix gram(m, m);
    Vector rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto& hj = items[subset[j]];
        for (std::size_t k = 0; k < m; ++k) {
            gram(j, k) = inner(hj.normal, items[subset[k]].normal);
        }
        rhs[j] = inner(hj.normal, x0) - hj.offset;
    }
    const auto lambda = solve_small({gram, rhs});
    if (!lambda) return std::nullopt;  // dependent normals: another subset covers

    Vector point = x0;
    for (std::size_t j = 0; j < m; ++j) {
        if ((*lambda)[j] < kMultiplierTol) return std::nullopt;
        for (std::size_t i = 0; i < point.size(); ++i) {
            point[i] -= (*lambda)[j] * items[subset[j]].normal[i];
        }
    }
    if (!all_feasible(items, point)) return std::nullopt;

    KktSolution sol;
    sol.point = std::move(point);
    sol.multipliers.reserve(m);
    sol.active_set.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        // Report against the original (unscaled) normal.
        sol.multipliers.push_back(std::max(0.0, (*lambda)[j]) / items[subset[j]].scale);
        sol.active_set.push_back(items[subset[j]].index);
    }
    return sol;
}

void enumerate_subsets(std::size_t count, std::size_t size, std::size_t first,
                       std::vector<std::size_t>& current,
                       std::vector<std::vector<std::size_t>>& out) {
    if (current.size() == size) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = first; i < count; ++i) {
        current.push_back(i);
        enumerate_subsets(count, size, i + 1, current, out);
        current.pop_back();
    }
}

}  // namespace

HalfSpace bisector_halfspace(const Vector& near, const Vector& far) {
    ensure_same_dim(near, far, "bisector_halfspace");
    const Vector normal = sub(far, near);
    const Vector mid = lin_comb(0.5, near, 0.5, far);
    return {normal, inner(mid, normal)};
}

HalfSpace monotonicity_halfspace(const Vector& x0, const Vector& xn) {
    ensure_same_dim(x0, xn, "monotonicity_halfspace");
    const Vector normal = sub(x0, xn);
    return {normal, inner(xn, normal)};
}

KktSolution project_intersection(const Vector& x0, const HalfSpaceList& hs) {
    for (const auto& h : hs) ensure_same_dim(x0, h.normal, "project_intersection");
    const auto items = normalize_list(hs);
    if (items.empty()) return {x0, {}, {}};

    std::vector<std::vector<std::size_t>> subsets;
    std::vector<std::size_t> scratch;
    for (std::size_t size = 0; size <= items.size(); ++size) {
        enumerate_subsets(items.size(), size, 0, scratch, subsets);
    }
    for (const auto& subset : subsets) {
        if (auto sol = try_subset(x0, items, subset)) return *sol;
    }
    throw InfeasibleIntersection("no active subset certifies: intersection empty or numerics broke down");
}

KktSolution project_two(const Vector& x0, const HalfSpace& cn, const HalfSpace& qn) {
    ensure_same_dim(x0, cn.normal, "project_two");
    ensure_same_dim(x0, qn.normal, "project_two");
    const HalfSpaceList both{cn, qn};

    const double cn_nsq = norm_sq(cn.normal);
    const double qn_nsq = norm_sq(qn.normal);
    if (cn_nsq == 0.0 || qn_nsq == 0.0) return project_intersection(x0, both);

    const double cn_scale = std::sqrt(cn_nsq);
    const double qn_scale = std::sqrt(qn_nsq);
    const double cn_viol = inner(cn.normal, x0) - cn.offset;
    const double qn_viol = inner(qn.normal, x0) - qn.offset;

    if (cn_viol / cn_scale <= kFeasTol && qn_viol / qn_scale <= kFeasTol) {
        return {x0, {}, {}};
    }

    // Single-constraint projection x0 - (<a,x0> - b)/||a||^2 a, kept when it
    // lands in the other half-space.
    if (cn_viol > 0.0) {
        const Vector p = sub(x0, scaled(cn.normal, cn_viol / cn_nsq));
        if ((inner(qn.normal, p) - qn.offset) / qn_scale <= kFeasTol) {
            return {p, {cn_viol / cn_nsq}, {0}};
        }
    }
    if (qn_viol > 0.0) {
        const Vector p = sub(x0, scaled(qn.normal, qn_viol / qn_nsq));
        if ((inner(cn.normal, p) - cn.offset) / cn_scale <= kFeasTol) {
            return {p, {qn_viol / qn_nsq}, {1}};
        }
    }

    // Both constraints active: the two-multiplier system
    //   l1 ||a1||^2 + l2 <a1,a2> = <a1,x0> - b1
    //   l1 <a1,a2> + l2 ||a2||^2 = <a2,x0> - b2,
    // solved on unit-normal copies for conditioning.
    Matrix gram(2, 2);
    gram(0, 0) = 1.0;
    gram(1, 1) = 1.0;
    gram(0, 1) = gram(1, 0) = inner(cn.normal, qn.normal) / (cn_scale * qn_scale);
    const Vector rhs{cn_viol / cn_scale, qn_viol / qn_scale};
    const auto lambda = solve_small({gram, rhs});
    if (lambda && (*lambda)[0] >= kMultiplierTol && (*lambda)[1] >= kMultiplierTol) {
        Vector point = x0;
        for (std::size_t i = 0; i < point.size(); ++i) {
            point[i] -= (*lambda)[0] / cn_scale * cn.normal[i] +
                        (*lambda)[1] / qn_scale * qn.normal[i];
        }
        const bool feasible =
            (inner(cn.normal, point) - cn.offset) / cn_scale <= kFeasTol &&
            (inner(qn.normal, point) - qn.offset) / qn_scale <= kFeasTol;
        if (feasible) {
            return {point,
                    {std::max(0.0, (*lambda)[0]) / cn_scale,
                     std::max(0.0, (*lambda)[1]) / qn_scale},
                    {0, 1}};
        }
    }
    // Parallel or otherwise degenerate normals: let the enumeration decide.
    return project_intersection(x0, both);
}

double kkt_max_error(const Vector& x0, const HalfSpaceList& hs, const KktSolution& sol) {
    Vector reconstructed = x0;
    double err = 0.0;
    for (std::size_t j = 0; j < sol.active_set.size(); ++j) {
        const auto& h = hs.at(sol.active_set[j]);
        for (std::size_t i = 0; i < reconstructed.size(); ++i) {
            reconstructed[i] -= sol.multipliers[j] * h.normal[i];
        }
        err = std::max(err, -sol.multipliers[j]);
    }
    err = std::max(err, dist(reconstructed, sol.point));
    for (const auto& h : hs) {
        const double n = norm(h.normal);
        if (n == 0.0) continue;
        err = std::max(err, (inner(h.normal, sol.point) - h.offset) / n);
    }
    return err;
}

}  // namespace parhyb
