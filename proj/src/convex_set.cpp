#include "parhyb/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parhyb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const ConvexSet& set, const Vector& x, const char* where) {
    if (set_dim(set) != x.size()) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch");
    }
}

}  // namespace

std::size_t set_dim(const ConvexSet& set) {
    return std::visit(
        overloaded{
            [](const Box& b) { return b.lower.size(); },
            [](const Ball& b) { return b.center.size(); },
            [](const HalfSpace& h) { return h.normal.size(); },
            [](const WholeSpace& w) { return w.dim; },
            [](const AffineSubspace& a) { return a.basepoint.size(); },
        },
        set);
}

bool halfspace_is_whole(const HalfSpace& h) {
    return norm_sq(h.normal) == 0.0 && h.offset >= 0.0;
}

bool is_whole_space(const ConvexSet& set) {
    if (std::holds_alternative<WholeSpace>(set)) return true;
    if (const auto* h = std::get_if<HalfSpace>(&set)) return halfspace_is_whole(*h);
    return false;
}

void validate_set(const ConvexSet& set) {
    std::visit(
        overloaded{
            [](const Box& b) {
                ensure_same_dim(b.lower, b.upper, "Box");
                ensure_finite(b.lower, "Box.lower");
                ensure_finite(b.upper, "Box.upper");
                for (std::size_t i = 0; i < b.lower.size(); ++i) {
                    if (b.lower[i] > b.upper[i]) {
                        throw std::invalid_argument("Box: lower > upper at coordinate " +
                                                    std::to_string(i));
                    }
                }
                if (b.lower.empty()) throw std::invalid_argument("Box: empty dimension");
            },
            [](const Ball& b) {
                ensure_finite(b.center, "Ball.center");
                if (!(b.radius > 0.0) || !std::isfinite(b.radius)) {
                    throw std::invalid_argument("Ball: radius must be positive");
                }
                if (b.center.empty()) throw std::invalid_argument("Ball: empty dimension");
            },
            [](const HalfSpace& h) {
                ensure_finite(h.normal, "HalfSpace.normal");
                if (!std::isfinite(h.offset)) {
                    throw std::invalid_argument("HalfSpace: non-finite offset");
                }
                if (norm_sq(h.normal) == 0.0 && h.offset < 0.0) {
                    throw std::invalid_argument("HalfSpace: zero normal with negative offset is empty");
                }
                if (h.normal.empty()) throw std::invalid_argument("HalfSpace: empty dimension");
            },
            [](const WholeSpace& w) {
                if (w.dim == 0) throw std::invalid_argument("WholeSpace: dim must be >= 1");
            },
            [](const AffineSubspace& a) {
                ensure_finite(a.basepoint, "AffineSubspace.basepoint");
                if (a.basepoint.empty()) {
                    throw std::invalid_argument("AffineSubspace: empty dimension");
                }
                for (const auto& d : a.directions) {
                    ensure_same_dim(a.basepoint, d, "AffineSubspace");
                    ensure_finite(d, "AffineSubspace.direction");
                }
                for (std::size_t i = 0; i < a.directions.size(); ++i) {
                    for (std::size_t j = i; j < a.directions.size(); ++j) {
                        const double g = inner(a.directions[i], a.directions[j]);
                        const double want = (i == j) ? 1.0 : 0.0;
                        if (std::abs(g - want) > 1e-10) {
                            throw std::invalid_argument(
                                "AffineSubspace: directions not orthonormal");
                        }
                    }
                }
            },
        },
        set);
}

Vector project(const ConvexSet& set, const Vector& x) {
    check_dim(set, x, "project");
    return std::visit(
        overloaded{
            [&](const Box& b) {
                Vector p(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    p[i] = std::min(std::max(x[i], b.lower[i]), b.upper[i]);
                }
                return p;
            },
            [&](const Ball& b) {
                const Vector d = sub(x, b.center);
                const double n = norm(d);
                if (n <= b.radius) return x;
                return add(b.center, scaled(d, b.radius / n));
            },
            [&](const HalfSpace& h) {
                const double nn = norm_sq(h.normal);
                if (nn == 0.0) return x;  // whole-space degenerate
                const double viol = inner(h.normal, x) - h.offset;
                if (viol <= 0.0) return x;
                return sub(x, scaled(h.normal, viol / nn));
            },
            [&](const WholeSpace&) { return x; },
            [&](const AffineSubspace& a) {
                const Vector d = sub(x, a.basepoint);
                Vector p = a.basepoint;
                for (const auto& dir : a.directions) {
                    const double c = inner(d, dir);
                    for (std::size_t i = 0; i < p.size(); ++i) p[i] += c * dir[i];
                }
                return p;
            },
        },
        set);
}

ContainmentVerdict contains(const ConvexSet& set, const Vector& x, double tol) {
    check_dim(set, x, "contains");
    if (tol < 0.0) throw std::invalid_argument("contains: tol must be >= 0");
    const double violation = std::visit(
        overloaded{
            [&](const Box& b) {
                double v = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    v = std::max(v, b.lower[i] - x[i]);
                    v = std::max(v, x[i] - b.upper[i]);
                }
                return v;
            },
            [&](const Ball& b) { return std::max(0.0, dist(x, b.center) - b.radius); },
            [&](const HalfSpace& h) {
                const double n = norm(h.normal);
                if (n == 0.0) return 0.0;
                return std::max(0.0, (inner(h.normal, x) - h.offset) / n);
            },
            [&](const WholeSpace&) { return 0.0; },
            [&](const AffineSubspace& a) {
                ConvexSet s = a;
                return dist(x, project(s, x));
            },
        },
        set);
    return {violation <= tol, violation};
}

Vector sample_point(const ConvexSet& set, Rng& rng, double scale) {
    return project(set, rng.gaussian_vector(set_dim(set), scale));
}

}  // namespace parhyb
