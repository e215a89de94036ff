#include "parhyb/operators.hpp"

#include <algorithm>
#include <cmath>

#include "parhyb/rng.hpp"

namespace parhyb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kCertSeed = 0x5eed1234abcdULL;
constexpr int kCertPairs = 1000;

Matrix symmetric_part(const Matrix& m) {
    Matrix s(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

}  // namespace

std::pair<double, double> symmetric_eigen_range(const Matrix& s) {
    if (s.rows != s.cols) throw std::invalid_argument("symmetric_eigen_range: not square");
    const std::size_t n = s.rows;
    Matrix a = s;
    double frob = 0.0;
    for (double x : a.data) frob += x * x;
    frob = std::sqrt(frob);
    if (frob == 0.0) return {0.0, 0.0};

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-14 * frob) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    double lo = a(0, 0), hi = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, a(i, i));
        hi = std::max(hi, a(i, i));
    }
    return {lo, hi};
}

double spectral_norm(const Matrix& m) {
    Matrix mtm(m.cols, m.cols);
    for (std::size_t i = 0; i < m.cols; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m.rows; ++k) s += m(k, i) * m(k, j);
            mtm(i, j) = s;
        }
    }
    const auto [lo, hi] = symmetric_eigen_range(mtm);
    (void)lo;
    return std::sqrt(std::max(0.0, hi));
}

// ---------------------------------------------------------------------------
// Nonexpansive maps
// ---------------------------------------------------------------------------

std::size_t map_dim(const NonexpansiveMap& s) {
    return std::visit(overloaded{
                          [](const Identity& f) { return f.dim; },
                          [](const ProjectionOnto& f) { return set_dim(f.set); },
                          [](const PlaneRotation& f) { return f.dim; },
                          [](const AffineContraction& f) { return f.b.size(); },
                      },
                      s.form);
}

Vector apply_nonexpansive(const NonexpansiveMap& s, const Vector& x) {
    if (map_dim(s) != x.size()) {
        throw std::invalid_argument("apply_nonexpansive: dimension mismatch");
    }
    return std::visit(
        overloaded{
            [&](const Identity&) { return x; },
            [&](const ProjectionOnto& f) { return project(f.set, x); },
            [&](const PlaneRotation& f) {
                Vector y = x;
                const double c = std::cos(f.angle), sn = std::sin(f.angle);
                y[f.axis_i] = c * x[f.axis_i] - sn * x[f.axis_j];
                y[f.axis_j] = sn * x[f.axis_i] + c * x[f.axis_j];
                return y;
            },
            [&](const AffineContraction& f) { return add(matvec(f.m, x), f.b); },
        },
        s.form);
}

NonexpansiveMap make_nonexpansive(
    std::variant<Identity, ProjectionOnto, PlaneRotation, AffineContraction> form,
    std::optional<Vector> fixed_point_witness) {
    std::visit(overloaded{
                   [](const Identity& f) {
                       if (f.dim == 0) throw std::invalid_argument("Identity: dim >= 1");
                   },
                   [](const ProjectionOnto& f) { validate_set(f.set); },
                   [](const PlaneRotation& f) {
                       if (f.dim < 2 || f.axis_i >= f.dim || f.axis_j >= f.dim ||
                           f.axis_i == f.axis_j || !std::isfinite(f.angle)) {
                           throw std::invalid_argument("PlaneRotation: bad parameters");
                       }
                   },
                   [](const AffineContraction& f) {
                       if (f.m.rows != f.m.cols || f.m.rows != f.b.size()) {
                           throw std::invalid_argument("AffineContraction: shape mismatch");
                       }
                       ensure_finite(f.b, "AffineContraction.b");
                       const double nrm = spectral_norm(f.m);
                       if (nrm > 1.0 + 1e-10) {
                           throw std::invalid_argument(
                               "AffineContraction: ||M|| = " + std::to_string(nrm) +
                               " exceeds 1");
                       }
                   },
               },
               form);

    NonexpansiveMap s{std::move(form), std::nullopt};
    const std::size_t d = map_dim(s);

    Rng rng(kCertSeed);
    for (int i = 0; i < kCertPairs; ++i) {
        const Vector x = rng.gaussian_vector(d, 2.0);
        const Vector y = rng.gaussian_vector(d, 2.0);
        const double lhs = dist(apply_nonexpansive(s, x), apply_nonexpansive(s, y));
        if (lhs > dist(x, y) + 1e-9) {
            throw std::invalid_argument("nonexpansiveness certificate failed (pair " +
                                        std::to_string(i) + ")");
        }
    }

    if (fixed_point_witness) {
        ensure_same_dim(*fixed_point_witness, Vector(d), "fixed_point_witness");
        if (dist(apply_nonexpansive(s, *fixed_point_witness), *fixed_point_witness) > 1e-8) {
            throw std::invalid_argument("fixed_point_witness is not fixed");
        }
        s.fixed_point_witness = std::move(fixed_point_witness);
    }
    return s;
}

// ---------------------------------------------------------------------------
// ism operators
// ---------------------------------------------------------------------------

std::size_t ism_dim(const IsmOperator& a) {
    return std::visit(overloaded{
                          [](const AffineMonotone& f) { return f.b.size(); },
                          [](const ResidualOfNonexpansive& f) { return map_dim(f.map); },
                          [](const ZeroOperator& f) { return f.dim; },
                      },
                      a.form);
}

Vector apply_ism(const IsmOperator& a, const Vector& x) {
    if (ism_dim(a) != x.size()) {
        throw std::invalid_argument("apply_ism: dimension mismatch");
    }
    return std::visit(overloaded{
                          [&](const AffineMonotone& f) { return sub(matvec(f.m, x), f.b); },
                          [&](const ResidualOfNonexpansive& f) {
                              return sub(x, apply_nonexpansive(f.map, x));
                          },
                          [&](const ZeroOperator&) { return zeros(x.size()); },
                      },
                      a.form);
}

double ism_modulus(const IsmOperator& a) { return a.modulus; }

double family_modulus(std::span<const IsmOperator> family) {
    double alpha = std::numeric_limits<double>::infinity();
    for (const auto& a : family) alpha = std::min(alpha, a.modulus);
    return alpha;
}

namespace {

void certify_ism_pairs(const IsmOperator& a) {
    Rng rng(kCertSeed + 1);
    const std::size_t d = ism_dim(a);
    for (int i = 0; i < kCertPairs; ++i) {
        const Vector x = rng.gaussian_vector(d, 2.0);
        const Vector y = rng.gaussian_vector(d, 2.0);
        const Vector ax = apply_ism(a, x), ay = apply_ism(a, y);
        const double lhs = inner(sub(ax, ay), sub(x, y));
        const double rhs = a.modulus * norm_sq(sub(ax, ay));
        if (std::isfinite(a.modulus) && lhs < rhs - 1e-8) {
            throw std::invalid_argument("ism certificate failed (pair " + std::to_string(i) +
                                        ")");
        }
    }
}

}  // namespace

IsmOperator make_affine_monotone(Matrix m, Vector b) {
    if (m.rows != m.cols || m.rows != b.size()) {
        throw std::invalid_argument("AffineMonotone: shape mismatch");
    }
    ensure_finite(b, "AffineMonotone.b");
    const auto [mn, mx] = symmetric_eigen_range(symmetric_part(m));
    (void)mx;
    if (mn <= 0.0) {
        throw std::invalid_argument(
            "AffineMonotone: symmetric part not positive definite (min eigenvalue " +
            std::to_string(mn) + "); no positive modulus certifiable");
    }
    const double lip = spectral_norm(m);
    IsmOperator a{AffineMonotone{std::move(m), std::move(b)}, mn / (lip * lip)};
    certify_ism_pairs(a);
    return a;
}

IsmOperator make_residual_of_nonexpansive(NonexpansiveMap map) {
    IsmOperator a{ResidualOfNonexpansive{std::move(map)}, 0.5};
    certify_ism_pairs(a);
    return a;
}

IsmOperator make_zero_operator(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("ZeroOperator: dim >= 1");
    return {ZeroOperator{dim}, std::numeric_limits<double>::infinity()};
}

// ---------------------------------------------------------------------------
// Bifunctions
// ---------------------------------------------------------------------------

std::size_t bifunction_dim(const Bifunction& f) {
    return std::visit(overloaded{
                          [](const ZeroBifunction& g) { return g.dim; },
                          [](const LinearMonotone& g) { return g.q.size(); },
                          [](const ConvexDifference& g) { return g.lin.size(); },
                      },
                      f.form);
}

double bifunction_value(const Bifunction& f, const Vector& x, const Vector& y) {
    ensure_same_dim(x, y, "bifunction_value");
    if (bifunction_dim(f) != x.size()) {
        throw std::invalid_argument("bifunction_value: dimension mismatch");
    }
    return std::visit(
        overloaded{
            [&](const ZeroBifunction&) { return 0.0; },
            [&](const LinearMonotone& g) {
                return inner(add(matvec(g.p, x), g.q), sub(y, x));
            },
            [&](const ConvexDifference& g) {
                const auto gval = [&](const Vector& z) {
                    return 0.5 * inner(matvec(g.quad, z), z) + inner(g.lin, z) + g.constant;
                };
                return gval(y) - gval(x);
            },
        },
        f.form);
}

namespace {

void certify_monotone_pairs(const Bifunction& f) {
    Rng rng(kCertSeed + 2);
    const std::size_t d = bifunction_dim(f);
    for (int i = 0; i < kCertPairs; ++i) {
        const Vector x = rng.gaussian_vector(d, 2.0);
        const Vector y = rng.gaussian_vector(d, 2.0);
        if (bifunction_value(f, x, y) + bifunction_value(f, y, x) > 1e-9) {
            throw std::invalid_argument("bifunction monotonicity certificate failed (pair " +
                                        std::to_string(i) + ")");
        }
    }
}

}  // namespace

Bifunction make_zero_bifunction(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("ZeroBifunction: dim >= 1");
    return {ZeroBifunction{dim}};
}

Bifunction make_linear_monotone(Matrix p, Vector q) {
    if (p.rows != p.cols || p.rows != q.size()) {
        throw std::invalid_argument("LinearMonotone: shape mismatch");
    }
    ensure_finite(q, "LinearMonotone.q");
    const auto [mn, mx] = symmetric_eigen_range(symmetric_part(p));
    (void)mx;
    if (mn < -1e-10) {
        throw std::invalid_argument("LinearMonotone: symmetric part not PSD (min eigenvalue " +
                                    std::to_string(mn) + ")");
    }
    Bifunction f{LinearMonotone{std::move(p), std::move(q)}};
    certify_monotone_pairs(f);
    return f;
}

Bifunction make_convex_difference(Matrix quad, Vector lin, double constant) {
    if (quad.rows != quad.cols || quad.rows != lin.size()) {
        throw std::invalid_argument("ConvexDifference: shape mismatch");
    }
    ensure_finite(lin, "ConvexDifference.lin");
    if (!std::isfinite(constant)) throw std::invalid_argument("ConvexDifference: constant");
    for (std::size_t i = 0; i < quad.rows; ++i) {
        for (std::size_t j = i + 1; j < quad.cols; ++j) {
            if (std::abs(quad(i, j) - quad(j, i)) > 1e-12 * std::max(1.0, quad.max_abs())) {
                throw std::invalid_argument("ConvexDifference: quad must be symmetric");
            }
        }
    }
    const auto [mn, mx] = symmetric_eigen_range(quad);
    (void)mx;
    if (mn < -1e-10) {
        throw std::invalid_argument("ConvexDifference: quad not PSD (min eigenvalue " +
                                    std::to_string(mn) + ")");
    }
    Bifunction f{ConvexDifference{std::move(quad), std::move(lin), constant}};
    certify_monotone_pairs(f);
    return f;
}

// ---------------------------------------------------------------------------
// Resolvent engine
// ---------------------------------------------------------------------------

namespace {

// T_r^f for the affine forms reduces to the variational inequality
//   find z in C with <Pz + q + (z - x)/r, y - z> >= 0 for all y in C,
// whose operator is (1/r)-strongly monotone. On the whole space this is the
// linear solve (I + rP) z = x - rq; on a proper set it is the projected
// fixed-point iteration z <- P_C(z - s (Pz + q + (z - x)/r)) with the step
// chosen from the operator-norm bound of P.
Vector resolve_affine_vi(const Matrix& p, const Vector& q, const ConvexSet& c, double r,
                         const Vector& x, const ResolventConfig& cfg, const Vector* start) {
    const std::size_t d = x.size();
    if (is_whole_space(c)) {
        Matrix a = Matrix::identity(d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) a(i, j) += r * p(i, j);
        const Vector rhs = sub(x, scaled(q, r));
        auto z = solve_dense(a, rhs);
        if (!z) {
            throw ResolventFailure("resolvent: singular regularized system", 0.0);
        }
        return *z;
    }

    const double s = cfg.step_fraction * 2.0 / (spectral_norm(p) + 2.0 / r);
    Vector z = start ? *start : x;
    z = project(c, z);
    double change = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.inner_max_iter; ++it) {
        Vector grad = add(matvec(p, z), q);
        for (std::size_t i = 0; i < d; ++i) grad[i] += (z[i] - x[i]) / r;
        Vector next = project(c, sub(z, scaled(grad, s)));
        change = dist(next, z);
        z = std::move(next);
        if (change <= cfg.inner_tol) return z;
    }
    throw ResolventFailure("resolvent: inner iteration did not converge (last change " +
                               std::to_string(change) + ")",
                           change);
}

}  // namespace

Vector resolvent(const Bifunction& f, const ConvexSet& c, double r, const Vector& x,
                 const ResolventConfig& cfg, const Vector* start) {
    if (!(r > 0.0)) throw std::invalid_argument("resolvent: r must be positive");
    if (bifunction_dim(f) != x.size() || set_dim(c) != x.size()) {
        throw std::invalid_argument("resolvent: dimension mismatch");
    }
    return std::visit(
        overloaded{
            [&](const ZeroBifunction&) { return project(c, x); },
            [&](const LinearMonotone& g) {
                return resolve_affine_vi(g.p, g.q, c, r, x, cfg, start);
            },
            [&](const ConvexDifference& g) {
                // Same variational inequality with the gradient of g.
                return resolve_affine_vi(g.quad, g.lin, c, r, x, cfg, start);
            },
        },
        f.form);
}

double resolvent_certificate(const Bifunction& f, const ConvexSet& c, double r,
                             const Vector& x, const Vector& z, std::uint64_t seed,
                             int samples) {
    Rng rng(seed);
    const double scale = 2.0 * (1.0 + norm(x));
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vector y = sample_point(c, rng, scale);
        const double lhs =
            bifunction_value(f, z, y) + (1.0 / r) * inner(sub(y, z), sub(z, x));
        worst = std::max(worst, -lhs);
    }
    return worst;
}

PropertyReport verify_resolvent_properties(const Bifunction& f, const ConvexSet& c,
                                           double r, int sample_size, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t d = bifunction_dim(f);
    double worst = 0.0;
    for (int i = 0; i < sample_size; ++i) {
        const Vector x = rng.gaussian_vector(d, 2.0);
        const Vector y = rng.gaussian_vector(d, 2.0);
        const Vector tx = resolvent(f, c, r, x);
        const Vector ty = resolvent(f, c, r, y);
        const double gap = norm_sq(sub(tx, ty)) - inner(sub(tx, ty), sub(x, y));
        worst = std::max(worst, gap);
    }
    return {"resolvent firm nonexpansiveness", sample_size, worst, 1e-8, worst <= 1e-8};
}

}  // namespace parhyb
