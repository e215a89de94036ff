#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "parhyb/convex_set.hpp"
#include "parhyb/linalg.hpp"

namespace parhyb {

// ---------------------------------------------------------------------------
// Nonexpansive maps S with ||Sx - Sy|| <= ||x - y||.
// ---------------------------------------------------------------------------

struct Identity {
    std::size_t dim = 0;
};

struct ProjectionOnto {
    ConvexSet set;
};

// Rotation by `angle` in the (axis_i, axis_j) coordinate plane; the remaining
// coordinates are fixed.
struct PlaneRotation {
    std::size_t dim = 0;
    std::size_t axis_i = 0;
    std::size_t axis_j = 1;
    double angle = 0.0;
};

// x -> Mx + b with ||M|| <= 1.
struct AffineContraction {
    Matrix m;
    Vector b;
};

struct NonexpansiveMap {
    std::variant<Identity, ProjectionOnto, PlaneRotation, AffineContraction> form;
    // Optional metadata for test problems and monitors; never read by the solver.
    std::optional<Vector> fixed_point_witness;
};

// Certifying constructor: validates parameters, checks the nonexpansiveness
// inequality on 1000 seeded random pairs, and checks the witness when given.
NonexpansiveMap make_nonexpansive(
    std::variant<Identity, ProjectionOnto, PlaneRotation, AffineContraction> form,
    std::optional<Vector> fixed_point_witness = std::nullopt);

std::size_t map_dim(const NonexpansiveMap& s);
Vector apply_nonexpansive(const NonexpansiveMap& s, const Vector& x);

// ---------------------------------------------------------------------------
// alpha-inverse-strongly-monotone operators A with
// <Ax - Ay, x - y> >= alpha ||Ax - Ay||^2.
// ---------------------------------------------------------------------------

// A(x) = Mx - b; requires the symmetric part of M to be positive definite.
// Certified modulus m/L^2 with m the smallest symmetric-part eigenvalue and L
// a spectral-norm bound of M.
struct AffineMonotone {
    Matrix m;
    Vector b;
};

// A = I - T for nonexpansive T; modulus 1/2. VI(A, C) = F(T).
struct ResidualOfNonexpansive {
    NonexpansiveMap map;
};

struct ZeroOperator {
    std::size_t dim = 0;
};

struct IsmOperator {
    std::variant<AffineMonotone, ResidualOfNonexpansive, ZeroOperator> form;
    double modulus = 0.0;  // +inf for ZeroOperator
};

IsmOperator make_affine_monotone(Matrix m, Vector b);
IsmOperator make_residual_of_nonexpansive(NonexpansiveMap map);
IsmOperator make_zero_operator(std::size_t dim);

std::size_t ism_dim(const IsmOperator& a);
Vector apply_ism(const IsmOperator& a, const Vector& x);
double ism_modulus(const IsmOperator& a);
// min over members; +inf for an empty family (any positive lambda admits).
double family_modulus(std::span<const IsmOperator> family);

// ---------------------------------------------------------------------------
// Bifunctions f : C x C -> R satisfying f(x,x) = 0, monotonicity, upper
// hemicontinuity in the first argument and convexity in the second. The
// catalogue is restricted to forms for which these hold by construction.
// ---------------------------------------------------------------------------

struct ZeroBifunction {
    std::size_t dim = 0;
};

// f(x, y) = <Px + q, y - x> with the symmetric part of P positive
// semidefinite.
struct LinearMonotone {
    Matrix p;
    Vector q;
};

// f(x, y) = g(y) - g(x) for the convex quadratic
// g(z) = 0.5 <Gz, z> + <h, z> + c (G symmetric PSD).
struct ConvexDifference {
    Matrix quad;
    Vector lin;
    double constant = 0.0;
};

struct Bifunction {
    std::variant<ZeroBifunction, LinearMonotone, ConvexDifference> form;
};

Bifunction make_zero_bifunction(std::size_t dim);
Bifunction make_linear_monotone(Matrix p, Vector q);
Bifunction make_convex_difference(Matrix quad, Vector lin, double constant);

std::size_t bifunction_dim(const Bifunction& f);
double bifunction_value(const Bifunction& f, const Vector& x, const Vector& y);

// ---------------------------------------------------------------------------
// Resolvent engine: z = T_r^f x, the unique z in C with
//   f(z, y) + (1/r) <y - z, z - x> >= 0 for all y in C.
// ---------------------------------------------------------------------------

struct ResolventConfig {
    double inner_tol = 1e-12;
    int inner_max_iter = 10000;
    double step_fraction = 0.9;
};

class ResolventFailure : public std::runtime_error {
public:
    ResolventFailure(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual = 0.0;
};

// `start` overrides the inner iteration's initial point (used by the
// single-valuedness checks); default is x.
Vector resolvent(const Bifunction& f, const ConvexSet& c, double r, const Vector& x,
                 const ResolventConfig& cfg = {}, const Vector* start = nullptr);

// Max violation of the regularized inequality over `samples` points of C.
double resolvent_certificate(const Bifunction& f, const ConvexSet& c, double r,
                             const Vector& x, const Vector& z, std::uint64_t seed,
                             int samples = 64);

struct PropertyReport {
    std::string property;
    int samples = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Firm nonexpansiveness of T_r^f on sample_size random pairs.
PropertyReport verify_resolvent_properties(const Bifunction& f, const ConvexSet& c,
                                           double r, int sample_size,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Spectral helpers used by the certifying constructors.
// ---------------------------------------------------------------------------

// Eigenvalue range (min, max) of a symmetric matrix, by cyclic Jacobi sweeps.
std::pair<double, double> symmetric_eigen_range(const Matrix& s);
double spectral_norm(const Matrix& m);

}  // namespace parhyb
