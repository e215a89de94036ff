#pragma once

#include <variant>
#include <vector>

#include "parhyb/linalg.hpp"
#include "parhyb/rng.hpp"

namespace parhyb {

struct Box {
    Vector lower;
    Vector upper;
};

struct Ball {
    Vector center;
    double radius = 1.0;
};

// {v : <normal, v> <= offset}. A zero normal with offset >= 0 degenerates to
// the whole space; a zero normal with offset < 0 is rejected as empty.
struct HalfSpace {
    Vector normal;
    double offset = 0.0;
};

struct WholeSpace {
    std::size_t dim = 0;
};

// basepoint + span(directions), directions pairwise orthonormal.
struct AffineSubspace {
    Vector basepoint;
    std::vector<Vector> directions;
};

// Closed convex sets with closed-form projections. General convex sets with
// iterative projections are out of scope: an exact substrate keeps solver
// invariant failures attributable to the solver.
using ConvexSet = std::variant<Box, Ball, HalfSpace, WholeSpace, AffineSubspace>;

struct ContainmentVerdict {
    bool inside = false;
    double violation = 0.0;  // distance-like slack, >= 0
};

std::size_t set_dim(const ConvexSet& set);

// Throws std::invalid_argument on malformed parameters.
void validate_set(const ConvexSet& set);

bool halfspace_is_whole(const HalfSpace& h);
bool is_whole_space(const ConvexSet& set);

Vector project(const ConvexSet& set, const Vector& x);
ContainmentVerdict contains(const ConvexSet& set, const Vector& x, double tol);

// Deterministic in-set sample: a gaussian point of the given scale projected
// onto the set.
Vector sample_point(const ConvexSet& set, Rng& rng, double scale = 1.0);

}  // namespace parhyb
