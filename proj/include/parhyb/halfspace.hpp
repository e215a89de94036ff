#pragma once

#include <stdexcept>
#include <vector>

#include "parhyb/convex_set.hpp"
#include "parhyb/linalg.hpp"

namespace parhyb {

// At most 4 half-spaces per projection call in this solver; whole-space
// degenerate entries (zero normal, offset >= 0) are skipped.
using HalfSpaceList = std::vector<HalfSpace>;

// Certified projection onto the intersection:
//   point = x0 - sum_j multipliers[j] * items[active_set[j]].normal,
// multipliers >= 0, every half-space satisfied, inactive constraints have
// multiplier zero by construction.
struct KktSolution {
    Vector point;
    std::vector<double> multipliers;
    std::vector<std::size_t> active_set;
};

class InfeasibleIntersection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {v : ||v - near|| <= ||v - far||} as the half-space
// <v, far - near> <= <(near + far)/2, far - near>. Degenerates to the whole
// space when near == far. The offset is taken against the midpoint so the
// boundary stays accurate when far - near is tiny.
HalfSpace bisector_halfspace(const Vector& near, const Vector& far);

// {v : <x0 - xn, xn - v> >= 0} rewritten as <v, x0 - xn> <= <xn, x0 - xn>;
// whole space when x0 == xn.
HalfSpace monotonicity_halfspace(const Vector& x0, const Vector& xn);

// Closed-form case split for two half-spaces: x0 itself when feasible, the
// single-constraint projection when it satisfies the other constraint, else
// the two-multiplier solve. Falls back to project_intersection on degenerate
// normals. Active-set indices refer to {0: cn, 1: qn}.
KktSolution project_two(const Vector& x0, const HalfSpace& cn, const HalfSpace& qn);

// Exact projection by enumeration of active subsets, smallest first, then
// lexicographic; the first candidate with multipliers >= -1e-12 and
// feasibility within 1e-10 wins. Throws InfeasibleIntersection when no subset
// certifies.
KktSolution project_intersection(const Vector& x0, const HalfSpaceList& hs);

// Max violation across the KKT conditions (stationarity, feasibility against
// unit normals, multiplier nonnegativity). Complementary slackness holds
// structurally: multipliers exist only for active items.
double kkt_max_error(const Vector& x0, const HalfSpaceList& hs, const KktSolution& sol);

}  // namespace parhyb
