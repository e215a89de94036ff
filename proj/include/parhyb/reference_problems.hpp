#pragma once

#include <string>
#include <vector>

#include "parhyb/solver.hpp"

namespace parhyb {

// Desk-scale instances whose nearest common solution to x0 is known in closed
// form. They back `verify --suite solver` and the regression suite.
struct ReferenceCase {
    std::string name;
    ProblemInstance problem;
    SolverParams params;
    Vector expected;  // nearest point of the common solution set to x0
    double tolerance = 1e-4;
};

std::vector<ReferenceCase> reference_cases();

}  // namespace parhyb
