#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parhyb/operators.hpp"

namespace parhyb {

struct SuiteReport {
    std::string suite;
    std::vector<PropertyReport> properties;

    bool pass() const {
        for (const auto& p : properties) {
            if (!p.pass) return false;
        }
        return true;
    }
};

// Property checks over the set catalogue: projection idempotence, firm
// nonexpansiveness, the distance inequality and the variational
// characterization of P_C.
SuiteReport run_projection_suite(int samples, std::uint64_t seed);

// Resolvent properties over the bifunction catalogue: firm nonexpansiveness,
// the zero-bifunction/P_C identity, the whole-space substitution residual,
// single-valuedness and the fixed-point property at equilibrium points.
SuiteReport run_resolvent_suite(int samples, std::uint64_t seed);

// Half-space projector: closed-form two-half-space path against subset
// enumeration, KKT certificates, idempotence, firm nonexpansiveness and the
// bisector midpoint identity.
SuiteReport run_projector_suite(int samples, std::uint64_t seed);

// End-to-end runs of the reference cases: limits against the known nearest
// solutions, zero monitor violations, nondecreasing anchor distances and
// thread-count-independent traces.
SuiteReport run_solver_suite(std::uint64_t seed);

std::vector<SuiteReport> run_suites(const std::string& which, int samples,
                                    std::uint64_t seed);

}  // namespace parhyb
