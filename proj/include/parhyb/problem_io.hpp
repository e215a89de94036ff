#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "parhyb/solver.hpp"

namespace parhyb {

// Schema violation with the offending JSON path in the message.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoadedProblem {
    ProblemInstance problem;
    std::optional<Schedule> alpha_schedule;
    std::optional<Schedule> r_schedule;
};

LoadedProblem problem_from_json(const nlohmann::json& j, std::uint64_t seed = 42);
LoadedProblem load_problem_file(const std::string& path, std::uint64_t seed = 42);

nlohmann::json problem_to_json(const ProblemInstance& prob,
                               const std::optional<Schedule>& alpha_schedule = std::nullopt,
                               const std::optional<Schedule>& r_schedule = std::nullopt);

// JSON-lines trace: one record per iteration, then a summary record. All
// reals keep full round-trip precision; wall-clock timings are omitted so
// identical runs produce byte-identical files.
void write_trace(std::ostream& os, const SolveResult& result);

struct TraceSummary {
    std::size_t iterations = 0;
    std::string status;
    Vector final_point;
    std::vector<TraceRecord> records;
    bool fejer_monotone = true;
    std::size_t fejer_violation_at = 0;
};

// Throws TraceFormatError on malformed input.
TraceSummary read_trace(std::istream& is);

}  // namespace parhyb
