#include "parhyb/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace parhyb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

double as_real(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::size_t as_index(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Vector as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vector v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        v.push_back(as_real(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return v;
}

Matrix as_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    const std::size_t rows = j.size();
    Vector first = as_vector(j[0], path + "[0]");
    Matrix m(rows, first.size());
    for (std::size_t i = 0; i < rows; ++i) {
        const Vector row = as_vector(j[i], path + "[" + std::to_string(i) + "]");
        if (row.size() != m.cols) fail(path, "ragged rows");
        for (std::size_t k = 0; k < m.cols; ++k) m(i, k) = row[k];
    }
    return m;
}

json vector_to_json(const Vector& v) { return json(v); }

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ConvexSet set_from_json(const json& j, const std::string& path) {
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    ConvexSet set;
    if (kind == "box") {
        set = Box{as_vector(require(j, "lower", path), path + ".lower"),
                  as_vector(require(j, "upper", path), path + ".upper")};
    } else if (kind == "ball") {
        set = Ball{as_vector(require(j, "center", path), path + ".center"),
                   as_real(require(j, "radius", path), path + ".radius")};
    } else if (kind == "halfspace") {
        set = HalfSpace{as_vector(require(j, "normal", path), path + ".normal"),
                        as_real(require(j, "offset", path), path + ".offset")};
    } else if (kind == "whole_space") {
        set = WholeSpace{as_index(require(j, "dim", path), path + ".dim")};
    } else if (kind == "affine_subspace") {
        AffineSubspace a;
        a.basepoint = as_vector(require(j, "basepoint", path), path + ".basepoint");
        const json& dirs = require(j, "directions", path);
        if (!dirs.is_array()) fail(path + ".directions", "expected an array");
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            a.directions.push_back(
                as_vector(dirs[i], path + ".directions[" + std::to_string(i) + "]"));
        }
        set = std::move(a);
    } else {
        fail(path + ".kind", "unknown set kind '" + kind + "'");
    }
    try {
        validate_set(set);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return set;
}

json set_to_json(const ConvexSet& set) {
    json j;
    if (const auto* b = std::get_if<Box>(&set)) {
        j["kind"] = "box";
        j["lower"] = vector_to_json(b->lower);
        j["upper"] = vector_to_json(b->upper);
    } else if (const auto* b = std::get_if<Ball>(&set)) {
        j["kind"] = "ball";
        j["center"] = vector_to_json(b->center);
        j["radius"] = b->radius;
    } else if (const auto* h = std::get_if<HalfSpace>(&set)) {
        j["kind"] = "halfspace";
        j["normal"] = vector_to_json(h->normal);
        j["offset"] = h->offset;
    } else if (const auto* w = std::get_if<WholeSpace>(&set)) {
        j["kind"] = "whole_space";
        j["dim"] = w->dim;
    } else if (const auto* a = std::get_if<AffineSubspace>(&set)) {
        j["kind"] = "affine_subspace";
        j["basepoint"] = vector_to_json(a->basepoint);
        json dirs = json::array();
        for (const auto& d : a->directions) dirs.push_back(vector_to_json(d));
        j["directions"] = std::move(dirs);
    }
    return j;
}

NonexpansiveMap map_from_json(const json& j, const std::string& path) {
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    std::optional<Vector> witness;
    if (j.contains("fixed_point")) {
        witness = as_vector(j["fixed_point"], path + ".fixed_point");
    }
    try {
        if (kind == "identity") {
            return make_nonexpansive(Identity{as_index(require(j, "dim", path), path + ".dim")},
                                     std::move(witness));
        }
        if (kind == "projection_onto") {
            return make_nonexpansive(
                ProjectionOnto{set_from_json(require(j, "set", path), path + ".set")},
                std::move(witness));
        }
        if (kind == "plane_rotation") {
            PlaneRotation r;
            r.dim = as_index(require(j, "dim", path), path + ".dim");
            r.axis_i = as_index(require(j, "axis_i", path), path + ".axis_i");
            r.axis_j = as_index(require(j, "axis_j", path), path + ".axis_j");
            r.angle = as_real(require(j, "angle", path), path + ".angle");
            return make_nonexpansive(r, std::move(witness));
        }
        if (kind == "affine_contraction") {
            return make_nonexpansive(
                AffineContraction{as_matrix(require(j, "matrix", path), path + ".matrix"),
                                  as_vector(require(j, "shift", path), path + ".shift")},
                std::move(witness));
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown map kind '" + kind + "'");
}

json map_to_json(const NonexpansiveMap& s) {
    json j;
    if (const auto* f = std::get_if<Identity>(&s.form)) {
        j["kind"] = "identity";
        j["dim"] = f->dim;
    } else if (const auto* f = std::get_if<ProjectionOnto>(&s.form)) {
        j["kind"] = "projection_onto";
        j["set"] = set_to_json(f->set);
    } else if (const auto* f = std::get_if<PlaneRotation>(&s.form)) {
        j["kind"] = "plane_rotation";
        j["dim"] = f->dim;
        j["axis_i"] = f->axis_i;
        j["axis_j"] = f->axis_j;
        j["angle"] = f->angle;
    } else if (const auto* f = std::get_if<AffineContraction>(&s.form)) {
        j["kind"] = "affine_contraction";
        j["matrix"] = matrix_to_json(f->m);
        j["shift"] = vector_to_json(f->b);
    }
    if (s.fixed_point_witness) j["fixed_point"] = vector_to_json(*s.fixed_point_witness);
    return j;
}

IsmOperator ism_from_json(const json& j, const std::string& path) {
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    try {
        if (kind == "affine") {
            return make_affine_monotone(as_matrix(require(j, "matrix", path), path + ".matrix"),
                                        as_vector(require(j, "shift", path), path + ".shift"));
        }
        if (kind == "residual_of_nonexpansive") {
            return make_residual_of_nonexpansive(
                map_from_json(require(j, "map", path), path + ".map"));
        }
        if (kind == "zero") {
            return make_zero_operator(as_index(require(j, "dim", path), path + ".dim"));
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown operator kind '" + kind + "'");
}

json ism_to_json(const IsmOperator& a) {
    json j;
    if (const auto* f = std::get_if<AffineMonotone>(&a.form)) {
        j["kind"] = "affine";
        j["matrix"] = matrix_to_json(f->m);
        j["shift"] = vector_to_json(f->b);
    } else if (const auto* f = std::get_if<ResidualOfNonexpansive>(&a.form)) {
        j["kind"] = "residual_of_nonexpansive";
        j["map"] = map_to_json(f->map);
    } else if (const auto* f = std::get_if<ZeroOperator>(&a.form)) {
        j["kind"] = "zero";
        j["dim"] = f->dim;
    }
    return j;
}

Bifunction bifunction_from_json(const json& j, const std::string& path) {
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    try {
        if (kind == "zero") {
            return make_zero_bifunction(as_index(require(j, "dim", path), path + ".dim"));
        }
        if (kind == "linear_monotone") {
            return make_linear_monotone(as_matrix(require(j, "matrix", path), path + ".matrix"),
                                        as_vector(require(j, "shift", path), path + ".shift"));
        }
        if (kind == "convex_difference") {
            const double c = j.contains("constant")
                                 ? as_real(j["constant"], path + ".constant")
                                 : 0.0;
            return make_convex_difference(as_matrix(require(j, "quad", path), path + ".quad"),
                                          as_vector(require(j, "linear", path), path + ".linear"),
                                          c);
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown bifunction kind '" + kind + "'");
}

json bifunction_to_json(const Bifunction& f) {
    json j;
    if (const auto* g = std::get_if<ZeroBifunction>(&f.form)) {
        j["kind"] = "zero";
        j["dim"] = g->dim;
    } else if (const auto* g = std::get_if<LinearMonotone>(&f.form)) {
        j["kind"] = "linear_monotone";
        j["matrix"] = matrix_to_json(g->p);
        j["shift"] = vector_to_json(g->q);
    } else if (const auto* g = std::get_if<ConvexDifference>(&f.form)) {
        j["kind"] = "convex_difference";
        j["quad"] = matrix_to_json(g->quad);
        j["linear"] = vector_to_json(g->lin);
        j["constant"] = g->constant;
    }
    return j;
}

Schedule schedule_from_json(const json& j, const std::string& path) {
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    if (kind == "constant") {
        return Schedule{ConstantSchedule{as_real(require(j, "value", path), path + ".value")}};
    }
    if (kind == "harmonic") {
        return Schedule{
            HarmonicDecaySchedule{as_real(require(j, "value", path), path + ".value")}};
    }
    fail(path + ".kind", "unknown schedule kind '" + kind + "'");
}

json schedule_to_json(const Schedule& s) {
    json j;
    if (const auto* c = std::get_if<ConstantSchedule>(&s.rule)) {
        j["kind"] = "constant";
        j["value"] = c->value;
    } else if (const auto* h = std::get_if<HarmonicDecaySchedule>(&s.rule)) {
        j["kind"] = "harmonic";
        j["value"] = h->scale;
    }
    return j;
}

}  // namespace

LoadedProblem problem_from_json(const json& j, std::uint64_t seed) {
    if (!j.is_object()) throw SchemaError("$: expected an object");
    LoadedProblem out;
    ProblemInstance& p = out.problem;

    p.dim = as_index(require(j, "dim", "$"), "$.dim");
    p.feasible_set = set_from_json(require(j, "feasible_set", "$"), "$.feasible_set");
    p.x0 = as_vector(require(j, "x0", "$"), "$.x0");

    const auto read_family = [&](const char* key, auto parse, auto& dst) {
        if (!j.contains(key)) return;
        const json& arr = j.at(key);
        if (!arr.is_array()) fail(std::string("$.") + key, "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            dst.push_back(
                parse(arr[i], std::string("$.") + key + "[" + std::to_string(i) + "]"));
        }
    };
    read_family("bifunctions", bifunction_from_json, p.bifunctions);
    read_family("ism_operators", ism_from_json, p.ism_ops);
    read_family("nonexpansive_maps", map_from_json, p.maps);

    if (j.contains("witness")) {
        p.solution_witness = as_vector(j["witness"], "$.witness");
    }
    if (j.contains("alpha_schedule")) {
        out.alpha_schedule = schedule_from_json(j["alpha_schedule"], "$.alpha_schedule");
    }
    if (j.contains("r_schedule")) {
        out.r_schedule = schedule_from_json(j["r_schedule"], "$.r_schedule");
    }

    try {
        validate_problem(p, seed);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("$: ") + e.what());
    }
    return out;
}

LoadedProblem load_problem_file(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open problem file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("problem file is not valid JSON: " + std::string(e.what()));
    }
    return problem_from_json(j, seed);
}

json problem_to_json(const ProblemInstance& prob, const std::optional<Schedule>& alpha_schedule,
                     const std::optional<Schedule>& r_schedule) {
    json j;
    j["dim"] = prob.dim;
    j["feasible_set"] = set_to_json(prob.feasible_set);
    j["x0"] = vector_to_json(prob.x0);
    json bf = json::array();
    for (const auto& f : prob.bifunctions) bf.push_back(bifunction_to_json(f));
    j["bifunctions"] = std::move(bf);
    json ops = json::array();
    for (const auto& a : prob.ism_ops) ops.push_back(ism_to_json(a));
    j["ism_operators"] = std::move(ops);
    json maps = json::array();
    for (const auto& s : prob.maps) maps.push_back(map_to_json(s));
    j["nonexpansive_maps"] = std::move(maps);
    if (prob.solution_witness) j["witness"] = vector_to_json(*prob.solution_witness);
    if (alpha_schedule) j["alpha_schedule"] = schedule_to_json(*alpha_schedule);
    if (r_schedule) j["r_schedule"] = schedule_to_json(*r_schedule);
    return j;
}

void write_trace(std::ostream& os, const SolveResult& result) {
    for (const auto& r : result.trace) {
        json line;
        line["n"] = r.n;
        line["step_norm"] = r.step_norm;
        line["stage_residual"] = r.stage_residual;
        line["z_residual"] = r.z_residual;
        line["zu_gap"] = r.zu_gap;
        line["fejer"] = r.fejer;
        if (r.witness_distance) line["witness_distance"] = *r.witness_distance;
        if (r.witness_slack) line["witness_slack"] = *r.witness_slack;
        if (r.c_slack) line["c_slack"] = *r.c_slack;
        os << line.dump() << '\n';
    }
    json summary;
    summary["status"] = status_name(result.status);
    summary["iterations"] = result.iterations;
    summary["final_point"] = vector_to_json(result.final_point);
    summary["monitor_violations"] = result.monitor_violations.size();
    os << summary.dump() << '\n';
}

TraceSummary read_trace(std::istream& is) {
    TraceSummary out;
    std::string line;
    std::vector<json> lines;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        try {
            lines.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw TraceFormatError("malformed trace line: " + std::string(e.what()));
        }
    }
    if (lines.empty()) throw TraceFormatError("trace is empty");

    const json summary = lines.back();
    lines.pop_back();
    if (!summary.is_object() || !summary.contains("status") ||
        !summary.contains("iterations") || !summary.contains("final_point")) {
        throw TraceFormatError("last line is not a summary record");
    }
    out.status = summary["status"].get<std::string>();
    out.iterations = summary["iterations"].get<std::size_t>();
    out.final_point = summary["final_point"].get<Vector>();

    double prev_fejer = -1.0;
    for (const auto& rec : lines) {
        if (!rec.is_object() || !rec.contains("n") || !rec.contains("step_norm") ||
            !rec.contains("stage_residual") || !rec.contains("fejer")) {
            throw TraceFormatError("malformed iteration record");
        }
        TraceRecord r;
        r.n = rec["n"].get<std::size_t>();
        r.step_norm = rec["step_norm"].get<double>();
        r.stage_residual = rec["stage_residual"].get<double>();
        r.z_residual = rec.value("z_residual", 0.0);
        r.zu_gap = rec.value("zu_gap", 0.0);
        r.fejer = rec["fejer"].get<double>();
        if (rec.contains("witness_distance")) {
            r.witness_distance = rec["witness_distance"].get<double>();
        }
        if (rec.contains("witness_slack")) r.witness_slack = rec["witness_slack"].get<double>();
        if (rec.contains("c_slack")) r.c_slack = rec["c_slack"].get<double>();
        if (!out.records.empty() && r.n <= out.records.back().n) {
            throw TraceFormatError("iteration indices not strictly increasing");
        }
        if (prev_fejer >= 0.0 && r.fejer < prev_fejer - 1e-10 && out.fejer_monotone) {
            out.fejer_monotone = false;
            out.fejer_violation_at = r.n;
        }
        prev_fejer = r.fejer;
        out.records.push_back(std::move(r));
    }
    return out;
}

}  // namespace parhyb
