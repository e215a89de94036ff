// End-to-end checks of the command-line surface: exit codes, trace files,
// determinism across worker counts. Drives the installed binary as a
// subprocess.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "parhyb/problem_io.hpp"
#include "parhyb/reference_problems.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
    if (!ok) ++failures;
}

int run(const std::string& args, const fs::path& dir, std::string* out = nullptr) {
    const fs::path out_path = dir / "stdout.txt";
    const std::string cmd = std::string(PARHYB_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (out) {
        std::ifstream in(out_path);
        std::stringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
    }
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "parhyb_cli_tests";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // problem files from the reference instances
    const auto cases = parhyb::reference_cases();
    fs::path shrink, twoball, minnorm;
    for (const auto& c : cases) {
        const fs::path p = dir / (c.name + ".json");
        std::ofstream out(p);
        out << parhyb::problem_to_json(c.problem).dump(2) << "\n";
        if (c.name == "shrink1d") shrink = p;
        if (c.name == "twoball") twoball = p;
        if (c.name == "minnorm_ls") minnorm = p;
    }

    std::string out;

    // 1-D shrinking run: exit 0, tiny final point, trace written
    const fs::path trace1 = dir / "shrink.trace";
    int rc = run("solve --problem " + shrink.string() + " --alpha 0 --tol 1e-8 --trace " +
                     trace1.string(),
                 dir, &out);
    check(rc == 0, "solve exits 0 on convergence");
    check(out.find("status: Converged") != std::string::npos, "status printed");
    {
        std::ifstream tf(trace1);
        parhyb::TraceSummary s = parhyb::read_trace(tf);
        check(s.fejer_monotone, "trace is Fejer-monotone");
        check(s.records.size() == s.iterations, "one record per iteration");
        check(std::abs(s.final_point.at(0)) <= 2e-8, "final point within 2e-8");
        check(s.iterations >= 26 && s.iterations <= 30, "geometric iteration count");
    }

    // lambda outside (0, 2 alpha): exit 64 with the diagnostic
    rc = run("solve --problem " + shrink.string() + " --lambda 100", dir, &out);
    check(rc == 64, "lambda out of range exits 64");
    check(out.find("lambda out of (0, 2*alpha)") != std::string::npos,
          "lambda diagnostic printed");

    // minnorm on a problem with maps: exit 64
    rc = run("solve --problem " + twoball.string() + " --variant minnorm", dir, &out);
    check(rc == 64, "minnorm with maps exits 64");

    // unknown operator kind: exit 64 with the offending path
    const fs::path bad = dir / "bad.json";
    {
        json j = parhyb::problem_to_json(cases.front().problem);
        j["nonexpansive_maps"][0]["kind"] = "mystery";
        std::ofstream f(bad);
        f << j.dump() << "\n";
    }
    rc = run("solve --problem " + bad.string(), dir, &out);
    check(rc == 64, "unknown kind exits 64");
    check(out.find("$.nonexpansive_maps[0].kind") != std::string::npos,
          "schema path in diagnostic");

    // unreadable problem file
    rc = run("solve --problem " + (dir / "missing.json").string(), dir, &out);
    check(rc == 64, "missing file exits 64");

    // iteration cap: exit 2
    rc = run("solve --problem " + twoball.string() + " --variant fixedpoint --alpha 0"
             " --max-iter 10",
             dir, &out);
    check(rc == 2, "max iterations exits 2");

    // minnorm run: exit 0 and the right limit
    rc = run("solve --problem " + minnorm.string() + " --variant minnorm --mu 0.25", dir,
             &out);
    check(rc == 0, "minnorm run exits 0");

    // determinism: traces byte-identical across thread counts
    const fs::path t1 = dir / "t1.trace", t2 = dir / "t2.trace", t4 = dir / "t4.trace";
    run("solve --problem " + twoball.string() + " --variant fixedpoint --alpha 0"
        " --max-iter 500 --threads 1 --trace " + t1.string(), dir);
    run("solve --problem " + twoball.string() + " --variant fixedpoint --alpha 0"
        " --max-iter 500 --threads 2 --trace " + t2.string(), dir);
    run("solve --problem " + twoball.string() + " --variant fixedpoint --alpha 0"
        " --max-iter 500 --threads 4 --trace " + t4.string(), dir);
    check(slurp(t1) == slurp(t2) && slurp(t1) == slurp(t4),
          "traces byte-identical across {1,2,4} threads");

    // trace-summary: CSV rows equal trace lines minus the summary
    rc = run("trace-summary --trace " + t1.string(), dir, &out);
    check(rc == 0, "trace-summary exits 0");
    {
        std::size_t file_lines = 0;
        for (char ch : slurp(t1)) {
            if (ch == '\n') ++file_lines;
        }
        std::size_t csv_rows = 0;
        std::istringstream ss(out);
        std::string line;
        bool in_csv = false;
        while (std::getline(ss, line)) {
            if (in_csv && !line.empty()) ++csv_rows;
            if (line.rfind("n,step_norm", 0) == 0) in_csv = true;
        }
        check(csv_rows == file_lines - 1, "summary row count = trace lines - 1");
        check(out.find("fejer: monotone") != std::string::npos, "fejer verdict printed");
    }

    // malformed / empty traces: exit 65
    const fs::path empty = dir / "empty.trace";
    std::ofstream(empty).close();
    rc = run("trace-summary --trace " + empty.string(), dir, &out);
    check(rc == 65, "empty trace exits 65");
    const fs::path junk = dir / "junk.trace";
    {
        std::ofstream f(junk);
        f << "this is not json\n";
    }
    rc = run("trace-summary --trace " + junk.string(), dir, &out);
    check(rc == 65, "malformed trace exits 65");

    // verify command
    rc = run("verify --suite projector --samples 200", dir, &out);
    check(rc == 0, "verify projector exits 0");
    rc = run("verify --suite projections --samples 0", dir, &out);
    check(rc == 64, "verify with zero samples exits 64");
    rc = run("verify --suite nonsense", dir, &out);
    check(rc == 64, "unknown suite exits 64");

    // SOLVER_THREADS fallback is honored (smoke: still byte-identical)
    {
        const fs::path te = dir / "te.trace";
        const std::string cmd = "SOLVER_THREADS=2 " + std::string(PARHYB_CLI_PATH) +
                                " solve --problem " + twoball.string() +
                                " --variant fixedpoint --alpha 0 --max-iter 500 --trace " +
                                te.string() + " > /dev/null 2>&1";
        (void)std::system(cmd.c_str());
        check(slurp(te) == slurp(t1), "SOLVER_THREADS fallback produces the same trace");
    }

    std::cout << (failures == 0 ? "ALL OK" : "FAILURES") << "\n";
    return failures == 0 ? 0 : 1;
}
