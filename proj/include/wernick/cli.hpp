#pragma once

#include <iosfwd>

#include "wernick/catalog.hpp"
#include "wernick/emit.hpp"

namespace wernick {

// Exit codes shared by the command line and its tests.
enum ExitCode {
    kExitOk = 0,
    kExitUnsolved = 2,
    kExitVerifyFailed = 3,
    kExitUsage = 64,
};

struct RunConfig {
    std::string kb_path;      // empty: builtin wernick.kb
    std::string catalog_path; // empty: builtin catalog
    std::uint64_t seed = 2024;
    int instances = 100;
    double tol = 1e-9;
    int budget_steps = 10000;
    double budget_secs = 30.0;
    std::string out_dir;      // empty: no artifact files
    int jobs = 1;
    std::string format = "all"; // text|gclc|svg|all
    std::string only_status;    // batch filter
    bool timing = true;         // batch: include the seconds column

    geom::Tolerance tolerance() const { return geom::Tolerance{tol, 1e-7}; }
    Budget budget() const { return Budget{budget_steps, budget_secs}; }
};

// Shared state loaded once per invocation.
struct Session {
    KnowledgeBase kb;
    std::vector<CatalogEntry> catalog;
    explicit Session(const RunConfig& cfg);
    Solver& solver() { return *solver_; }

private:
    std::unique_ptr<Solver> solver_;
};

// Resolves "7" or "A,B,H" to a problem; returns false on bad references.
bool parse_problem_ref(const Session& s, const std::string& ref, ProblemSpec& out,
                       std::string& err);

int cmd_list(Session& s, const std::string& filter_status, const std::string& index,
             std::ostream& out);
int cmd_solve(Session& s, const ProblemSpec& p, const RunConfig& cfg, std::ostream& out);
int cmd_verify(Session& s, const ProblemSpec& p, const RunConfig& cfg, std::ostream& out);
int cmd_render(Session& s, const ProblemSpec& p, const RunConfig& cfg, std::ostream& out);
int cmd_batch(Session& s, const RunConfig& cfg, std::ostream& out);
int cmd_check_kb(Session& s, int samples, const RunConfig& cfg, std::ostream& out);

} // namespace wernick
