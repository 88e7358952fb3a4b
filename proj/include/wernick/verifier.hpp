#pragma once

#include "wernick/solver.hpp"

namespace wernick {

// One sampled numeric instance: a non-degenerate source triangle with the
// given labels bound to its characteristic points.
struct Scene {
    geom::Vec2 a, b, c;
    std::uint64_t seed = 0;
    double scale = 1.0;
    std::map<std::string, geom::Vec2> chars; // all characteristic points
    std::map<Ref, geom::Vec2> given;         // the problem's given labels
};

struct SamplingExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scene sample_scene(const KnowledgeBase& kb, const std::vector<Ref>& given, std::uint64_t seed);

struct BranchTrace {
    std::vector<int> choice;            // per step, chosen candidate index
    std::map<Ref, geom::Value> values;
    bool complete = false;
    int fail_step = -1;                 // 0-based step index of first failure
    std::string fail_why;

    std::string branch_str() const;
};

// Executes the plan over one scene, enumerating every intersection branch.
// Incomplete traces (a step without candidates or a failed non-degeneracy
// condition) are retained with their failure position.
std::vector<BranchTrace> execute(const KnowledgeBase& kb, const ConstructionPlan& plan,
                                 const Scene& scene, const geom::Tolerance& tol = {},
                                 std::size_t max_traces = 4096);

// True iff the triangle carried by the trace satisfies the problem's givens:
// recomputing characteristic points from the constructed A', B', C'
// reproduces every given label's scene value.
bool check_spec(const KnowledgeBase& kb, const BranchTrace& trace, const ProblemSpec& problem,
                const Scene& scene, const geom::Tolerance& tol = {});

struct InstanceResult {
    std::uint64_t seed;
    bool pass;
    std::string branch; // accepted branch, or "-"
    double residual;    // max residual of the given labels on the accepted branch
};

struct VerificationReport {
    int tried = 0;
    int passed = 0;
    bool invalid = false;  // vacuous run (n = 0)
    int ndg_pruned = 0;    // branches cut by a non-degeneracy condition
    int branches_total = 0;
    std::vector<InstanceResult> instances;

    bool ok() const { return !invalid && passed == tried; }
    std::string serialize() const; // one line per instance, golden-stable
};

VerificationReport verify(const KnowledgeBase& kb, const ConstructionPlan& plan,
                          const ProblemSpec& problem, int n_instances,
                          std::uint64_t base_seed, const geom::Tolerance& tol = {});

// Single-step plan mutants: rational-parameter changes and order-sensitive
// input swaps. The verifier is expected to reject nearly all of them.
struct Mutant {
    ConstructionPlan plan;
    std::string description;
};

std::vector<Mutant> gen_mutants(const ConstructionPlan& plan);

} // namespace wernick
