#pragma once

#include <chrono>
#include <optional>
#include <unordered_set>

#include "wernick/kb.hpp"

namespace wernick {

struct ProblemSpec {
    std::string id;
    std::vector<Ref> given;
    std::vector<Ref> goal = {"A", "B", "C"};
    char status = '?'; // S, U, R, L or ? (unknown)
};

struct Step {
    std::string rule_id;
    Sem sem;
    std::vector<Ref> inputs; // sentence order
    Ref output;
    Rat param;               // ratio_point / homothety coefficient
    std::vector<Ndg> ndgs;
};

struct ConstructionPlan {
    std::string problem_id;
    std::vector<Ref> given;
    std::vector<Ref> goal;
    std::vector<Step> steps;
    bool solved = false;

    std::string serialize() const;
};

enum class FailKind { Exhausted, Budget };

struct SolveFailure {
    FailKind kind;
    std::string detail;
    int raw_steps = 0;
    ConstructionPlan partial; // the raw trace up to the failure
};

struct Budget {
    int max_steps = 10000;
    double max_secs = 30.0;
};

struct SolveOutcome {
    std::optional<ConstructionPlan> raw;
    std::optional<ConstructionPlan> cleaned;
    std::optional<SolveFailure> failure;
    bool solved() const { return raw.has_value(); }
};

// Backward dependency slice from the goal outputs; step order preserved.
ConstructionPlan clean(const ConstructionPlan& plan);

// Forward-chaining waterfall search over the (immutable) knowledge base.
// Holds the lazily expanded chord-bisector facts and per-object reference
// values, both problem-independent; solve() itself is stateless per call.
class Solver {
public:
    explicit Solver(const KnowledgeBase& kb);

    SolveOutcome solve(const ProblemSpec& problem, const Budget& budget = {}) const;

    const KnowledgeBase& kb() const { return kb_; }
    // Facts visible to the search: KB closure plus the lazy chord bisectors.
    const std::vector<Fact>& search_facts() const { return facts_; }
    bool object_defined_on_reference(const Ref& r) const { return ref_values_.count(r) > 0; }
    const std::map<std::string, geom::Vec2>& reference_chars() const { return ref_chars_; }

private:
    struct Cand {
        const RuleSpec* rule;
        std::vector<Ref> inputs;
        Ref output;
        Rat param;
        std::vector<Ndg> ndgs;
        bool goal = false;
        std::string key; // inputs + output sort keys
    };

    struct SearchState {
        std::unordered_set<Ref> known;
        std::vector<Ref> order;
        const std::vector<Ref>* goal;
    };

    bool known(const SearchState& s, const Ref& r) const { return s.known.count(r) > 0; }
    std::vector<Ref> known_points_on(const SearchState& s, const Ref& locus) const;
    bool ndg_ok_on_reference(const Ndg& ndg) const;
    bool candidate_valid(const Cand& c) const;
    std::vector<Cand> match_rule(const RuleSpec& rule, const SearchState& s) const;
    void collect(const RuleSpec& rule, const SearchState& s, std::vector<Cand>& out) const;

    const KnowledgeBase& kb_;
    std::vector<Fact> facts_;                               // kb facts + lazy lemma-20
    std::vector<Ref> objects_;                              // kb objects + lazy pbis refs
    std::unordered_map<Ref, Kind> object_kind_;
    std::unordered_map<Ref, std::vector<Ref>> points_on_;   // locus -> points, ref-sorted
    std::unordered_map<Ref, std::vector<Ref>> loci_of_;     // point -> loci, ref-sorted
    std::map<Ref, geom::Value> ref_values_;                 // reference-triangle values
    std::map<std::string, geom::Vec2> ref_chars_;
    geom::Eps ref_eps_;
};

} // namespace wernick
