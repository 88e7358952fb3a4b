#pragma once

#include "wernick/verifier.hpp"

namespace wernick {

// Human-readable object names: Ma -> M_a, T'a -> T'_a, line(A,Ha) -> AH_a,
// circ(O,A) -> k(O,A), pbis(A,B) -> s(AB).
std::string display_name(const Ref& r);

struct SentencePlan {
    std::vector<std::string> sentences;
    std::string str() const;
};

// Numbered construction steps in the register "Using the point A and the
// point H, construct the line AH_a;".
SentencePlan to_text(const KnowledgeBase& kb, const ConstructionPlan& plan);

struct NoCompleteTrace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// GCLC-style script: given points declared with scene coordinates scaled
// into [0,60]^2, one command (or a short macro) per step, then marks and
// draw commands. Commands outside the classic set are documented in the
// README and understood by gclc_assignments().
std::string to_gclc(const KnowledgeBase& kb, const ConstructionPlan& plan, const Scene& scene);

// Executes an emitted script numerically, enumerating branch assignments
// of the two-valued commands. Used by the round-trip fidelity check.
std::vector<std::map<std::string, geom::Value>> gclc_assignments(const std::string& script,
                                                                 std::size_t max_assignments = 256);

struct SvgOptions {
    double width = 480;
    double height = 480;
};

// Renders one complete numeric instance: triangle sides solid, auxiliary
// lines and circles dashed, points labeled. Byte-deterministic.
std::string to_svg(const KnowledgeBase& kb, const ConstructionPlan& plan, const Scene& scene,
                   const SvgOptions& options = {});

} // namespace wernick
