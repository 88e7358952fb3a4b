#include <doctest.h>

#include <sstream>

#include "wernick/emit.hpp"

using namespace wernick;

namespace {

const KnowledgeBase& shipped_kb() {
    static KnowledgeBase kb = load_kb(builtin_kb_text());
    return kb;
}

const Solver& shipped_solver() {
    static Solver solver(shipped_kb());
    return solver;
}

ConstructionPlan plan_for(const char* id, std::vector<Ref> given) {
    ProblemSpec p{id, std::move(given), {"A", "B", "C"}, 'S'};
    auto out = shipped_solver().solve(p);
    REQUIRE(out.solved());
    return *out.cleaned;
}

int count_lines(const std::string& s, const std::string& prefix = "") {
    std::istringstream in(s);
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        if (prefix.empty() || line.rfind(prefix, 0) == 0) n++;
    return n;
}

} // namespace

TEST_CASE("display names") {
    CHECK(display_name("A") == "A");
    CHECK(display_name("Ma") == "M_a");
    CHECK(display_name("T'a") == "T'_a");
    CHECK(display_name("H'AB") == "H'_AB");
    CHECK(display_name("line(A,Ha)") == "AH_a");
    CHECK(display_name("line(B,C)") == "BC");
    CHECK(display_name("circ(O,A)") == "k(O,A)");
    CHECK(display_name("pbis(A,B)") == "s(AB)");
    CHECK(display_name("ang(B,A,C)") == "angle(BAC)");
}

TEST_CASE("problem 7 sentences match the classic listing") {
    auto plan = plan_for("7", {"A", "B", "H"});
    auto sp = to_text(shipped_kb(), plan);
    REQUIRE(sp.sentences.size() == 5);
    CHECK(sp.sentences[0] == "Using the point A and the point H, construct the line AH_a;");
    CHECK(sp.sentences[1] == "Using the point B and the point H, construct the line BH_b;");
    CHECK(sp.sentences[2] == "Using the point A and the line BH_b, construct the line AC;");
    CHECK(sp.sentences[3] == "Using the point B and the line AH_a, construct the line BC;");
    CHECK(sp.sentences[4] == "Using the line AC and the line BC, construct the point C;");
}

TEST_CASE("every sentence mentions its inputs and output") {
    for (auto [id, given] : std::vector<std::pair<const char*, std::vector<Ref>>>{
             {"4", {"A", "B", "G"}}, {"19", {"A", "O", "I"}}, {"117", {"G", "Ha", "Ta"}}}) {
        auto plan = plan_for(id, given);
        auto sp = to_text(shipped_kb(), plan);
        REQUIRE(sp.sentences.size() == plan.steps.size());
        for (std::size_t i = 0; i < plan.steps.size(); i++) {
            for (const auto& in : plan.steps[i].inputs)
                CHECK(sp.sentences[i].find(display_name(in)) != std::string::npos);
            CHECK(sp.sentences[i].find(display_name(plan.steps[i].output)) != std::string::npos);
        }
    }
}

TEST_CASE("empty plan renders no sentences") {
    ProblemSpec p{"trivial", {"A", "B", "C"}, {"A", "B", "C"}, '?'};
    auto out = shipped_solver().solve(p);
    REQUIRE(out.solved());
    CHECK(to_text(shipped_kb(), *out.cleaned).sentences.empty());
}

TEST_CASE("problem 7 GCLC script has the classic shape") {
    auto plan = plan_for("7", {"A", "B", "H"});
    Scene scene = sample_scene(shipped_kb(), plan.given, 9);
    auto script = to_gclc(shipped_kb(), plan, scene);
    CHECK(count_lines(script) == 17); // 3 points, 5 commands, 4 marks, 5 draws
    CHECK(count_lines(script, "point ") == 3);
    CHECK(count_lines(script, "line ") == 2);
    CHECK(count_lines(script, "perp ") == 2);
    CHECK(count_lines(script, "intersec ") == 1);
    CHECK(count_lines(script, "cmark_b ") == 3);
    CHECK(count_lines(script, "cmark_r ") == 1);
    CHECK(count_lines(script, "drawsegment ") == 3);
    CHECK(count_lines(script, "drawdashline ") == 2);
}

TEST_CASE("given-only plan emits declarations and marks only") {
    ProblemSpec p{"trivial", {"A", "B", "C"}, {"A", "B", "C"}, '?'};
    auto out = shipped_solver().solve(p);
    REQUIRE(out.solved());
    Scene scene = sample_scene(shipped_kb(), out.cleaned->given, 2);
    auto script = to_gclc(shipped_kb(), *out.cleaned, scene);
    CHECK(count_lines(script, "point ") == 3);
    CHECK(count_lines(script, "cmark_b ") == 3);
    CHECK(count_lines(script, "drawsegment ") == 3);
    CHECK(count_lines(script) == 9);
}

TEST_CASE("GCLC round trip reproduces the goal coordinates") {
    for (auto [id, given] : std::vector<std::pair<const char*, std::vector<Ref>>>{
             {"7", {"A", "B", "H"}},
             {"4", {"A", "B", "G"}},
             {"16", {"A", "O", "H"}},
             {"133", {"Ha", "Ta", "I"}}}) {
        auto plan = plan_for(id, given);
        Scene scene = sample_scene(shipped_kb(), plan.given, 33);
        auto script = to_gclc(shipped_kb(), plan, scene);
        auto assignments = gclc_assignments(script);
        REQUIRE(!assignments.empty());

        // the script's coordinate frame: [0,60]^2 rescale of the scene
        double xmin = std::min({scene.a.x, scene.b.x, scene.c.x});
        double ymin = std::min({scene.a.y, scene.b.y, scene.c.y});
        double span = std::max(std::max({scene.a.x, scene.b.x, scene.c.x}) - xmin,
                               std::max({scene.a.y, scene.b.y, scene.c.y}) - ymin);
        double s = 50.0 / span;
        auto tx = [&](geom::Vec2 p) {
            return geom::Vec2{5 + (p.x - xmin) * s, 5 + (p.y - ymin) * s};
        };

        auto traces = execute(shipped_kb(), plan, scene);
        ProblemSpec p{id, plan.given, plan.goal, 'S'};
        const BranchTrace* good = nullptr;
        for (const auto& t : traces)
            if (t.complete && check_spec(shipped_kb(), t, p, scene)) { good = &t; break; }
        REQUIRE(good != nullptr);

        bool matched = false;
        for (const auto& env : assignments) {
            bool all = true;
            for (const auto& g : plan.goal) {
                auto it = env.find(display_name(g));
                if (it == env.end()) { all = false; break; }
                geom::Vec2 want = tx(std::get<geom::Vec2>(good->values.at(g)));
                all = all && geom::dist(std::get<geom::Vec2>(it->second), want) < 0.01;
            }
            matched = matched || all;
        }
        CHECK(matched);
    }
}

TEST_CASE("SVG output for problem 7") {
    auto plan = plan_for("7", {"A", "B", "H"});
    Scene scene = sample_scene(shipped_kb(), plan.given, 10);
    auto svg = to_svg(shipped_kb(), plan, scene);
    CHECK(svg.rfind("<svg", 0) == 0);
    // 4 labeled points, 2 dashed auxiliary lines, 3 solid segments
    int labels = 0, dashed = 0, solid = 0;
    std::istringstream in(svg);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("<text") != std::string::npos) labels++;
        if (line.find("stroke-dasharray=\"6 4\"") != std::string::npos) dashed++;
        if (line.find("stroke=\"black\"") != std::string::npos) solid++;
    }
    CHECK(labels == 4);
    CHECK(dashed == 2);
    CHECK(solid == 3);
}

TEST_CASE("emission is byte-deterministic") {
    auto plan = plan_for("117", {"G", "Ha", "Ta"});
    Scene scene = sample_scene(shipped_kb(), plan.given, 4);
    CHECK(to_gclc(shipped_kb(), plan, scene) == to_gclc(shipped_kb(), plan, scene));
    CHECK(to_svg(shipped_kb(), plan, scene) == to_svg(shipped_kb(), plan, scene));
    CHECK(to_text(shipped_kb(), plan).str() == to_text(shipped_kb(), plan).str());
}

TEST_CASE("to_svg reports when no branch completes") {
    ConstructionPlan plan;
    plan.problem_id = "synthetic";
    plan.given = {"A", "B", "O"};
    plan.goal = {"C"};
    plan.steps = {Step{"circle_center", Sem::CircleCenter, {"A", "B"}, "circ(A,B)", Rat(), {}},
                  Step{"circle_center", Sem::CircleCenter, {"B", "O"}, "circ(B,O)", Rat(), {}},
                  Step{"intersect", Sem::Intersect, {"circ(A,B)", "circ(B,O)"}, "C", Rat(),
                       {{NdgKind::Intersects, {"circ(A,B)", "circ(B,O)"}}}}};
    plan.solved = true;
    Scene scene = sample_scene(shipped_kb(), plan.given, 3);
    scene.given["B"] = scene.given["A"] + geom::Vec2{1e-3 * scene.scale, 0};
    CHECK_THROWS_AS(to_svg(shipped_kb(), plan, scene), NoCompleteTrace);
}
