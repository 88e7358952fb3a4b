#include <doctest.h>

#include "wernick/verifier.hpp"

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

ConstructionPlan solve_clean(const ProblemSpec& p) {
    auto out = shipped_solver().solve(p);
    REQUIRE(out.solved());
    return *out.cleaned;
}

} // namespace

TEST_CASE("scene sampling binds the given labels and is deterministic") {
    ProblemSpec p{"4", {"A", "B", "G"}, {"A", "B", "C"}, 'S'};
    Scene s1 = sample_scene(shipped_kb(), p.given, 1);
    Scene s2 = sample_scene(shipped_kb(), p.given, 1);
    CHECK(s1.a == s2.a);
    CHECK(s1.b == s2.b);
    CHECK(s1.c == s2.c);
    // centroid identity
    geom::Vec2 g = s1.given.at("G");
    geom::Vec2 want{(s1.a.x + s1.b.x + s1.c.x) / 3, (s1.a.y + s1.b.y + s1.c.y) / 3};
    CHECK(geom::dist(g, want) < 1e-12 * s1.scale);

    Scene s3 = sample_scene(shipped_kb(), p.given, 2);
    CHECK(geom::dist(s1.a, s3.a) > 1e-9);
}

TEST_CASE("execute: branch counts follow the two-valued steps") {
    ProblemSpec p{"14", {"A", "O", "Ha"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    int two_valued = 0;
    for (const auto& st : plan.steps)
        if (st.sem == Sem::Intersect &&
            (ref_kind(st.inputs[0]) != Kind::Line || ref_kind(st.inputs[1]) != Kind::Line))
            two_valued++;
    Scene scene = sample_scene(shipped_kb(), p.given, 5);
    auto traces = execute(shipped_kb(), plan, scene);
    int complete = 0;
    for (const auto& t : traces) complete += t.complete;
    CHECK(complete >= 1);
    CHECK(complete <= (1 << two_valued));
}

TEST_CASE("trace count is 2^k over the two-valued steps") {
    ProblemSpec p{"14", {"A", "O", "Ha"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    int two_valued = 0;
    for (const auto& st : plan.steps)
        if (st.sem == Sem::Intersect &&
            (ref_kind(st.inputs[0]) != Kind::Line || ref_kind(st.inputs[1]) != Kind::Line))
            two_valued++;
    REQUIRE(two_valued >= 1);
    Scene scene = sample_scene(shipped_kb(), p.given, 8);
    auto traces = execute(shipped_kb(), plan, scene);
    CHECK(int(traces.size()) == (1 << two_valued));
}

TEST_CASE("goal points that are given verify trivially") {
    ProblemSpec p{"trivial", {"A", "B", "C"}, {"A", "B", "C"}, '?'};
    auto plan = solve_clean(p);
    CHECK(plan.steps.empty());
    auto rep = verify(shipped_kb(), plan, p, 5, 77);
    CHECK(rep.ok());
}

TEST_CASE("verify problem 7: 100/100") {
    ProblemSpec p{"7", {"A", "B", "H"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    auto rep = verify(shipped_kb(), plan, p, 100, 12345);
    CHECK(rep.passed == 100);
    CHECK(rep.tried == 100);
    CHECK(rep.ok());
}

TEST_CASE("verification is seed-deterministic") {
    ProblemSpec p{"7", {"A", "B", "H"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    auto r1 = verify(shipped_kb(), plan, p, 10, 7);
    auto r2 = verify(shipped_kb(), plan, p, 10, 7);
    CHECK(r1.serialize() == r2.serialize());
}

TEST_CASE("corrupted plan fails verification on every instance") {
    ProblemSpec p{"4", {"A", "B", "G"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    REQUIRE(plan.steps[1].sem == Sem::RatioPoint);
    plan.steps[1].param = Rat(1, 3); // ratio 3 corrupted
    auto rep = verify(shipped_kb(), plan, p, 50, 99);
    CHECK(rep.passed == 0);
    CHECK(rep.instances.size() == 50);
    for (const auto& inst : rep.instances) CHECK(!inst.pass);
}

TEST_CASE("vacuous verification is flagged invalid") {
    ProblemSpec p{"4", {"A", "B", "G"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    auto rep = verify(shipped_kb(), plan, p, 0, 1);
    CHECK(rep.invalid);
    CHECK(!rep.ok());
}

TEST_CASE("NDG failure prunes a branch instead of crashing") {
    // Intersect two disjoint circles on purpose.
    ConstructionPlan plan;
    plan.problem_id = "synthetic";
    plan.given = {"A", "B", "O"};
    plan.goal = {"C"};
    Step s1{"circle_center", Sem::CircleCenter, {"A", "B"}, "circ(A,B)", Rat(), {}};
    Step s2{"circle_center", Sem::CircleCenter, {"B", "O"}, "circ(B,O)", Rat(), {}};
    Step s3{"intersect", Sem::Intersect, {"circ(A,B)", "circ(B,O)"}, "C", Rat(),
            {{NdgKind::Intersects, {"circ(A,B)", "circ(B,O)"}}}};
    plan.steps = {s1, s2, s3};
    plan.solved = true;
    Scene scene = sample_scene(shipped_kb(), plan.given, 3);
    // shrink circ(A,B) into a disjoint position by replacing B's binding
    scene.given["B"] = scene.given["A"] + geom::Vec2{1e-3 * scene.scale, 0};
    auto traces = execute(shipped_kb(), plan, scene);
    bool complete = false;
    for (const auto& t : traces) complete = complete || t.complete;
    CHECK(!complete);
    bool saw_fail = false;
    for (const auto& t : traces)
        if (!t.complete && t.fail_step >= 0) saw_fail = true;
    CHECK(saw_fail);
}

TEST_CASE("specification semantics admit multiple valid triangles") {
    // For (A, O, Ha) the two circle branches for B and C swap the labels;
    // both labelings satisfy the givens.
    ProblemSpec p{"14", {"A", "O", "Ha"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    Scene scene = sample_scene(shipped_kb(), p.given, 21);
    auto traces = execute(shipped_kb(), plan, scene);
    int passing = 0;
    for (const auto& t : traces)
        if (t.complete && check_spec(shipped_kb(), t, p, scene)) passing++;
    CHECK(passing >= 2);
}

TEST_CASE("tolerance monotonicity") {
    ProblemSpec p{"24", {"A", "Ma", "H"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    geom::Tolerance tight{1e-9, 1e-7};
    geom::Tolerance loose{1e-6, 1e-7};
    auto r1 = verify(shipped_kb(), plan, p, 20, 5, tight);
    auto r2 = verify(shipped_kb(), plan, p, 20, 5, loose);
    CHECK(r1.passed == 20);
    CHECK(r2.passed >= r1.passed);
}

TEST_CASE("mutants of the problem-4 plan are all rejected") {
    ProblemSpec p{"4", {"A", "B", "G"}, {"A", "B", "C"}, 'S'};
    auto plan = solve_clean(p);
    auto mutants = gen_mutants(plan);
    CHECK(mutants.size() >= 3);
    for (const auto& m : mutants) {
        auto rep = verify(shipped_kb(), m.plan, p, 10, 31);
        CHECK(rep.passed == 0);
    }
}

TEST_CASE("slice soundness: raw and clean plans agree on sampled scenes") {
    ProblemSpec p{"16", {"A", "O", "H"}, {"A", "B", "C"}, 'S'};
    auto out = shipped_solver().solve(p);
    REQUIRE(out.solved());
    for (std::uint64_t seed = 1; seed <= 20; seed++) {
        Scene scene = sample_scene(shipped_kb(), p.given, seed);
        auto raw_traces = execute(shipped_kb(), *out.raw, scene);
        auto clean_traces = execute(shipped_kb(), *out.cleaned, scene);
        auto goals = [&](const std::vector<BranchTrace>& traces) {
            std::vector<std::array<geom::Vec2, 3>> out_goals;
            for (const auto& t : traces) {
                if (!t.complete || !check_spec(shipped_kb(), t, p, scene)) continue;
                out_goals.push_back({std::get<geom::Vec2>(t.values.at("A")),
                                     std::get<geom::Vec2>(t.values.at("B")),
                                     std::get<geom::Vec2>(t.values.at("C"))});
            }
            return out_goals;
        };
        auto rg = goals(raw_traces), cg = goals(clean_traces);
        REQUIRE(!rg.empty());
        REQUIRE(!cg.empty());
        for (const auto& c : cg) {
            bool found = false;
            for (const auto& r : rg)
                found = found || (geom::dist(c[0], r[0]) + geom::dist(c[1], r[1]) +
                                      geom::dist(c[2], r[2]) <
                                  1e-6 * scene.scale);
            CHECK(found);
        }
    }
}
