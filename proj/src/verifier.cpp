#include "wernick/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wernick {

using geom::NumCircle;
using geom::NumLine;
using geom::Value;
using geom::Vec2;

namespace {
const double kPi = 3.14159265358979323846;
}

Scene sample_scene(const KnowledgeBase& kb, const std::vector<Ref>& given, std::uint64_t seed) {
    (void)kb;
    for (int attempt = 0; attempt < 1000; attempt++) {
        std::array<Vec2, 3> tri;
        try {
            tri = sample_triangle(seed + std::uint64_t(attempt) * 0x10000001ull);
        } catch (const ValidationError&) {
            continue;
        }
        Scene s;
        s.a = tri[0]; s.b = tri[1]; s.c = tri[2];
        s.seed = seed;
        s.scale = triangle_scale(s.a, s.b, s.c);
        geom::Eps eps{s.scale, {}};
        s.chars = geom::characteristic_points(s.a, s.b, s.c, eps);
        bool all = true;
        for (const auto& g : given) {
            auto it = s.chars.find(g);
            if (it == s.chars.end()) { all = false; break; }
            s.given[g] = it->second;
        }
        if (!all) continue;
        return s;
    }
    throw SamplingExhausted("no valid scene after 1000 attempts");
}

namespace {

// Candidate output values of one step over the current partial assignment.
std::vector<Value> step_candidates(const KnowledgeBase&, const Step& st,
                                   const std::map<Ref, Value>& vals, const geom::Eps& e) {
    auto v = [&](std::size_t i) -> const Value& { return vals.at(st.inputs.at(i)); };
    auto pt = [&](std::size_t i) { return std::get<Vec2>(v(i)); };
    auto ln = [&](std::size_t i) { return std::get<NumLine>(v(i)); };
    switch (st.sem) {
        case Sem::LineThrough: return {Value(geom::line_through(pt(0), pt(1), e))};
        case Sem::CircleCenter: return {Value(geom::circle_center_through(pt(0), pt(1), e))};
        case Sem::Intersect: {
            std::vector<Value> out;
            for (Vec2 p : geom::intersect(v(0), v(1), e)) out.push_back(p);
            return out;
        }
        case Sem::PerpThrough: return {Value(geom::perp_through(pt(0), ln(1)))};
        case Sem::ReflectPoint: return {Value(geom::reflect(pt(0), ln(1)))};
        case Sem::RatioPoint: return {Value(geom::ratio_point(pt(0), pt(1), pt(2), st.param))};
        case Sem::PerpBisector: return {Value(geom::perp_bisector(pt(0), pt(1), e))};
        case Sem::DiameterCircle: return {Value(geom::diameter_circle(pt(0), pt(1), e))};
        case Sem::Circumcircle: return {Value(geom::circumcircle(pt(0), pt(1), pt(2), e))};
        case Sem::TangentCircle:
            return {Value(geom::tangent_circle(pt(0), ln(1)))};
        case Sem::TangentLine: {
            std::vector<Value> out;
            for (const auto& l : geom::tangent_lines(pt(0), std::get<NumCircle>(v(1)), e))
                out.push_back(l);
            return out;
        }
        case Sem::AngleBisector: {
            std::vector<Value> out;
            for (const auto& l : geom::angle_bisectors(ln(0), ln(1), e)) out.push_back(l);
            return out;
        }
        case Sem::MirrorSide: return {Value(geom::mirror_line(ln(0), ln(1), e))};
        case Sem::Homothety: return {Value(geom::homothety_line(pt(0), st.param, ln(1), e))};
        case Sem::HarmonicPoint:
            return {Value(geom::harmonic_conjugate(pt(0), pt(1), pt(2), e))};
        case Sem::AngleMeasure: {
            // Angle between two lines at the vertex; the fold of a line
            // angle leaves two candidate measures.
            double t = geom::line_angle(ln(1), ln(2));
            if (std::abs(t - (kPi - t)) <= 1e-12) return {Value(t)};
            return {Value(t), Value(kPi - t)};
        }
        case Sem::AngleLocus: {
            auto parts = arc_parts(st.output);
            double base = parts.expr.base.empty() ? 0.0 : std::get<double>(vals.at(parts.expr.base));
            double alpha = parts.expr.eval(base);
            if (!(alpha > e.tol.degeneracy_floor && alpha < kPi - e.tol.degeneracy_floor)) return {};
            return {Value(geom::angle_locus(pt(0), pt(1), alpha, e))};
        }
    }
    return {};
}

bool ndg_holds(const Ndg& ndg, const std::map<Ref, Value>& vals, const geom::Eps& e) {
    try {
        switch (ndg.kind) {
            case NdgKind::Distinct:
                return geom::dist(std::get<Vec2>(vals.at(ndg.args[0])),
                                  std::get<Vec2>(vals.at(ndg.args[1]))) > e.deg();
            case NdgKind::NonCollinear: {
                Vec2 a = std::get<Vec2>(vals.at(ndg.args[0]));
                Vec2 b = std::get<Vec2>(vals.at(ndg.args[1]));
                Vec2 c = std::get<Vec2>(vals.at(ndg.args[2]));
                return std::abs(geom::cross(b - a, c - a)) > e.deg() * e.scale;
            }
            case NdgKind::NotOnLine:
                return std::abs(std::get<NumLine>(vals.at(ndg.args[1]))
                                    .signed_dist(std::get<Vec2>(vals.at(ndg.args[0])))) > e.deg();
            case NdgKind::Intersects:
                return !geom::intersect(vals.at(ndg.args[0]), vals.at(ndg.args[1]), e).empty();
            case NdgKind::OutsideCircle: {
                auto k = std::get<NumCircle>(vals.at(ndg.args[1]));
                return geom::dist(std::get<Vec2>(vals.at(ndg.args[0])), k.center) >
                       k.radius + e.deg();
            }
            case NdgKind::NonZeroAngle:
                return true;
        }
    } catch (const std::exception&) {
        return false;
    }
    return false;
}

} // namespace

std::string BranchTrace::branch_str() const {
    if (choice.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < choice.size(); i++) s += (i ? "/" : "") + std::to_string(choice[i]);
    return s;
}

std::vector<BranchTrace> execute(const KnowledgeBase& kb, const ConstructionPlan& plan,
                                 const Scene& scene, const geom::Tolerance& tol,
                                 std::size_t max_traces) {
    geom::Eps e{scene.scale, tol};
    std::vector<BranchTrace> traces;

    BranchTrace init;
    for (const auto& g : plan.given) {
        auto ig = scene.given.find(g);
        if (ig != scene.given.end()) {
            init.values[g] = ig->second;
            continue;
        }
        auto ic = scene.chars.find(g);
        if (ic == scene.chars.end()) {
            init.fail_step = -1;
            init.fail_why = "given label missing from scene: " + g;
            return {init};
        }
        init.values[g] = ic->second;
    }

    // DFS over per-step candidate choices.
    std::function<void(BranchTrace&, std::size_t)> walk = [&](BranchTrace& t, std::size_t i) {
        if (traces.size() >= max_traces) return;
        if (i == plan.steps.size()) {
            t.complete = true;
            traces.push_back(t);
            t.complete = false;
            return;
        }
        const Step& st = plan.steps[i];
        std::vector<Value> cands;
        std::string why;
        try {
            cands = step_candidates(kb, st, t.values, e);
            if (cands.empty()) why = "no candidates";
        } catch (const geom::geom_error& ge) {
            why = ge.what();
        } catch (const std::exception& ex) {
            why = ex.what();
        }
        bool any = false;
        for (std::size_t ci = 0; ci < cands.size(); ci++) {
            BranchTrace next = t;
            next.choice.push_back(int(ci));
            next.values[st.output] = cands[ci];
            // implicit non-degeneracy: a constructed point is distinct from
            // every point already placed
            bool ok = true;
            if (std::holds_alternative<Vec2>(cands[ci])) {
                Vec2 p = std::get<Vec2>(cands[ci]);
                for (const auto& [ref, val] : t.values)
                    if (std::holds_alternative<Vec2>(val) && ref_kind(ref) == Kind::Point &&
                        geom::dist(std::get<Vec2>(val), p) <= e.deg()) {
                        ok = false;
                        why = "constructed point coincides with " + ref;
                        break;
                    }
            }
            for (const auto& n : st.ndgs)
                if (ok && !ndg_holds(n, next.values, e)) {
                    ok = false;
                    why = "ndg failed: " + n.str();
                }
            if (!ok) {
                next.complete = false;
                next.fail_step = int(i);
                next.fail_why = why;
                if (traces.size() < max_traces) traces.push_back(next);
                continue;
            }
            any = true;
            walk(next, i + 1);
        }
        if (!any && cands.empty()) {
            BranchTrace fail = t;
            fail.fail_step = int(i);
            fail.fail_why = why.empty() ? "no candidates" : why;
            if (traces.size() < max_traces) traces.push_back(fail);
        }
    };
    walk(init, 0);
    return traces;
}

bool check_spec(const KnowledgeBase& kb, const BranchTrace& trace, const ProblemSpec& problem,
                const Scene& scene, const geom::Tolerance& tol) {
    (void)kb;
    (void)problem;
    if (!trace.complete) return false;
    geom::Eps e{scene.scale, tol};
    try {
        Vec2 a = std::get<Vec2>(trace.values.at("A"));
        Vec2 b = std::get<Vec2>(trace.values.at("B"));
        Vec2 c = std::get<Vec2>(trace.values.at("C"));
        auto chars = geom::characteristic_points(a, b, c, e);
        for (const auto& [label, want] : scene.given) {
            auto it = chars.find(label);
            if (it == chars.end()) return false;
            if (geom::dist(it->second, want) > tol.rel * scene.scale) return false;
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

namespace {

double given_residual(const BranchTrace& trace, const Scene& scene, const geom::Eps& e) {
    try {
        Vec2 a = std::get<Vec2>(trace.values.at("A"));
        Vec2 b = std::get<Vec2>(trace.values.at("B"));
        Vec2 c = std::get<Vec2>(trace.values.at("C"));
        auto chars = geom::characteristic_points(a, b, c, e);
        double r = 0;
        for (const auto& [label, want] : scene.given)
            r = std::max(r, geom::dist(chars.at(label), want));
        return r;
    } catch (const std::exception&) {
        return -1.0;
    }
}

} // namespace

std::string VerificationReport::serialize() const {
    std::ostringstream out;
    for (const auto& r : instances) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", r.residual);
        out << r.seed << " " << (r.pass ? "pass" : "FAIL") << " branch=" << r.branch
            << " residual=" << buf << "\n";
    }
    out << "passed " << passed << "/" << tried << ", branches " << branches_total
        << ", ndg-pruned " << ndg_pruned << (invalid ? " INVALID" : "") << "\n";
    return out.str();
}

VerificationReport verify(const KnowledgeBase& kb, const ConstructionPlan& plan,
                          const ProblemSpec& problem, int n_instances, std::uint64_t base_seed,
                          const geom::Tolerance& tol) {
    VerificationReport rep;
    rep.tried = n_instances;
    if (n_instances == 0) {
        rep.invalid = true;
        return rep;
    }
    for (int i = 0; i < n_instances; i++) {
        std::uint64_t seed = base_seed + std::uint64_t(i) * 7919;
        Scene scene = sample_scene(kb, plan.given, seed);
        auto traces = execute(kb, plan, scene, tol);
        for (const auto& t : traces) {
            rep.branches_total++;
            if (!t.complete && t.fail_why.rfind("ndg failed", 0) == 0) rep.ndg_pruned++;
        }
        InstanceResult ir{seed, false, "-", -1.0};
        for (const auto& t : traces) {
            if (!t.complete) continue;
            if (check_spec(kb, t, problem, scene, tol)) {
                ir.pass = true;
                ir.branch = t.branch_str();
                ir.residual = given_residual(t, scene, geom::Eps{scene.scale, tol});
                break;
            }
        }
        if (ir.pass) rep.passed++;
        rep.instances.push_back(ir);
    }
    return rep;
}

std::vector<Mutant> gen_mutants(const ConstructionPlan& plan) {
    std::vector<Mutant> out;
    for (std::size_t i = 0; i < plan.steps.size(); i++) {
        const Step& st = plan.steps[i];
        if (st.sem == Sem::RatioPoint || st.sem == Sem::Homothety) {
            Mutant m{plan, "step " + std::to_string(i + 1) + ": ratio " + st.param.str() +
                               " -> " + (st.param * Rat(2)).str()};
            m.plan.steps[i].param = st.param * Rat(2);
            out.push_back(std::move(m));
        }
        // order-sensitive input swaps
        auto swap_mutant = [&](std::size_t x, std::size_t y) {
            Mutant m{plan, "step " + std::to_string(i + 1) + ": swap inputs " +
                               st.inputs[x] + " <-> " + st.inputs[y]};
            std::swap(m.plan.steps[i].inputs[x], m.plan.steps[i].inputs[y]);
            out.push_back(std::move(m));
        };
        if (st.sem == Sem::RatioPoint) swap_mutant(1, 2);
        if (st.sem == Sem::HarmonicPoint) swap_mutant(1, 2);
        if (st.sem == Sem::CircleCenter && st.inputs[0] != st.inputs[1]) swap_mutant(0, 1);
        if (st.sem == Sem::MirrorSide) swap_mutant(0, 1);
    }
    return out;
}

} // namespace wernick
