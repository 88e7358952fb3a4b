#include "wernick/solver.hpp"

#include <algorithm>
#include <sstream>

namespace wernick {

using geom::Value;
using geom::Vec2;

std::string ConstructionPlan::serialize() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < steps.size(); i++) {
        const Step& st = steps[i];
        out << i + 1 << ": " << st.rule_id << "(";
        for (std::size_t j = 0; j < st.inputs.size(); j++) out << (j ? ", " : "") << st.inputs[j];
        if (st.sem == Sem::RatioPoint || st.sem == Sem::Homothety) out << "; r=" << st.param.str();
        out << ") -> " << st.output;
        if (!st.ndgs.empty()) {
            out << " [ndg:";
            for (const auto& n : st.ndgs) out << " " << n.str();
            out << "]";
        }
        out << "\n";
    }
    return out.str();
}

ConstructionPlan clean(const ConstructionPlan& plan) {
    ConstructionPlan out = plan;
    out.steps.clear();
    std::unordered_set<Ref> needed(plan.goal.begin(), plan.goal.end());
    std::vector<bool> keep(plan.steps.size(), false);
    for (std::size_t i = plan.steps.size(); i-- > 0;) {
        const Step& st = plan.steps[i];
        if (needed.count(st.output)) {
            keep[i] = true;
            for (const auto& in : st.inputs) needed.insert(in);
            for (const auto& n : st.ndgs)
                for (const auto& a : n.args) needed.insert(a);
        }
    }
    for (std::size_t i = 0; i < plan.steps.size(); i++)
        if (keep[i]) out.steps.push_back(plan.steps[i]);
    return out;
}

Solver::Solver(const KnowledgeBase& kb) : kb_(kb) {
    facts_ = kb.facts;
    objects_ = kb.objects;
    object_kind_ = kb.object_kind;

    // Lazy chord-bisector expansion: for every circle and every pair of its
    // known-on-circle points, the center lies on the side bisector of the
    // chord. Reuses a named side bisector when the KB has one.
    std::unordered_map<std::string, Ref> named_pbis;
    for (const auto& f : kb.facts)
        if (f.pred == Pred::PerpBisector && is_named_line(f.args[0]))
            named_pbis[f.args[1] + "|" + f.args[2]] = f.args[0];

    std::unordered_set<std::string> fact_keys;
    for (const auto& f : facts_) fact_keys.insert(f.key());
    auto add_lazy = [&](Fact f) {
        f = canonical_fact(kb.vocab, std::move(f));
        if (fact_keys.count(f.key())) return;
        fact_keys.insert(f.key());
        if (!object_kind_.count(f.args[1])) {
            object_kind_[f.args[1]] = ref_kind(f.args[1]);
            objects_.push_back(f.args[1]);
            auto [p, q] = line_points(f.args[1]);
            Fact pb{Pred::PerpBisector, {f.args[1], p, q}, Rat(), true, "lazy_chord"};
            pb = canonical_fact(kb.vocab, std::move(pb));
            if (!fact_keys.count(pb.key())) { fact_keys.insert(pb.key()); facts_.push_back(pb); }
        }
        facts_.push_back(std::move(f));
    };

    std::unordered_map<Ref, std::vector<Ref>> on_circle;
    for (const auto& f : kb.facts)
        if (f.pred == Pred::OnCircle) {
            auto& v = on_circle[f.args[1]];
            if (std::find(v.begin(), v.end(), f.args[0]) == v.end()) v.push_back(f.args[0]);
        }
    for (const auto& k : kb.objects) {
        if (ref_kind(k) != Kind::Circle || k.rfind("circ", 0) != 0) continue;
        Ref center = circ_parts(k).first;
        auto it = on_circle.find(k);
        if (it == on_circle.end()) continue;
        auto pts = it->second;
        std::sort(pts.begin(), pts.end(),
                  [&](const Ref& a, const Ref& b) { return kb.ref_less(a, b); });
        for (std::size_t i = 0; i < pts.size(); i++)
            for (std::size_t j = i + 1; j < pts.size(); j++) {
                auto a = pts[i], b = pts[j];
                if (kb.vocab.index_of(b) < kb.vocab.index_of(a)) std::swap(a, b);
                auto named = named_pbis.find(a + "|" + b);
                Ref l = named != named_pbis.end() ? named->second : mk_pbis(kb.vocab, a, b);
                add_lazy(Fact{Pred::OnLine, {center, l}, Rat(), true, "lazy_chord"});
            }
    }

    // indices over the extended fact set
    for (const auto& f : facts_) {
        if (f.pred == Pred::OnLine || f.pred == Pred::OnCircle || f.pred == Pred::OnArc) {
            auto& pts = points_on_[f.args[1]];
            if (std::find(pts.begin(), pts.end(), f.args[0]) == pts.end()) pts.push_back(f.args[0]);
            auto& ls = loci_of_[f.args[0]];
            if (std::find(ls.begin(), ls.end(), f.args[1]) == ls.end()) ls.push_back(f.args[1]);
        }
    }
    auto less = [this](const Ref& a, const Ref& b) { return kb_.ref_less(a, b); };
    for (auto& [k, v] : points_on_) std::sort(v.begin(), v.end(), less);
    for (auto& [k, v] : loci_of_) std::sort(v.begin(), v.end(), less);

    // Pre-warm the sort-key cache for every object the search can touch;
    // lookups during solve() are then read-only and thread-safe.
    for (const auto& r : objects_) kb_.sort_key(r);

    // Reference values: numeric admissibility filter over one generic
    // scalene triangle. Objects that fail to evaluate stay absent and any
    // candidate touching them is skipped.
    auto tri = reference_triangle();
    ref_eps_ = geom::Eps{triangle_scale(tri[0], tri[1], tri[2]), {}};
    ref_chars_ = geom::characteristic_points(tri[0], tri[1], tri[2], ref_eps_);
    for (const auto& r : objects_) {
        try {
            ref_values_[r] = eval_object(kb_, r, ref_chars_, ref_eps_);
        } catch (const std::exception&) {
        }
    }
}

std::vector<Ref> Solver::known_points_on(const SearchState& s, const Ref& locus) const {
    std::vector<Ref> out;
    auto it = points_on_.find(locus);
    if (it == points_on_.end()) return out;
    for (const auto& p : it->second)
        if (known(s, p)) out.push_back(p);
    return out;
}

bool Solver::ndg_ok_on_reference(const Ndg& ndg) const {
    std::vector<const Value*> v;
    for (const auto& a : ndg.args) {
        auto it = ref_values_.find(a);
        if (it == ref_values_.end()) return false;
        v.push_back(&it->second);
    }
    double eps = ref_eps_.deg();
    try {
        switch (ndg.kind) {
            case NdgKind::Distinct:
                return geom::dist(std::get<Vec2>(*v[0]), std::get<Vec2>(*v[1])) > eps;
            case NdgKind::NonCollinear: {
                Vec2 a = std::get<Vec2>(*v[0]), b = std::get<Vec2>(*v[1]), c = std::get<Vec2>(*v[2]);
                return std::abs(geom::cross(b - a, c - a)) > eps * ref_eps_.scale;
            }
            case NdgKind::NotOnLine:
                return std::abs(std::get<geom::NumLine>(*v[1]).signed_dist(std::get<Vec2>(*v[0]))) > eps;
            case NdgKind::Intersects:
                return !geom::intersect(*v[0], *v[1], ref_eps_).empty();
            case NdgKind::OutsideCircle: {
                auto k = std::get<geom::NumCircle>(*v[1]);
                return geom::dist(std::get<Vec2>(*v[0]), k.center) > k.radius + eps;
            }
            case NdgKind::NonZeroAngle:
                return true;
        }
    } catch (const std::exception&) {
        return false;
    }
    return false;
}

bool Solver::candidate_valid(const Cand& c) const {
    if (!ref_values_.count(c.output)) return false;
    for (const auto& in : c.inputs)
        if (!ref_values_.count(in)) return false;
    for (const auto& n : c.ndgs)
        if (!ndg_ok_on_reference(n)) return false;
    return true;
}

void Solver::collect(const RuleSpec& rule, const SearchState& s, std::vector<Cand>& out) const {
    auto add = [&](std::vector<Ref> inputs, Ref output, Rat param = Rat(),
                   std::vector<Ndg> ndgs = {}) {
        Cand c{&rule, std::move(inputs), std::move(output), param, std::move(ndgs), false, {}};
        if (known(s, c.output)) return;
        for (const auto& in : c.inputs)
            if (!known(s, in)) return;
        if (!candidate_valid(c)) return;
        c.goal = std::find(s.goal->begin(), s.goal->end(), c.output) != s.goal->end();
        for (const auto& in : c.inputs) c.key += kb_.sort_key(in) + "|";
        c.key += kb_.sort_key(c.output);
        out.push_back(std::move(c));
    };

    switch (rule.sem) {
        case Sem::LineThrough: {
            for (const auto& l : objects_) {
                if (object_kind_.at(l) != Kind::Line || known(s, l)) continue;
                auto pts = known_points_on(s, l);
                if (pts.size() < 2) continue;
                add({pts[0], pts[1]}, l, Rat(), {{NdgKind::Distinct, {pts[0], pts[1]}}});
            }
            break;
        }
        case Sem::CircleCenter: {
            for (const auto& k : objects_) {
                if (object_kind_.at(k) != Kind::Circle || k.rfind("circ", 0) != 0 || known(s, k))
                    continue;
                Ref center = circ_parts(k).first;
                if (!known(s, center)) continue;
                auto pts = known_points_on(s, k);
                if (pts.empty()) continue;
                add({center, pts[0]}, k, Rat(), {{NdgKind::Distinct, {center, pts[0]}}});
            }
            break;
        }
        case Sem::Intersect: {
            for (const auto& p : kb_.vocab.order) {
                if (known(s, p)) continue;
                auto it = loci_of_.find(p);
                if (it == loci_of_.end()) continue;
                std::vector<Ref> loci;
                for (const auto& l : it->second)
                    if (known(s, l) && ref_values_.count(l)) loci.push_back(l);
                if (loci.size() < 2) continue;
                // first pair of genuinely distinct loci that do intersect on
                // the reference triangle
                bool done = false;
                for (std::size_t i = 0; i < loci.size() && !done; i++)
                    for (std::size_t j = i + 1; j < loci.size() && !done; j++) {
                        const Value& v1 = ref_values_.at(loci[i]);
                        const Value& v2 = ref_values_.at(loci[j]);
                        if (geom::approx(v1, v2, ref_eps_.deg())) continue;
                        try {
                            if (geom::intersect(v1, v2, ref_eps_).empty()) continue;
                        } catch (const std::exception&) {
                            continue;
                        }
                        add({loci[i], loci[j]}, p, Rat(),
                            {{NdgKind::Intersects, {loci[i], loci[j]}}});
                        done = true;
                    }
            }
            break;
        }
        case Sem::PerpThrough: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::Perp) continue;
                for (int dir = 0; dir < 2; dir++) {
                    const Ref& q = f.args[dir];
                    const Ref& p = f.args[1 - dir];
                    if (known(s, q) || !known(s, p)) continue;
                    auto pts = known_points_on(s, q);
                    if (pts.empty()) continue;
                    add({pts[0], p}, q);
                }
            }
            break;
        }
        case Sem::ReflectPoint: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::ReflectionOf) continue;
                if (known(s, f.args[2])) {
                    if (known(s, f.args[1]) && !known(s, f.args[0]))
                        add({f.args[1], f.args[2]}, f.args[0]);
                    if (known(s, f.args[0]) && !known(s, f.args[1]))
                        add({f.args[0], f.args[2]}, f.args[1]);
                }
            }
            break;
        }
        case Sem::RatioPoint: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::VecRatio) continue;
                for (const auto& var : vecratio_variants(f)) {
                    // (b - a) = r (d - c): construct b from a, d, c.
                    const Ref &a = var.args[0], &b = var.args[1], &c = var.args[2], &d = var.args[3];
                    if (b == a || b == c || b == d) continue;
                    add({a, d, c}, b, var.r);
                }
            }
            break;
        }
        case Sem::PerpBisector: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::PerpBisector || known(s, f.args[0])) continue;
                add({f.args[1], f.args[2]}, f.args[0], Rat(),
                    {{NdgKind::Distinct, {f.args[1], f.args[2]}}});
            }
            break;
        }
        case Sem::DiameterCircle: {
            for (const auto& k : objects_) {
                if (object_kind_.at(k) != Kind::Circle || k.rfind("diam", 0) != 0 || known(s, k))
                    continue;
                auto [p, q] = diam_points(k);
                add({p, q}, k, Rat(), {{NdgKind::Distinct, {p, q}}});
            }
            break;
        }
        case Sem::Circumcircle: {
            for (const auto& k : objects_) {
                if (object_kind_.at(k) != Kind::Circle || known(s, k)) continue;
                auto pts = known_points_on(s, k);
                if (pts.size() < 3) continue;
                add({pts[0], pts[1], pts[2]}, k, Rat(),
                    {{NdgKind::NonCollinear, {pts[0], pts[1], pts[2]}}});
            }
            break;
        }
        case Sem::TangentCircle: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::Tangent) continue;
                const Ref &l = f.args[0], &k = f.args[1];
                if (known(s, k) || !known(s, l) || k.rfind("circ", 0) != 0) continue;
                Ref center = circ_parts(k).first;
                if (!known(s, center)) continue;
                add({center, l}, k, Rat(), {{NdgKind::NotOnLine, {center, l}}});
            }
            break;
        }
        case Sem::TangentLine: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::Tangent) continue;
                const Ref &l = f.args[0], &k = f.args[1];
                if (known(s, l) || !known(s, k)) continue;
                auto pts = known_points_on(s, l);
                if (pts.empty()) continue;
                add({pts[0], k}, l, Rat(), {{NdgKind::OutsideCircle, {pts[0], k}}});
            }
            break;
        }
        case Sem::AngleBisector: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::Bisects || known(s, f.args[0])) continue;
                auto a = ang_parts(f.args[1]);
                Ref s1 = mk_line(kb_.vocab, a.vertex, a.x);
                Ref s2 = mk_line(kb_.vocab, a.vertex, a.y);
                if (!known(s, s1) || !known(s, s2)) continue;
                add({s1, s2}, f.args[0], Rat(), {{NdgKind::Intersects, {s1, s2}}});
            }
            break;
        }
        case Sem::MirrorSide: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::Bisects || !known(s, f.args[0])) continue;
                auto a = ang_parts(f.args[1]);
                Ref s1 = mk_line(kb_.vocab, a.vertex, a.x);
                Ref s2 = mk_line(kb_.vocab, a.vertex, a.y);
                if (known(s, s1) && !known(s, s2)) add({s1, f.args[0]}, s2);
                else if (known(s, s2) && !known(s, s1)) add({s2, f.args[0]}, s1);
            }
            break;
        }
        case Sem::Homothety: {
            for (const auto& h : objects_) {
                if (object_kind_.at(h) != Kind::Line || h.rfind("hom", 0) != 0 || known(s, h))
                    continue;
                auto hp = hom_parts(h);
                add({hp.center, hp.base}, h, hp.ratio);
            }
            break;
        }
        case Sem::HarmonicPoint: {
            for (const auto& f : facts_) {
                if (f.pred != Pred::Harmonic) continue;
                // the symmetry orbit puts each of the four points last
                const Ref &x = f.args[0], &y = f.args[1], &z = f.args[2], &w = f.args[3];
                std::vector<std::vector<Ref>> orbit = {
                    {x, y, z, w}, {y, x, w, z}, {z, w, x, y}, {w, z, y, x}};
                for (const auto& o : orbit) {
                    if (known(s, o[3])) continue;
                    add({o[0], o[1], o[2]}, o[3], Rat(),
                        {{NdgKind::Distinct, {o[0], o[1]}}});
                }
            }
            break;
        }
        case Sem::AngleMeasure: {
            for (const auto& g : objects_) {
                if (object_kind_.at(g) != Kind::Angle || known(s, g)) continue;
                auto a = ang_parts(g);
                Ref s1 = mk_line(kb_.vocab, a.vertex, a.x);
                Ref s2 = mk_line(kb_.vocab, a.vertex, a.y);
                if (!known(s, a.vertex) || !known(s, s1) || !known(s, s2)) continue;
                add({a.vertex, s1, s2}, g, Rat(), {{NdgKind::Intersects, {s1, s2}}});
            }
            break;
        }
        case Sem::AngleLocus: {
            for (const auto& arc : objects_) {
                if (object_kind_.at(arc) != Kind::Arc || known(s, arc)) continue;
                auto a = arc_parts(arc);
                if (!known(s, a.x) || !known(s, a.y)) continue;
                std::vector<Ref> inputs = {a.x, a.y};
                if (!a.expr.base.empty()) {
                    if (!known(s, a.expr.base)) continue;
                    inputs.push_back(a.expr.base);
                }
                add(std::move(inputs), arc, Rat(), {{NdgKind::Distinct, {a.x, a.y}}});
            }
            break;
        }
    }
}

std::vector<Solver::Cand> Solver::match_rule(const RuleSpec& rule, const SearchState& s) const {
    std::vector<Cand> out;
    collect(rule, s, out);
    std::sort(out.begin(), out.end(), [](const Cand& a, const Cand& b) {
        if (a.goal != b.goal) return a.goal;
        return a.key < b.key;
    });
    return out;
}

SolveOutcome Solver::solve(const ProblemSpec& problem, const Budget& budget) const {
    for (const auto& g : problem.given)
        if (!kb_.vocab.has(g)) throw ValidationError("given label not in vocabulary: " + g);
    for (const auto& g : problem.goal)
        if (!kb_.vocab.has(g)) throw ValidationError("goal label not in vocabulary: " + g);

    SearchState s;
    s.goal = &problem.goal;
    for (const auto& g : problem.given) { s.known.insert(g); s.order.push_back(g); }

    ConstructionPlan plan;
    plan.problem_id = problem.id;
    plan.given = problem.given;
    plan.goal = problem.goal;

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(budget.max_secs));

    auto goal_reached = [&] {
        for (const auto& g : problem.goal)
            if (!s.known.count(g)) return false;
        return true;
    };

    SolveOutcome outcome;
    while (!goal_reached()) {
        if (int(plan.steps.size()) >= budget.max_steps) {
            outcome.failure = SolveFailure{FailKind::Budget, "step budget exhausted",
                                           int(plan.steps.size()), plan};
            return outcome;
        }
        if (std::chrono::steady_clock::now() > deadline) {
            outcome.failure = SolveFailure{FailKind::Budget, "time budget exhausted",
                                           int(plan.steps.size()), plan};
            return outcome;
        }
        bool applied = false;
        for (const auto& rule : kb_.rules) {
            auto cands = match_rule(rule, s);
            if (cands.empty()) continue;
            const Cand& c = cands.front();
            plan.steps.push_back(Step{c.rule->id, c.rule->sem, c.inputs, c.output, c.param, c.ndgs});
            s.known.insert(c.output);
            s.order.push_back(c.output);
            applied = true;
            break;
        }
        if (!applied) {
            outcome.failure = SolveFailure{FailKind::Exhausted, "no applicable construction",
                                           int(plan.steps.size()), plan};
            return outcome;
        }
    }

    plan.solved = true;
    outcome.raw = plan;
    outcome.cleaned = clean(plan);
    return outcome;
}

} // namespace wernick
