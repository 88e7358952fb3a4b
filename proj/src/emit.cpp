#include "wernick/emit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace wernick {

using geom::NumArcPair;
using geom::NumCircle;
using geom::NumLine;
using geom::Value;
using geom::Vec2;

namespace {
const double kPi = 3.14159265358979323846;

std::string display_point(const std::string& p) {
    // letter ['] [subscript]
    std::string head(1, p[0]);
    std::size_t i = 1;
    if (i < p.size() && p[i] == '\'') { head += '\''; i++; }
    std::string sub = p.substr(i);
    return sub.empty() ? head : head + "_" + sub;
}

std::string display_expr(const AngleExpr& e) {
    std::string s;
    if (!e.base.empty()) {
        auto a = ang_parts(e.base);
        s = e.coeff.str() + " angle(" + display_point(a.x) + display_point(a.vertex) +
            display_point(a.y) + ")";
    }
    if (!e.pi_coeff.is_zero() || e.base.empty()) {
        if (!s.empty()) s += " + ";
        s += e.pi_coeff.str() + " pi";
    }
    return s;
}

} // namespace

std::string display_name(const Ref& r) {
    switch (ref_kind(r)) {
        case Kind::Point: return display_point(r);
        case Kind::Line: {
            if (is_named_line(r)) {
                auto [p, q] = line_points(r);
                return display_point(p) + display_point(q);
            }
            if (r.rfind("pbis", 0) == 0) {
                auto [p, q] = line_points(r);
                return "s(" + display_point(p) + display_point(q) + ")";
            }
            auto hp = hom_parts(r);
            return "h(" + display_point(hp.center) + "," + hp.ratio.str() + "," +
                   display_name(hp.base) + ")";
        }
        case Kind::Circle: {
            if (r.rfind("circ", 0) == 0) {
                auto [c, t] = circ_parts(r);
                return "k(" + display_point(c) + "," + display_point(t) + ")";
            }
            auto [p, q] = diam_points(r);
            return "d(" + display_point(p) + display_point(q) + ")";
        }
        case Kind::Arc: {
            auto a = arc_parts(r);
            return "arc(" + display_point(a.x) + display_point(a.y) + "; " +
                   display_expr(a.expr) + ")";
        }
        case Kind::Angle: {
            auto a = ang_parts(r);
            return "angle(" + display_point(a.x) + display_point(a.vertex) + display_point(a.y) +
                   ")";
        }
    }
    return r;
}

namespace {

std::string kind_word(const Ref& r) {
    switch (ref_kind(r)) {
        case Kind::Point: return "point";
        case Kind::Line: return "line";
        case Kind::Circle: return "circle";
        case Kind::Arc: return "arc";
        case Kind::Angle: return "angle";
    }
    return "object";
}

std::string render_sentence(const RuleSpec& rule, const Step& st) {
    std::string out;
    const std::string& t = rule.sentence;
    for (std::size_t i = 0; i < t.size(); i++) {
        if (t[i] != '$') { out += t[i]; continue; }
        i++;
        if (t.compare(i, 3, "out") == 0) { out += display_name(st.output); i += 2; }
        else if (t[i] == 'r') out += st.param.str();
        else if (t[i] == 'k') { out += kind_word(st.inputs[t[++i] - '1']); }
        else if (std::isdigit(static_cast<unsigned char>(t[i]))) {
            std::size_t slot = std::size_t(t[i] - '1');
            if (slot < st.inputs.size()) out += display_name(st.inputs[slot]);
        }
    }
    return out;
}

} // namespace

std::string SentencePlan::str() const {
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); i++)
        out += std::to_string(i + 1) + ". " + sentences[i] + "\n";
    return out;
}

SentencePlan to_text(const KnowledgeBase& kb, const ConstructionPlan& plan) {
    SentencePlan sp;
    for (const auto& st : plan.steps) {
        const RuleSpec* rule = kb.rule_by_id(st.rule_id);
        sp.sentences.push_back(rule ? render_sentence(*rule, st) : st.rule_id);
    }
    return sp;
}

// ---------------------------------------------------------------------------
// GCLC-style script

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out += char(std::tolower(c));
        else if (c == '\'') out += 'p';
    }
    return out;
}

struct GclcNamer {
    std::map<Ref, std::string> names;
    int seq = 0;

    std::string id(const Ref& r) {
        auto it = names.find(r);
        if (it != names.end()) return it->second;
        std::string n;
        switch (ref_kind(r)) {
            case Kind::Point: n = display_point(r); break;
            case Kind::Line:
                if (is_named_line(r)) {
                    auto [p, q] = line_points(r);
                    n = sanitize(p) + "_" + sanitize(q);
                } else if (r.rfind("pbis", 0) == 0) {
                    auto [p, q] = line_points(r);
                    n = "s_" + sanitize(p) + sanitize(q);
                } else n = "h_" + std::to_string(++seq);
                break;
            case Kind::Circle:
                if (r.rfind("circ", 0) == 0) {
                    auto [c, t] = circ_parts(r);
                    n = "k_" + sanitize(c) + sanitize(t);
                } else {
                    auto [p, q] = diam_points(r);
                    n = "kd_" + sanitize(p) + sanitize(q);
                }
                break;
            case Kind::Arc: n = "arc_" + std::to_string(++seq); break;
            case Kind::Angle: n = "w_" + std::to_string(++seq); break;
        }
        names[r] = n;
        return n;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string to_gclc(const KnowledgeBase& kb, const ConstructionPlan& plan, const Scene& scene) {
    (void)kb;
    GclcNamer nm;
    std::ostringstream out;

    // scale the scene into [0,60]^2 with a 5-unit margin
    double xmin = std::min({scene.a.x, scene.b.x, scene.c.x});
    double xmax = std::max({scene.a.x, scene.b.x, scene.c.x});
    double ymin = std::min({scene.a.y, scene.b.y, scene.c.y});
    double ymax = std::max({scene.a.y, scene.b.y, scene.c.y});
    double span = std::max(xmax - xmin, ymax - ymin);
    if (span <= 0) span = 1;
    double s = 50.0 / span;
    auto tx = [&](Vec2 p) { return Vec2{5 + (p.x - xmin) * s, 5 + (p.y - ymin) * s}; };

    for (const auto& g : plan.given) {
        Vec2 p = tx(scene.given.at(g));
        out << "point " << nm.id(g) << " " << num(p.x) << " " << num(p.y) << "\n";
    }

    int seq = 0;
    for (const auto& st : plan.steps) {
        auto in = [&](std::size_t i) { return nm.id(st.inputs.at(i)); };
        std::string o = nm.id(st.output);
        switch (st.sem) {
            case Sem::LineThrough: out << "line " << o << " " << in(0) << " " << in(1) << "\n"; break;
            case Sem::CircleCenter: out << "circle " << o << " " << in(0) << " " << in(1) << "\n"; break;
            case Sem::Intersect: {
                bool two = ref_kind(st.inputs[0]) != Kind::Line || ref_kind(st.inputs[1]) != Kind::Line;
                if (two) out << "intersec2 " << o << " " << o << "_alt " << in(0) << " " << in(1) << "\n";
                else out << "intersec " << o << " " << in(0) << " " << in(1) << "\n";
                break;
            }
            case Sem::PerpThrough: out << "perp " << o << " " << in(0) << " " << in(1) << "\n"; break;
            case Sem::ReflectPoint: out << "reflexion " << o << " " << in(0) << " " << in(1) << "\n"; break;
            case Sem::RatioPoint: {
                std::string w = "t_" + std::to_string(++seq);
                out << "towards " << w << " " << in(1) << " " << in(2) << " " << num17(st.param.value()) << "\n";
                out << "translate " << o << " " << w << " " << in(1) << " " << in(0) << "\n";
                break;
            }
            case Sem::PerpBisector: out << "med " << o << " " << in(0) << " " << in(1) << "\n"; break;
            case Sem::DiameterCircle: {
                std::string m = "t_" + std::to_string(++seq);
                out << "midpoint " << m << " " << in(0) << " " << in(1) << "\n";
                out << "circle " << o << " " << m << " " << in(0) << "\n";
                break;
            }
            case Sem::Circumcircle: {
                std::string m1 = "t_" + std::to_string(++seq);
                std::string m2 = "t_" + std::to_string(++seq);
                std::string ce = "t_" + std::to_string(++seq);
                out << "med " << m1 << " " << in(0) << " " << in(1) << "\n";
                out << "med " << m2 << " " << in(0) << " " << in(2) << "\n";
                out << "intersec " << ce << " " << m1 << " " << m2 << "\n";
                out << "circle " << o << " " << ce << " " << in(0) << "\n";
                break;
            }
            case Sem::TangentCircle: {
                std::string t = "t_" + std::to_string(++seq);
                std::string f = "t_" + std::to_string(++seq);
                out << "perp " << t << " " << in(0) << " " << in(1) << "\n";
                out << "intersec " << f << " " << t << " " << in(1) << "\n";
                out << "circle " << o << " " << in(0) << " " << f << "\n";
                break;
            }
            case Sem::TangentLine:
                out << "tangent2 " << o << " " << o << "_alt " << in(0) << " " << in(1) << "\n";
                break;
            case Sem::AngleBisector:
                out << "bis2 " << o << " " << o << "_alt " << in(0) << " " << in(1) << "\n";
                break;
            case Sem::MirrorSide:
                out << "reflexionline " << o << " " << in(1) << " " << in(0) << "\n";
                break;
            case Sem::Homothety:
                out << "homothetyline " << o << " " << in(0) << " " << num17(st.param.value())
                    << " " << in(1) << "\n";
                break;
            case Sem::HarmonicPoint:
                out << "harmonic " << o << " " << in(0) << " " << in(1) << " " << in(2) << "\n";
                break;
            case Sem::AngleMeasure:
                out << "anglemeasure " << o << " " << in(0) << " " << in(1) << " " << in(2) << "\n";
                break;
            case Sem::AngleLocus: {
                auto parts = arc_parts(st.output);
                out << "arclocus " << o << " " << in(0) << " " << in(1) << " "
                    << num17(parts.expr.coeff.value()) << " "
                    << (st.inputs.size() > 2 ? in(2) : std::string("-")) << " "
                    << num17(parts.expr.pi_coeff.value()) << "\n";
                break;
            }
        }
    }

    // marks and drawing
    for (const auto& g : plan.given) out << "cmark_b " << nm.id(g) << "\n";
    for (const auto& st : plan.steps)
        if (ref_kind(st.output) == Kind::Point) out << "cmark_r " << nm.id(st.output) << "\n";
    std::vector<Ref> sides = {"line(A,B)", "line(A,C)", "line(B,C)"};
    out << "drawsegment A B\ndrawsegment A C\ndrawsegment B C\n";
    for (const auto& st : plan.steps) {
        if (ref_kind(st.output) != Kind::Line) continue;
        if (std::find(sides.begin(), sides.end(), st.output) != sides.end()) continue;
        out << "drawdashline " << nm.id(st.output) << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Numeric re-execution of an emitted script

std::vector<std::map<std::string, Value>> gclc_assignments(const std::string& script,
                                                           std::size_t max_assignments) {
    struct Cmd {
        std::vector<std::string> t;
    };
    std::vector<Cmd> cmds;
    std::istringstream in(script);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        Cmd c;
        std::string tok;
        while (ls >> tok) c.t.push_back(tok);
        if (c.t.empty()) continue;
        const std::string& op = c.t[0];
        if (op.rfind("cmark", 0) == 0 || op.rfind("draw", 0) == 0) continue;
        cmds.push_back(std::move(c));
    }

    std::vector<std::map<std::string, Value>> done;
    geom::Eps e{60.0, {}};

    std::function<void(std::map<std::string, Value>&, std::size_t)> walk =
        [&](std::map<std::string, Value>& env, std::size_t i) {
            if (done.size() >= max_assignments) return;
            if (i == cmds.size()) { done.push_back(env); return; }
            const auto& t = cmds[i].t;
            const std::string& op = t[0];
            auto pt = [&](const std::string& id) { return std::get<Vec2>(env.at(id)); };
            auto ln = [&](const std::string& id) { return std::get<NumLine>(env.at(id)); };
            auto step = [&](const std::string& id, Value v) {
                auto saved = env;
                env[id] = std::move(v);
                walk(env, i + 1);
                env = std::move(saved);
            };
            auto step2 = [&](const std::string& id1, const std::string& id2,
                             std::vector<Value> vals) {
                for (std::size_t a = 0; a < vals.size(); a++)
                    for (std::size_t b = 0; b < vals.size(); b++) {
                        if (a == b) continue;
                        auto saved = env;
                        env[id1] = vals[a];
                        env[id2] = vals[b];
                        walk(env, i + 1);
                        env = std::move(saved);
                    }
                if (vals.size() == 1) {
                    auto saved = env;
                    env[id1] = vals[0];
                    env[id2] = vals[0];
                    walk(env, i + 1);
                    env = std::move(saved);
                }
            };
            try {
                if (op == "point") step(t[1], Vec2{std::stod(t[2]), std::stod(t[3])});
                else if (op == "line") step(t[1], geom::line_through(pt(t[2]), pt(t[3]), e));
                else if (op == "circle") step(t[1], geom::circle_center_through(pt(t[2]), pt(t[3]), e));
                else if (op == "intersec") {
                    auto v = geom::intersect(env.at(t[2]), env.at(t[3]), e);
                    for (Vec2 p : v) step(t[1], p);
                } else if (op == "intersec2") {
                    auto v = geom::intersect(env.at(t[3]), env.at(t[4]), e);
                    std::vector<Value> vals(v.begin(), v.end());
                    step2(t[1], t[2], vals);
                } else if (op == "perp") step(t[1], geom::perp_through(pt(t[2]), ln(t[3])));
                else if (op == "med") step(t[1], geom::perp_bisector(pt(t[2]), pt(t[3]), e));
                else if (op == "midpoint") step(t[1], geom::midpoint(pt(t[2]), pt(t[3])));
                else if (op == "reflexion") step(t[1], geom::reflect(pt(t[2]), ln(t[3])));
                else if (op == "towards") {
                    Vec2 y = pt(t[2]), z = pt(t[3]);
                    double r = std::stod(t[4]);
                    step(t[1], y + r * (z - y));
                } else if (op == "translate") {
                    // new = base + (from2 - from1)
                    step(t[1], pt(t[4]) + (pt(t[3]) - pt(t[2])));
                } else if (op == "tangent2") {
                    auto v = geom::tangent_lines(pt(t[3]), std::get<NumCircle>(env.at(t[4])), e);
                    std::vector<Value> vals(v.begin(), v.end());
                    step2(t[1], t[2], vals);
                } else if (op == "bis2") {
                    auto v = geom::angle_bisectors(ln(t[3]), ln(t[4]), e);
                    std::vector<Value> vals(v.begin(), v.end());
                    step2(t[1], t[2], vals);
                } else if (op == "reflexionline") {
                    step(t[1], geom::mirror_line(ln(t[3]), ln(t[2]), e));
                } else if (op == "homothetyline") {
                    double r = std::stod(t[3]);
                    Rat rr(std::llround(r * 720720), 720720);
                    step(t[1], geom::homothety_line(pt(t[2]), rr, ln(t[4]), e));
                } else if (op == "harmonic") {
                    step(t[1], geom::harmonic_conjugate(pt(t[2]), pt(t[3]), pt(t[4]), e));
                } else if (op == "anglemeasure") {
                    double a = geom::line_angle(ln(t[3]), ln(t[4]));
                    step(t[1], a);
                    if (std::abs(kPi - 2 * a) > 1e-12) step(t[1], kPi - a);
                } else if (op == "arclocus") {
                    double coeff = std::stod(t[4]);
                    double base = t[5] == "-" ? 0.0 : std::get<double>(env.at(t[5]));
                    double pic = std::stod(t[6]);
                    double alpha = coeff * base + pic * kPi;
                    step(t[1], geom::angle_locus(pt(t[2]), pt(t[3]), alpha, e));
                }
            } catch (const std::exception&) {
                // branch dies
            }
        };
    std::map<std::string, Value> env;
    walk(env, 0);
    return done;
}

// ---------------------------------------------------------------------------
// SVG rendering

std::string to_svg(const KnowledgeBase& kb, const ConstructionPlan& plan, const Scene& scene,
                   const SvgOptions& options) {
    auto traces = execute(kb, plan, scene);
    const BranchTrace* trace = nullptr;
    for (const auto& t : traces)
        if (t.complete) { trace = &t; break; }
    if (!trace) throw NoCompleteTrace("no complete branch for the given scene");

    // bounding box over all finite points
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](Vec2 p) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    };
    for (const auto& [ref, v] : trace->values) {
        if (auto* p = std::get_if<Vec2>(&v)) grow(*p);
        else if (auto* k = std::get_if<NumCircle>(&v)) {
            grow(k->center + Vec2{k->radius, k->radius});
            grow(k->center - Vec2{k->radius, k->radius});
        }
    }
    double margin = 0.05 * std::max(xmax - xmin, ymax - ymin);
    xmin -= margin; xmax += margin; ymin -= margin; ymax += margin;
    double sx = options.width / (xmax - xmin);
    double sy = options.height / (ymax - ymin);
    double s = std::min(sx, sy);
    auto tx = [&](Vec2 p) {
        return Vec2{(p.x - xmin) * s, options.height - (p.y - ymin) * s};
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // clip an infinite line to the box
    auto line_seg = [&](const NumLine& l) -> std::optional<std::pair<Vec2, Vec2>> {
        std::vector<Vec2> hits;
        geom::Eps e{std::max(xmax - xmin, ymax - ymin), {}};
        Vec2 corners[4] = {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
        for (int i = 0; i < 4; i++) {
            Vec2 a = corners[i], b = corners[(i + 1) % 4];
            try {
                auto edge = geom::line_through(a, b, e);
                for (Vec2 p : geom::intersect(l, edge, e))
                    if (p.x >= xmin - 1e-6 && p.x <= xmax + 1e-6 && p.y >= ymin - 1e-6 &&
                        p.y <= ymax + 1e-6)
                        hits.push_back(p);
            } catch (const std::exception&) {
            }
        }
        std::sort(hits.begin(), hits.end(), [](Vec2 a, Vec2 b) { return a < b; });
        if (hits.size() < 2) return std::nullopt;
        return std::make_pair(hits.front(), hits.back());
    };

    std::vector<Ref> sides = {"line(A,B)", "line(A,C)", "line(B,C)"};
    // auxiliary loci, dashed
    for (const auto& st : plan.steps) {
        auto it = trace->values.find(st.output);
        if (it == trace->values.end()) continue;
        if (auto* l = std::get_if<NumLine>(&it->second)) {
            if (std::find(sides.begin(), sides.end(), st.output) != sides.end()) continue;
            auto seg = line_seg(*l);
            if (!seg) continue;
            Vec2 p1 = tx(seg->first), p2 = tx(seg->second);
            out << "<line x1=\"" << fmt(p1.x) << "\" y1=\"" << fmt(p1.y) << "\" x2=\""
                << fmt(p2.x) << "\" y2=\"" << fmt(p2.y)
                << "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
        } else if (auto* k = std::get_if<NumCircle>(&it->second)) {
            Vec2 c = tx(k->center);
            out << "<circle cx=\"" << fmt(c.x) << "\" cy=\"" << fmt(c.y) << "\" r=\""
                << fmt(k->radius * s)
                << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
        } else if (auto* a = std::get_if<NumArcPair>(&it->second)) {
            for (const auto& carrier : geom::arc_carriers(*a)) {
                Vec2 c = tx(carrier.center);
                out << "<circle cx=\"" << fmt(c.x) << "\" cy=\"" << fmt(c.y) << "\" r=\""
                    << fmt(carrier.radius * s)
                    << "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"2 4\"/>\n";
            }
        }
    }

    // triangle sides, solid
    auto side = [&](const Ref& p, const Ref& q) {
        auto ip = trace->values.find(p), iq = trace->values.find(q);
        if (ip == trace->values.end() || iq == trace->values.end()) return;
        Vec2 a = tx(std::get<Vec2>(ip->second)), b = tx(std::get<Vec2>(iq->second));
        out << "<line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x)
            << "\" y2=\"" << fmt(b.y) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    };
    side("A", "B");
    side("A", "C");
    side("B", "C");

    // points: given blue, constructed red
    auto mark = [&](const Ref& ref, const char* color) {
        auto it = trace->values.find(ref);
        if (it == trace->values.end()) return;
        if (auto* p = std::get_if<Vec2>(&it->second)) {
            Vec2 q = tx(*p);
            out << "<circle cx=\"" << fmt(q.x) << "\" cy=\"" << fmt(q.y) << "\" r=\"3\" fill=\""
                << color << "\"/>\n";
            out << "<text x=\"" << fmt(q.x + 5) << "\" y=\"" << fmt(q.y - 5)
                << "\" font-size=\"13\" font-family=\"sans-serif\">" << display_name(ref)
                << "</text>\n";
        }
    };
    for (const auto& g : plan.given) mark(g, "#1f6fb2");
    for (const auto& st : plan.steps)
        if (ref_kind(st.output) == Kind::Point) mark(st.output, "#c62828");

    out << "</svg>\n";
    return out.str();
}

} // namespace wernick
