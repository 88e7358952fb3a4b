#include <algorithm>
#include <cmath>

#include "wernick/kb.hpp"

namespace wernick {

using geom::Vec2;
using geom::Value;
using geom::NumLine;
using geom::NumCircle;

namespace {
const double kPi = 3.14159265358979323846;
}

std::array<Vec2, 3> reference_triangle() {
    return {Vec2{0.0, 0.0}, Vec2{10.0, 0.0}, Vec2{3.0, 7.0}};
}

double triangle_scale(Vec2 a, Vec2 b, Vec2 c) {
    double xmin = std::min({a.x, b.x, c.x}), xmax = std::max({a.x, b.x, c.x});
    double ymin = std::min({a.y, b.y, c.y}), ymax = std::max({a.y, b.y, c.y});
    return std::hypot(xmax - xmin, ymax - ymin);
}

std::array<Vec2, 3> sample_triangle(std::uint64_t seed) {
    geom::Rng rng(seed * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull);
    for (int tries = 0; tries < 1000; tries++) {
        Vec2 a{rng.uniform(0, 100), rng.uniform(0, 100)};
        Vec2 b{rng.uniform(0, 100), rng.uniform(0, 100)};
        Vec2 c{rng.uniform(0, 100), rng.uniform(0, 100)};
        double la = geom::dist(b, c), lb = geom::dist(c, a), lc = geom::dist(a, b);
        double mn = std::min({la, lb, lc}), mx = std::max({la, lb, lc});
        if (mn <= 0 || mx / mn >= 20) continue;
        double angA = geom::ray_angle(b, a, c);
        double angB = geom::ray_angle(a, b, c);
        double angC = geom::ray_angle(a, c, b);
        double min_angle = std::min({angA, angB, angC});
        if (min_angle < 5.0 * kPi / 180.0) continue;
        // Every characteristic point must exist and stay within a sane box,
        // keeping external-bisector feet finite for the checks that use them.
        try {
            geom::Eps e{triangle_scale(a, b, c), {}};
            auto chars = geom::characteristic_points(a, b, c, e);
            if (chars.size() != geom::point_labels().size()) continue;
            bool bounded = true;
            for (const auto& [k, p] : chars)
                bounded = bounded && std::abs(p.x) < 2000 && std::abs(p.y) < 2000;
            if (!bounded) continue;
        } catch (const geom::geom_error&) {
            continue;
        }
        return {a, b, c};
    }
    throw ValidationError("sampling exhausted: no valid triangle in 1000 tries");
}

Value eval_object(const KnowledgeBase& kb, const Ref& r,
                  const std::map<std::string, Vec2>& chars, const geom::Eps& eps) {
    switch (ref_kind(r)) {
        case Kind::Point: {
            auto it = chars.find(r);
            if (it == chars.end())
                throw geom::geom_error(geom::GeomErr::DegenerateInput, "undefined point " + r);
            return it->second;
        }
        case Kind::Line: {
            std::string h = r.substr(0, r.find('('));
            if (h == "line") {
                auto [p, q] = line_points(r);
                return geom::line_through(std::get<Vec2>(eval_object(kb, p, chars, eps)),
                                          std::get<Vec2>(eval_object(kb, q, chars, eps)), eps);
            }
            if (h == "pbis") {
                auto [p, q] = line_points(r);
                return geom::perp_bisector(std::get<Vec2>(eval_object(kb, p, chars, eps)),
                                           std::get<Vec2>(eval_object(kb, q, chars, eps)), eps);
            }
            auto hp = hom_parts(r);
            return geom::homothety_line(
                std::get<Vec2>(eval_object(kb, hp.center, chars, eps)), hp.ratio,
                std::get<NumLine>(eval_object(kb, hp.base, chars, eps)), eps);
        }
        case Kind::Circle: {
            if (r.rfind("circ", 0) == 0) {
                auto [c, t] = circ_parts(r);
                return geom::circle_center_through(std::get<Vec2>(eval_object(kb, c, chars, eps)),
                                                   std::get<Vec2>(eval_object(kb, t, chars, eps)), eps);
            }
            auto [p, q] = diam_points(r);
            return geom::diameter_circle(std::get<Vec2>(eval_object(kb, p, chars, eps)),
                                         std::get<Vec2>(eval_object(kb, q, chars, eps)), eps);
        }
        case Kind::Angle: {
            auto a = ang_parts(r);
            return geom::ray_angle(std::get<Vec2>(eval_object(kb, a.x, chars, eps)),
                                   std::get<Vec2>(eval_object(kb, a.vertex, chars, eps)),
                                   std::get<Vec2>(eval_object(kb, a.y, chars, eps)));
        }
        case Kind::Arc: {
            auto a = arc_parts(r);
            double base = 0.0;
            if (!a.expr.base.empty())
                base = std::get<double>(eval_object(kb, a.expr.base, chars, eps));
            return geom::angle_locus(std::get<Vec2>(eval_object(kb, a.x, chars, eps)),
                                     std::get<Vec2>(eval_object(kb, a.y, chars, eps)),
                                     a.expr.eval(base), eps);
        }
    }
    throw ValidationError("cannot evaluate object " + r);
}

namespace {

double line_point_residual(const NumLine& l, Vec2 p) { return std::abs(l.signed_dist(p)); }

// Distance of two sample points of `who` from `target`: zero iff same line.
double line_line_residual(const NumLine& who, const NumLine& target, double span) {
    Vec2 p0 = who.base_point();
    Vec2 p1 = p0 + span * who.direction();
    return std::max(line_point_residual(target, p0), line_point_residual(target, p1));
}

} // namespace

double fact_residual(const KnowledgeBase& kb, const Fact& f,
                     const std::map<std::string, Vec2>& chars, const geom::Eps& eps) {
    auto val = [&](const Ref& r) { return eval_object(kb, r, chars, eps); };
    auto pt = [&](const Ref& r) { return std::get<Vec2>(val(r)); };
    double scale = eps.scale;
    switch (f.pred) {
        case Pred::OnLine:
            return line_point_residual(std::get<NumLine>(val(f.args[1])), pt(f.args[0])) / scale;
        case Pred::OnCircle: {
            auto k = std::get<NumCircle>(val(f.args[1]));
            return std::abs(geom::dist(pt(f.args[0]), k.center) - k.radius) / scale;
        }
        case Pred::OnArc: {
            auto a = arc_parts(f.args[1]);
            double base = a.expr.base.empty() ? 0.0 : std::get<double>(val(a.expr.base));
            double want = a.expr.eval(base);
            return std::abs(geom::ray_angle(pt(a.x), pt(f.args[0]), pt(a.y)) - want);
        }
        case Pred::Perp: {
            auto l1 = std::get<NumLine>(val(f.args[0]));
            auto l2 = std::get<NumLine>(val(f.args[1]));
            return std::abs(geom::dot(l1.normal, l2.normal));
        }
        case Pred::VecRatio: {
            Vec2 lhs = pt(f.args[1]) - pt(f.args[0]);
            Vec2 rhs = f.r.value() * (pt(f.args[3]) - pt(f.args[2]));
            return geom::dist(lhs, rhs) / scale;
        }
        case Pred::Harmonic: {
            // H(X,Y;Z,W): XW/WY = -XZ/ZY as signed ratios along the line.
            Vec2 x = pt(f.args[0]), y = pt(f.args[1]), z = pt(f.args[2]), w = pt(f.args[3]);
            Vec2 t = geom::normalized(y - x);
            auto s = [&](Vec2 u, Vec2 v) { return geom::dot(v - u, t); };
            double q1 = s(x, w) / s(w, y);
            double q2 = s(x, z) / s(z, y);
            return std::abs(q1 + q2) / (1.0 + std::abs(q1) + std::abs(q2));
        }
        case Pred::Tangent: {
            auto l = std::get<NumLine>(val(f.args[0]));
            auto k = std::get<NumCircle>(val(f.args[1]));
            return std::abs(std::abs(l.signed_dist(k.center)) - k.radius) / scale;
        }
        case Pred::Bisects: {
            // Line-level check: reflecting one side of the angle over the
            // bisector yields the other side.
            auto bis = std::get<NumLine>(val(f.args[0]));
            auto a = ang_parts(f.args[1]);
            auto s1 = std::get<NumLine>(val(mk_line(kb.vocab, a.vertex, a.x)));
            auto s2 = std::get<NumLine>(val(mk_line(kb.vocab, a.vertex, a.y)));
            auto mirrored = geom::mirror_line(s1, bis, eps);
            return line_line_residual(mirrored, s2, scale) / scale;
        }
        case Pred::ReflectionOf: {
            Vec2 want = geom::reflect(pt(f.args[1]), std::get<NumLine>(val(f.args[2])));
            return geom::dist(pt(f.args[0]), want) / scale;
        }
        case Pred::PerpBisector: {
            auto l = std::get<NumLine>(val(f.args[0]));
            Vec2 p = pt(f.args[1]), q = pt(f.args[2]);
            double d_perp = std::abs(geom::dot(l.normal, geom::normalized(q - p))) - 1.0;
            double d_mid = line_point_residual(l, geom::midpoint(p, q)) / scale;
            return std::max(std::abs(d_perp), d_mid);
        }
    }
    return 0.0;
}

KbCheckReport numeric_check_kb(const KnowledgeBase& kb, int n_samples,
                               const geom::Tolerance& tol, std::uint64_t base_seed) {
    KbCheckReport rep;
    rep.samples = n_samples;
    for (int i = 0; i < n_samples; i++) {
        std::uint64_t seed = base_seed + std::uint64_t(i);
        auto tri = sample_triangle(seed);
        geom::Eps eps{triangle_scale(tri[0], tri[1], tri[2]), tol};
        auto chars = geom::characteristic_points(tri[0], tri[1], tri[2], eps);
        for (const auto& f : kb.facts) {
            double r = fact_residual(kb, f, chars, eps);
            rep.max_residual = std::max(rep.max_residual, r);
            if (r > tol.rel) {
                rep.violations.push_back({f.str() + "  [" + f.origin + "]", seed, r});
                if (rep.violations.size() > 50) return rep;
            }
            if (i == 0) rep.checked_facts++;
        }
    }
    return rep;
}

} // namespace wernick
