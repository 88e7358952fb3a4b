#include "wernick/geom.hpp"

#include <algorithm>
#include <cmath>

namespace wernick::geom {

namespace {

const double kPi = 3.14159265358979323846;

NumLine canon(Vec2 n, double c) {
    double len = norm(n);
    n = {n.x / len, n.y / len};
    c /= len;
    if (n.y < 0 || (n.y == 0 && n.x < 0)) { n = {-n.x, -n.y}; c = -c; }
    return {n, c};
}

void sort_points(std::vector<Vec2>& v) {
    std::sort(v.begin(), v.end(), [](Vec2 a, Vec2 b) { return a < b; });
}

} // namespace

NumLine line_through(Vec2 p, Vec2 q, const Eps& e) {
    if (dist(p, q) <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "line through coincident points");
    Vec2 d = q - p;
    return canon(perp(d), dot(perp(d), p));
}

NumCircle circle_center_through(Vec2 c, Vec2 p, const Eps& e) {
    double r = dist(c, p);
    if (r <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "circle with coincident center and point");
    return {c, r};
}

NumLine perp_bisector(Vec2 p, Vec2 q, const Eps& e) {
    if (dist(p, q) <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "perpendicular bisector of degenerate segment");
    Vec2 n = q - p;
    return canon(n, dot(normalized(n), midpoint(p, q)) * norm(n));
}

NumLine perp_through(Vec2 p, const NumLine& l) {
    Vec2 n = perp(l.normal);
    return canon(n, dot(n, p));
}

NumCircle diameter_circle(Vec2 p, Vec2 q, const Eps& e) {
    if (dist(p, q) <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "diameter circle of degenerate segment");
    return {midpoint(p, q), 0.5 * dist(p, q)};
}

NumCircle circumcircle(Vec2 p, Vec2 q, Vec2 r, const Eps& e) {
    double area2 = cross(q - p, r - p);
    double span = std::max({dist(p, q), dist(q, r), dist(p, r)});
    if (span <= e.deg() || std::abs(area2) <= e.deg() * span)
        throw geom_error(GeomErr::DegenerateInput, "circumcircle of collinear or coincident points");
    // Center from the two chord bisector equations.
    NumLine b1 = perp_bisector(p, q, e);
    NumLine b2 = perp_bisector(p, r, e);
    double det = cross(b1.normal, b2.normal);
    Vec2 center = {(b1.offset * b2.normal.y - b2.offset * b1.normal.y) / det,
                   (b1.normal.x * b2.offset - b2.normal.x * b1.offset) / det};
    return {center, dist(center, p)};
}

NumArcPair angle_locus(Vec2 x, Vec2 y, double alpha, const Eps& e) {
    if (dist(x, y) <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "angle locus over degenerate segment");
    if (!(alpha > e.tol.degeneracy_floor && alpha < kPi - e.tol.degeneracy_floor))
        throw geom_error(GeomErr::DegenerateInput, "angle locus with angle outside (0, pi)");
    return {x, y, alpha};
}

std::vector<NumCircle> arc_carriers(const NumArcPair& arc) {
    double d = dist(arc.base_x, arc.base_y);
    double radius = d / (2.0 * std::sin(arc.angle));
    double off = radius * std::cos(arc.angle);
    Vec2 m = midpoint(arc.base_x, arc.base_y);
    Vec2 n = normalized(perp(arc.base_y - arc.base_x));
    if (std::abs(off) < 1e-14 * d) return {{m, radius}};
    return {{m + off * n, radius}, {m - off * n, radius}};
}

Vec2 reflect(Vec2 p, const NumLine& l) {
    return p - 2.0 * l.signed_dist(p) * l.normal;
}

NumLine mirror_line(const NumLine& l, const NumLine& axis, const Eps& e) {
    Vec2 p0 = l.base_point();
    Vec2 p1 = p0 + std::max(1.0, e.scale) * l.direction();
    return line_through(reflect(p0, axis), reflect(p1, axis), e);
}

NumCircle tangent_circle(Vec2 c, const NumLine& l, const Eps& e) {
    double r = std::abs(l.signed_dist(c));
    if (r <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "tangent circle with center on the line");
    return {c, r};
}

std::vector<NumLine> tangent_lines(Vec2 p, const NumCircle& k, const Eps& e) {
    double d = dist(p, k.center);
    if (d <= k.radius + e.deg())
        throw geom_error(GeomErr::PointNotOutside, "tangent lines from a point not outside the circle");
    Vec2 u = normalized(k.center - p);
    double phi = std::asin(k.radius / d);
    auto rot = [&](double s) {
        Vec2 dir = {u.x * std::cos(s) - u.y * std::sin(s), u.x * std::sin(s) + u.y * std::cos(s)};
        return canon(perp(dir), dot(perp(dir), p));
    };
    std::vector<NumLine> out = {rot(phi), rot(-phi)};
    std::sort(out.begin(), out.end(), [](const NumLine& a, const NumLine& b) {
        if (a.normal.x != b.normal.x) return a.normal.x < b.normal.x;
        if (a.normal.y != b.normal.y) return a.normal.y < b.normal.y;
        return a.offset < b.offset;
    });
    return out;
}

std::vector<NumLine> angle_bisectors(const NumLine& l1, const NumLine& l2, const Eps& e) {
    auto v = intersect(l1, l2, e);
    if (v.empty()) throw geom_error(GeomErr::ParallelLines, "angle bisector of parallel lines");
    Vec2 u1 = l1.direction();
    Vec2 u2 = l2.direction();
    std::vector<NumLine> out;
    for (Vec2 d : {u1 + u2, u1 - u2}) {
        if (norm(d) < 1e-12) continue;
        out.push_back(canon(perp(d), dot(perp(d), v[0])));
    }
    std::sort(out.begin(), out.end(), [](const NumLine& a, const NumLine& b) {
        if (a.normal.x != b.normal.x) return a.normal.x < b.normal.x;
        if (a.normal.y != b.normal.y) return a.normal.y < b.normal.y;
        return a.offset < b.offset;
    });
    return out;
}

NumLine angle_bisector(const NumLine& l1, const NumLine& l2, Vec2 region_hint, const Eps& e) {
    auto v = intersect(l1, l2, e);
    if (v.empty()) throw geom_error(GeomErr::ParallelLines, "angle bisector of parallel lines");
    Vec2 u1 = l1.direction();
    Vec2 u2 = l2.direction();
    Vec2 h = region_hint - v[0];
    if (dot(h, u1) < 0) u1 = -1.0 * u1;
    if (dot(h, u2) < 0) u2 = -1.0 * u2;
    Vec2 d = u1 + u2;
    if (norm(d) < 1e-12) d = perp(u1);
    return canon(perp(d), dot(perp(d), v[0]));
}

NumLine homothety_line(Vec2 center, Rat r, const NumLine& l, const Eps& e) {
    (void)e;
    if (r.is_zero()) throw geom_error(GeomErr::ZeroRatio, "homothety with zero ratio");
    double s = r.value();
    double c = dot(l.normal, center) * (1.0 - s) + s * l.offset;
    return canon(l.normal, c);
}

Vec2 ratio_point(Vec2 x, Vec2 y, Vec2 z, Rat r) {
    return x - r.value() * (z - y);
}

Vec2 harmonic_conjugate(Vec2 x, Vec2 y, Vec2 z, const Eps& e) {
    double len = dist(x, y);
    if (len <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "harmonic conjugate over degenerate segment");
    Vec2 u = normalized(y - x);
    double a = dot(z - x, u);
    if (std::abs(len - 2.0 * a) <= e.deg())
        throw geom_error(GeomErr::DegenerateInput, "harmonic conjugate of the midpoint is at infinity");
    double t = -a * len / (len - 2.0 * a);
    return x + t * u;
}

std::vector<Vec2> intersect(const NumLine& a, const NumLine& b, const Eps& e) {
    double det = cross(a.normal, b.normal);
    if (std::abs(det) <= e.tol.degeneracy_floor) {
        // parallel; coincident iff the offsets agree for aligned normals
        double c2 = dot(a.normal, b.normal) >= 0 ? b.offset : -b.offset;
        if (std::abs(a.offset - c2) <= e.deg())
            throw geom_error(GeomErr::IdenticalObjects, "intersection of coincident lines");
        return {};
    }
    return {{(a.offset * b.normal.y - b.offset * a.normal.y) / det,
             (a.normal.x * b.offset - b.normal.x * a.offset) / det}};
}

std::vector<Vec2> intersect(const NumLine& a, const NumCircle& b, const Eps& e) {
    double d = a.signed_dist(b.center);
    double h2 = b.radius * b.radius - d * d;
    if (h2 < -2.0 * e.lin() * b.radius) return {};
    Vec2 foot = b.center - d * a.normal;
    if (h2 <= 0) return {foot};
    double h = std::sqrt(h2);
    std::vector<Vec2> out = {foot + h * a.direction(), foot - h * a.direction()};
    sort_points(out);
    return out;
}

std::vector<Vec2> intersect(const NumCircle& a, const NumCircle& b, const Eps& e) {
    double d = dist(a.center, b.center);
    if (d <= e.deg()) {
        if (std::abs(a.radius - b.radius) <= e.deg())
            throw geom_error(GeomErr::IdenticalObjects, "intersection of coincident circles");
        return {};
    }
    // Radical line, then reuse the line/circle case.
    double c = 0.5 * (d + (a.radius * a.radius - b.radius * b.radius) / d);
    Vec2 u = normalized(b.center - a.center);
    NumLine rad = canon(u, dot(u, a.center) + c);
    return intersect(rad, a, e);
}

bool on_locus(const NumArcPair& arc, Vec2 s, const Eps& e) {
    if (dist(s, arc.base_x) <= e.deg() || dist(s, arc.base_y) <= e.deg()) return false;
    return std::abs(ray_angle(arc.base_x, s, arc.base_y) - arc.angle) <= 1e-6;
}

namespace {

std::vector<Vec2> arc_filter(const NumArcPair& a, std::vector<Vec2> pts, const Eps& e) {
    std::vector<Vec2> out;
    for (Vec2 p : pts) {
        if (!on_locus(a, p, e)) continue;
        bool dup = false;
        for (Vec2 q : out) dup = dup || dist(p, q) <= e.deg();
        if (!dup) out.push_back(p);
    }
    sort_points(out);
    return out;
}

} // namespace

std::vector<Vec2> intersect(const NumArcPair& a, const NumLine& b, const Eps& e) {
    std::vector<Vec2> pts;
    for (const NumCircle& k : arc_carriers(a))
        for (Vec2 p : intersect(b, k, e)) pts.push_back(p);
    return arc_filter(a, pts, e);
}

std::vector<Vec2> intersect(const NumArcPair& a, const NumCircle& b, const Eps& e) {
    std::vector<Vec2> pts;
    for (const NumCircle& k : arc_carriers(a))
        for (Vec2 p : intersect(k, b, e)) pts.push_back(p);
    return arc_filter(a, pts, e);
}

std::vector<Vec2> intersect(const Value& a, const Value& b, const Eps& e) {
    if (auto* la = std::get_if<NumLine>(&a)) {
        if (auto* lb = std::get_if<NumLine>(&b)) return intersect(*la, *lb, e);
        if (auto* kb = std::get_if<NumCircle>(&b)) return intersect(*la, *kb, e);
        if (auto* ab = std::get_if<NumArcPair>(&b)) return intersect(*ab, *la, e);
    }
    if (auto* ka = std::get_if<NumCircle>(&a)) {
        if (auto* lb = std::get_if<NumLine>(&b)) return intersect(*lb, *ka, e);
        if (auto* kb = std::get_if<NumCircle>(&b)) return intersect(*ka, *kb, e);
        if (auto* ab = std::get_if<NumArcPair>(&b)) return intersect(*ab, *ka, e);
    }
    if (auto* aa = std::get_if<NumArcPair>(&a)) {
        if (auto* lb = std::get_if<NumLine>(&b)) return intersect(*aa, *lb, e);
        if (auto* kb = std::get_if<NumCircle>(&b)) return intersect(*aa, *kb, e);
    }
    throw geom_error(GeomErr::DegenerateInput, "unsupported locus pair for intersection");
}

double ray_angle(Vec2 x, Vec2 s, Vec2 y) {
    Vec2 u = x - s;
    Vec2 v = y - s;
    double c = dot(u, v) / (norm(u) * norm(v));
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

double line_angle(const NumLine& a, const NumLine& b) {
    double c = std::abs(dot(a.normal, b.normal));
    return std::acos(std::clamp(c, 0.0, 1.0));
}

bool approx(double a, double b, double eps) { return std::abs(a - b) <= eps; }
bool approx(Vec2 a, Vec2 b, double eps) { return dist(a, b) <= eps; }
bool approx(const NumLine& a, const NumLine& b, double eps) {
    bool same = norm(a.normal - b.normal) <= eps && std::abs(a.offset - b.offset) <= eps;
    bool flipped = norm(a.normal + b.normal) <= eps && std::abs(a.offset + b.offset) <= eps;
    return same || flipped;
}
bool approx(const NumCircle& a, const NumCircle& b, double eps) {
    return dist(a.center, b.center) <= eps && std::abs(a.radius - b.radius) <= eps;
}
bool approx(const Value& a, const Value& b, double eps) {
    if (a.index() != b.index()) return false;
    if (auto* p = std::get_if<Vec2>(&a)) return approx(*p, std::get<Vec2>(b), eps);
    if (auto* l = std::get_if<NumLine>(&a)) return approx(*l, std::get<NumLine>(b), eps);
    if (auto* k = std::get_if<NumCircle>(&a)) return approx(*k, std::get<NumCircle>(b), eps);
    if (auto* r = std::get_if<NumArcPair>(&a)) {
        const auto& s = std::get<NumArcPair>(b);
        return approx(r->base_x, s.base_x, eps) && approx(r->base_y, s.base_y, eps) &&
               approx(r->angle, s.angle, eps);
    }
    return approx(std::get<double>(a), std::get<double>(b), eps);
}

bool on_value(const Value& locus, Vec2 p, double eps) {
    if (auto* l = std::get_if<NumLine>(&locus)) return std::abs(l->signed_dist(p)) <= eps;
    if (auto* k = std::get_if<NumCircle>(&locus)) return std::abs(dist(p, k->center) - k->radius) <= eps;
    if (auto* a = std::get_if<NumArcPair>(&locus)) return on_locus(*a, p, Eps{});
    return false;
}

const std::vector<std::string>& point_labels() {
    static const std::vector<std::string> labels = {
        "A", "B", "C", "O", "Ma", "Mb", "Mc", "G", "Ha", "Hb", "Hc", "H",
        "Ta", "Tb", "Tc", "I", "T'a", "T'b", "T'c", "H'BC", "H'AC", "H'AB",
        "Pa", "Pb", "Pc", "Na", "Nb", "Nc"};
    return labels;
}

namespace {

Vec2 foot(Vec2 p, const NumLine& l) { return p - l.signed_dist(p) * l.normal; }

// Arc midpoint of chord pq on circle k, on the opposite side of line pq
// from the reference point.
Vec2 arc_midpoint(const NumCircle& k, Vec2 p, Vec2 q, Vec2 opposite_to, const Eps& e) {
    NumLine chord = line_through(p, q, e);
    Vec2 n = chord.normal;
    Vec2 c1 = k.center + k.radius * n;
    Vec2 c2 = k.center - k.radius * n;
    double side = chord.signed_dist(opposite_to);
    return chord.signed_dist(c1) * side < 0 ? c1 : c2;
}

} // namespace

std::map<std::string, Vec2> characteristic_points(Vec2 a, Vec2 b, Vec2 c, const Eps& e) {
    double span = std::max({dist(a, b), dist(b, c), dist(a, c)});
    if (span <= e.deg() || std::abs(cross(b - a, c - a)) <= e.deg() * span)
        throw geom_error(GeomErr::DegenerateTriangle, "characteristic points of a degenerate triangle");

    std::map<std::string, Vec2> m;
    m["A"] = a; m["B"] = b; m["C"] = c;
    m["Ma"] = midpoint(b, c);
    m["Mb"] = midpoint(c, a);
    m["Mc"] = midpoint(a, b);
    m["G"] = {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};

    NumCircle circ = circumcircle(a, b, c, e);
    m["O"] = circ.center;
    m["H"] = a + b + c - 2.0 * circ.center;

    NumLine bc = line_through(b, c, e);
    NumLine ca = line_through(c, a, e);
    NumLine ab = line_through(a, b, e);
    m["Ha"] = foot(a, bc);
    m["Hb"] = foot(b, ca);
    m["Hc"] = foot(c, ab);

    double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    m["Ta"] = (1.0 / (lb + lc)) * (lb * b + lc * c);
    m["Tb"] = (1.0 / (lc + la)) * (lc * c + la * a);
    m["Tc"] = (1.0 / (la + lb)) * (la * a + lb * b);
    m["I"] = (1.0 / (la + lb + lc)) * (la * a + lb * b + lc * c);

    if (std::abs(lc - lb) > e.deg()) m["T'a"] = (1.0 / (lc - lb)) * (lc * c - lb * b);
    if (std::abs(la - lc) > e.deg()) m["T'b"] = (1.0 / (la - lc)) * (la * a - lc * c);
    if (std::abs(lb - la) > e.deg()) m["T'c"] = (1.0 / (lb - la)) * (lb * b - la * a);

    m["H'BC"] = reflect(m["H"], bc);
    m["H'AC"] = reflect(m["H"], ca);
    m["H'AB"] = reflect(m["H"], ab);

    m["Pa"] = foot(m["I"], bc);
    m["Pb"] = foot(m["I"], ca);
    m["Pc"] = foot(m["I"], ab);

    m["Na"] = arc_midpoint(circ, b, c, a, e);
    m["Nb"] = arc_midpoint(circ, c, a, b, e);
    m["Nc"] = arc_midpoint(circ, a, b, c, e);
    return m;
}

} // namespace wernick::geom
