#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wernick/rational.hpp"

namespace wernick::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 normalized(Vec2 a) { double n = norm(a); return {a.x / n, a.y / n}; }
inline Vec2 midpoint(Vec2 a, Vec2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// Line {p : normal . p = offset}, |normal| = 1, sign canonicalized so equal
// lines produced along different routes compare close.
struct NumLine {
    Vec2 normal;
    double offset = 0.0;

    double signed_dist(Vec2 p) const { return dot(normal, p) - offset; }
    Vec2 direction() const { return perp(normal); }
    // Point of the line closest to the origin.
    Vec2 base_point() const { return offset * normal; }
};

struct NumCircle {
    Vec2 center;
    double radius = 0.0;
};

// The locus {S : angle XSY = alpha}, two open circular arcs symmetric
// about line XY. Stored by its defining data; carrier circles derived.
struct NumArcPair {
    Vec2 base_x;
    Vec2 base_y;
    double angle = 0.0; // radians, in (0, pi)
};

struct Tolerance {
    double rel = 1e-9;
    double degeneracy_floor = 1e-7;
};

// Numeric value of any constructed object; angles carry their measure.
using Value = std::variant<Vec2, NumLine, NumCircle, NumArcPair, double>;

enum class GeomErr {
    DegenerateInput,
    IdenticalObjects,
    PointNotOutside,
    ParallelLines,
    ZeroRatio,
    DegenerateTriangle,
};

struct geom_error : std::runtime_error {
    GeomErr kind;
    geom_error(GeomErr k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

// Tolerance context: scale is the scene's bounding-box diagonal (1 for
// unit-scale tests).
struct Eps {
    double scale = 1.0;
    Tolerance tol;

    double lin() const { return tol.rel * scale; }
    double deg() const { return tol.degeneracy_floor * scale; }
};

NumLine line_through(Vec2 p, Vec2 q, const Eps& e = {});
NumCircle circle_center_through(Vec2 c, Vec2 p, const Eps& e = {});
NumLine perp_bisector(Vec2 p, Vec2 q, const Eps& e = {});
NumLine perp_through(Vec2 p, const NumLine& l);
NumCircle diameter_circle(Vec2 p, Vec2 q, const Eps& e = {});
NumCircle circumcircle(Vec2 p, Vec2 q, Vec2 r, const Eps& e = {});
NumArcPair angle_locus(Vec2 x, Vec2 y, double alpha, const Eps& e = {});
Vec2 reflect(Vec2 p, const NumLine& l);
NumLine mirror_line(const NumLine& l, const NumLine& axis, const Eps& e = {});
NumCircle tangent_circle(Vec2 c, const NumLine& l, const Eps& e = {});
std::vector<NumLine> tangent_lines(Vec2 p, const NumCircle& k, const Eps& e = {});
NumLine angle_bisector(const NumLine& l1, const NumLine& l2, Vec2 region_hint, const Eps& e = {});
// Both bisectors of two intersecting lines, sorted canonically.
std::vector<NumLine> angle_bisectors(const NumLine& l1, const NumLine& l2, const Eps& e = {});
NumLine homothety_line(Vec2 center, Rat r, const NumLine& l, const Eps& e = {});
Vec2 ratio_point(Vec2 x, Vec2 y, Vec2 z, Rat r);
// Fourth harmonic point: w with xw/wy = -xz/zy as signed ratios on line xy.
Vec2 harmonic_conjugate(Vec2 x, Vec2 y, Vec2 z, const Eps& e = {});

// Intersections, lexicographically sorted by (x, y); throws IdenticalObjects
// when the loci coincide. Arc pairs admit up to four candidates before the
// on-locus filter.
std::vector<Vec2> intersect(const NumLine& a, const NumLine& b, const Eps& e = {});
std::vector<Vec2> intersect(const NumLine& a, const NumCircle& b, const Eps& e = {});
std::vector<Vec2> intersect(const NumCircle& a, const NumCircle& b, const Eps& e = {});
std::vector<Vec2> intersect(const NumArcPair& a, const NumLine& b, const Eps& e = {});
std::vector<Vec2> intersect(const NumArcPair& a, const NumCircle& b, const Eps& e = {});
std::vector<Vec2> intersect(const Value& a, const Value& b, const Eps& e = {});

// Measure of angle XSY from the rays S->X, S->Y, in [0, pi].
double ray_angle(Vec2 x, Vec2 s, Vec2 y);
// Folded angle between two lines, in [0, pi/2].
double line_angle(const NumLine& a, const NumLine& b);
bool on_locus(const NumArcPair& arc, Vec2 s, const Eps& e = {});
// Carrier circles (one when alpha = pi/2).
std::vector<NumCircle> arc_carriers(const NumArcPair& arc);

bool approx(double a, double b, double eps);
bool approx(Vec2 a, Vec2 b, double eps);
bool approx(const NumLine& a, const NumLine& b, double eps);
bool approx(const NumCircle& a, const NumCircle& b, double eps);
bool approx(const Value& a, const Value& b, double eps);
bool on_value(const Value& locus, Vec2 p, double eps);

// All 27 point labels, in canonical vocabulary order.
const std::vector<std::string>& point_labels();

// Coordinates of every characteristic point of triangle abc; external
// bisector feet are absent for triangles isosceles about that vertex.
std::map<std::string, Vec2> characteristic_points(Vec2 a, Vec2 b, Vec2 c, const Eps& e = {});

// Deterministic cross-platform RNG (splitmix64).
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

} // namespace wernick::geom
