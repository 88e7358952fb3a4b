#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wernick/geom.hpp"
#include "wernick/rational.hpp"

namespace wernick {

// Objects are canonical id strings:
//   points      A, Ma, T'a, H'AB, ...
//   lines       line(A,Ha)        defining points, vocabulary-sorted
//               pbis(A,B)         perpendicular bisector of a segment
//               hom(G,-2,line(B,C))  homothety image of a line
//   circles     circ(O,A)         center O through A (ordered)
//               diam(Ta,T'a)      circle with the segment as diameter
//   arcs        arc(Tb,Tc,1/2*ang(B,A,C)+1/2*pi)
//   angles      ang(B,A,C)        vertex in the middle, rays sorted
using Ref = std::string;

enum class Kind { Point, Line, Circle, Arc, Angle };

struct Vocab {
    std::vector<std::string> order;
    std::unordered_map<std::string, int> idx;

    void add(const std::string& name);
    bool has(const std::string& name) const { return idx.count(name) > 0; }
    int index_of(const std::string& name) const;
};

Kind ref_kind(const Ref& r);
std::vector<std::string> ref_components(const Ref& r); // top-level comma split
bool is_named_line(const Ref& r);                      // line(P,Q) form

// coeff * base + pi_coeff * pi; base empty for constant angles.
struct AngleExpr {
    Rat coeff;
    Ref base;
    Rat pi_coeff;

    std::string str() const;
    double eval(double base_measure) const;
    static AngleExpr parse(const std::string& s);
};

Ref mk_line(const Vocab& v, const Ref& p, const Ref& q);
Ref mk_pbis(const Vocab& v, const Ref& p, const Ref& q);
Ref mk_circ(const Ref& center, const Ref& through);
Ref mk_diam(const Vocab& v, const Ref& p, const Ref& q);
Ref mk_hom(const Ref& center, const Rat& r, const Ref& base);
Ref mk_ang(const Vocab& v, const Ref& x, const Ref& vertex, const Ref& y);
Ref mk_arc(const Vocab& v, const Ref& x, const Ref& y, const AngleExpr& e);

struct HomParts { Ref center; Rat ratio; Ref base; };
struct ArcParts { Ref x; Ref y; AngleExpr expr; };
struct AngParts { Ref x; Ref vertex; Ref y; };

std::pair<Ref, Ref> line_points(const Ref& r);  // line(...) and pbis(...)
std::pair<Ref, Ref> circ_parts(const Ref& r);   // circ(center, through)
std::pair<Ref, Ref> diam_points(const Ref& r);
HomParts hom_parts(const Ref& r);
ArcParts arc_parts(const Ref& r);
AngParts ang_parts(const Ref& r);

// Vocabulary-aware structural sort key; total order on refs.
std::string ref_sort_key(const Vocab& v, const Ref& r);

enum class Pred {
    OnLine, OnCircle, OnArc, Perp, VecRatio, Harmonic, Tangent,
    Bisects, ReflectionOf, PerpBisector
};

struct Fact {
    Pred pred;
    std::vector<Ref> args;
    Rat r;                 // VecRatio only
    bool implicit_ = false;
    std::string origin;

    std::string key() const;
    std::string str() const;
};

// The four reorientations of a vector-ratio fact (lemmas about reversal
// and inversion collapse onto one stored representative).
std::vector<Fact> vecratio_variants(const Fact& f);

struct ParseError : std::runtime_error {
    int line;
    ParseError(int ln, const std::string& what)
        : std::runtime_error("line " + std::to_string(ln) + ": " + what), line(ln) {}
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ClosureBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rational expression template used in generic-lemma conclusions.
struct RatExpr {
    enum class Op { Lit, Var, Neg, Add, Sub, Mul, Div };
    Op op = Op::Lit;
    Rat lit;
    std::string var;
    std::shared_ptr<const RatExpr> a, b;

    Rat eval(const std::map<std::string, Rat>& env) const;
    static std::shared_ptr<const RatExpr> parse(const std::string& s);
};

struct ArgPat {
    enum class T { Var, Concrete, LineOf, HomOf };
    T t = T::Var;
    std::string var;
    Ref concrete;
    std::string x, y;                    // LineOf
    std::string hcenter, hbase;          // HomOf
    std::shared_ptr<const RatExpr> hratio;
};

struct AtomPat {
    Pred pred;
    std::vector<ArgPat> args;
    bool negated = false;
    bool has_rat_lit = false;            // VecRatio premise with literal ratio
    Rat rat_lit;
    std::string rat_var;                 // or a ratio variable
    std::shared_ptr<const RatExpr> rat_expr; // conclusion ratio template
};

struct GenericLemma {
    std::string id;
    std::vector<AtomPat> premises;       // negated atoms act as guards
    std::vector<std::string> named_line_vars; // vars restricted to line(P,Q) objects
    AtomPat conclusion;
};

enum class Sem {
    LineThrough, CircleCenter, Intersect, PerpThrough, ReflectPoint,
    RatioPoint, PerpBisector, DiameterCircle, Circumcircle, TangentCircle,
    TangentLine, AngleBisector, MirrorSide, Homothety, HarmonicPoint,
    AngleMeasure, AngleLocus
};

struct RuleSpec {
    std::string id;
    Sem sem;
    std::string sentence; // $1..$n premise slots, $out, $r, $expr
};

enum class NdgKind { Distinct, NonCollinear, NotOnLine, Intersects, OutsideCircle, NonZeroAngle };

struct Ndg {
    NdgKind kind;
    std::vector<Ref> args;
    std::string str() const;
};

class KnowledgeBase {
public:
    Vocab vocab;
    std::vector<Fact> facts;
    std::vector<GenericLemma> generics;
    std::vector<RuleSpec> rules;
    std::size_t fact_cap = 100000;
    int explicit_fact_count = 0; // defs + lemmas as written, pre-closure

    // object table, in first-appearance order
    std::vector<Ref> objects;
    std::unordered_map<Ref, Kind> object_kind;

    bool has_object(const Ref& r) const { return object_kind.count(r) > 0; }
    void register_object(const Ref& r, bool with_implicit_facts = true);
    // Returns false if the fact (canonicalized) was already present.
    bool add_fact(Fact f);
    bool contains(const Fact& f) const;

    // The facts instantiated from the definitional / lemma sections, as
    // written (closure products and implicit facts excluded).
    std::vector<Fact> definition_facts() const;
    std::vector<Fact> lemma_facts() const;

    // indices, rebuilt by finalize()
    std::unordered_map<Ref, std::vector<Ref>> points_on; // locus -> points
    std::unordered_map<Ref, std::vector<Ref>> loci_of;   // point -> loci
    void finalize();

    const std::string& sort_key(const Ref& r) const;
    bool ref_less(const Ref& a, const Ref& b) const;

    const RuleSpec* rule_by_id(const std::string& id) const;

private:
    std::unordered_set<std::string> fact_keys_;
    mutable std::unordered_map<Ref, std::string> key_cache_;
};

Fact canonical_fact(const Vocab& v, Fact f);

// Parses the KB DSL; runs the generic-lemma closure unless deferred.
KnowledgeBase load_kb(const std::string& dsl_text, bool run_closure = true);

// Least fixpoint of the generic lemmas over the fact base; appends in
// deterministic derivation order. Throws ClosureBudgetExceeded past cap.
void close_generic(KnowledgeBase& kb);

// The shipped knowledge base (definitions, lemmas, rules).
const std::string& builtin_kb_text();

struct KbViolation {
    std::string fact;
    std::uint64_t seed;
    double residual;
};

struct KbCheckReport {
    int samples = 0;
    int checked_facts = 0;
    std::vector<KbViolation> violations;
    double max_residual = 0.0;
    bool ok() const { return violations.empty(); }
};

// Evaluates every fact on random non-degenerate triangles.
KbCheckReport numeric_check_kb(const KnowledgeBase& kb, int n_samples,
                               const geom::Tolerance& tol, std::uint64_t base_seed = 1);

// Numeric value of any admissible object over a concrete triangle.
geom::Value eval_object(const KnowledgeBase& kb, const Ref& r,
                        const std::map<std::string, geom::Vec2>& chars,
                        const geom::Eps& eps);

// Fixed generic scalene triangle used for admissibility pruning.
std::array<geom::Vec2, 3> reference_triangle();

// Random non-degenerate triangle (vertices uniform in [0,100]^2, minimum
// angle above 5 degrees, side ratio below 20, every characteristic point
// defined and bounded). Deterministic in the seed.
std::array<geom::Vec2, 3> sample_triangle(std::uint64_t seed);

// Bounding-box-diagonal scale of a triangle.
double triangle_scale(geom::Vec2 a, geom::Vec2 b, geom::Vec2 c);

// Residual of one fact over a concrete triangle (0 = holds exactly).
double fact_residual(const KnowledgeBase& kb, const Fact& f,
                     const std::map<std::string, geom::Vec2>& chars,
                     const geom::Eps& eps);

} // namespace wernick
