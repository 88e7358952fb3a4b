#include "wernick/kb.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>
#include <sstream>

namespace wernick {

void Vocab::add(const std::string& name) {
    if (idx.count(name)) throw ValidationError("duplicate point declaration: " + name);
    idx[name] = int(order.size());
    order.push_back(name);
}

int Vocab::index_of(const std::string& name) const {
    auto it = idx.find(name);
    if (it == idx.end()) throw ValidationError("unknown point label: " + name);
    return it->second;
}

namespace {

std::string head_of(const Ref& r) {
    auto p = r.find('(');
    return p == std::string::npos ? std::string() : r.substr(0, p);
}

std::string inner_of(const Ref& r) {
    auto p = r.find('(');
    if (p == std::string::npos || r.back() != ')') return {};
    return r.substr(p + 1, r.size() - p - 2);
}

} // namespace

Kind ref_kind(const Ref& r) {
    std::string h = head_of(r);
    if (h.empty()) return Kind::Point;
    if (h == "line" || h == "pbis" || h == "hom") return Kind::Line;
    if (h == "circ" || h == "diam") return Kind::Circle;
    if (h == "arc") return Kind::Arc;
    if (h == "ang") return Kind::Angle;
    throw ValidationError("unknown object form: " + r);
}

std::vector<std::string> ref_components(const Ref& r) {
    std::vector<std::string> out;
    std::string inner = inner_of(r);
    int depth = 0;
    std::string cur;
    for (char c : inner) {
        if (c == '(') depth++;
        if (c == ')') depth--;
        if (c == ',' && depth == 0) { out.push_back(cur); cur.clear(); continue; }
        cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool is_named_line(const Ref& r) { return head_of(r) == "line"; }

std::string AngleExpr::str() const {
    std::string s;
    if (!base.empty()) s += coeff.str() + "*" + base;
    if (!pi_coeff.is_zero() || base.empty()) {
        if (!s.empty()) s += "+";
        s += pi_coeff.str() + "*pi";
    }
    return s;
}

double AngleExpr::eval(double base_measure) const {
    const double pi = 3.14159265358979323846;
    double v = pi_coeff.value() * pi;
    if (!base.empty()) v += coeff.value() * base_measure;
    return v;
}

AngleExpr AngleExpr::parse(const std::string& s) {
    AngleExpr e;
    // forms: "c*ang(...)", "c*ang(...)+k*pi", "k*pi"
    auto plus = s.find("+", s.find(')') == std::string::npos ? 0 : s.find(')'));
    std::string first = plus == std::string::npos ? s : s.substr(0, plus);
    std::string second = plus == std::string::npos ? std::string() : s.substr(plus + 1);
    auto parse_term = [&e](const std::string& t) {
        auto star = t.find('*');
        std::string c = star == std::string::npos ? "1" : t.substr(0, star);
        std::string tail = star == std::string::npos ? t : t.substr(star + 1);
        if (tail == "pi") e.pi_coeff = Rat::parse(c);
        else { e.coeff = Rat::parse(c); e.base = tail; }
    };
    parse_term(first);
    if (!second.empty()) parse_term(second);
    return e;
}

namespace {

std::pair<Ref, Ref> sorted_pair(const Vocab& v, const Ref& p, const Ref& q) {
    return v.index_of(p) <= v.index_of(q) ? std::make_pair(p, q) : std::make_pair(q, p);
}

} // namespace

Ref mk_line(const Vocab& v, const Ref& p, const Ref& q) {
    if (p == q) throw ValidationError("line with equal defining points: " + p);
    auto [a, b] = sorted_pair(v, p, q);
    return "line(" + a + "," + b + ")";
}

Ref mk_pbis(const Vocab& v, const Ref& p, const Ref& q) {
    auto [a, b] = sorted_pair(v, p, q);
    return "pbis(" + a + "," + b + ")";
}

Ref mk_circ(const Ref& center, const Ref& through) {
    return "circ(" + center + "," + through + ")";
}

Ref mk_diam(const Vocab& v, const Ref& p, const Ref& q) {
    auto [a, b] = sorted_pair(v, p, q);
    return "diam(" + a + "," + b + ")";
}

Ref mk_hom(const Ref& center, const Rat& r, const Ref& base) {
    return "hom(" + center + "," + r.str() + "," + base + ")";
}

Ref mk_ang(const Vocab& v, const Ref& x, const Ref& vertex, const Ref& y) {
    auto [a, b] = sorted_pair(v, x, y);
    return "ang(" + a + "," + vertex + "," + b + ")";
}

Ref mk_arc(const Vocab& v, const Ref& x, const Ref& y, const AngleExpr& e) {
    auto [a, b] = sorted_pair(v, x, y);
    return "arc(" + a + "," + b + "," + e.str() + ")";
}

std::pair<Ref, Ref> line_points(const Ref& r) {
    auto c = ref_components(r);
    return {c[0], c[1]};
}
std::pair<Ref, Ref> circ_parts(const Ref& r) {
    auto c = ref_components(r);
    return {c[0], c[1]};
}
std::pair<Ref, Ref> diam_points(const Ref& r) {
    auto c = ref_components(r);
    return {c[0], c[1]};
}
HomParts hom_parts(const Ref& r) {
    auto c = ref_components(r);
    return {c[0], Rat::parse(c[1]), c[2]};
}
ArcParts arc_parts(const Ref& r) {
    auto c = ref_components(r);
    return {c[0], c[1], AngleExpr::parse(c[2])};
}
AngParts ang_parts(const Ref& r) {
    auto c = ref_components(r);
    return {c[0], c[1], c[2]};
}

std::string ref_sort_key(const Vocab& v, const Ref& r) {
    switch (ref_kind(r)) {
        case Kind::Point: {
            char buf[8];
            std::snprintf(buf, sizeof buf, "0%02d", v.index_of(r));
            return buf;
        }
        case Kind::Line: {
            std::string h = head_of(r);
            std::string rank = h == "line" ? "1L" : (h == "pbis" ? "1S" : "1H");
            std::string key = rank + "(";
            for (const auto& c : ref_components(r)) {
                if (ref_kind(c) == Kind::Point && v.has(c)) key += ref_sort_key(v, c) + ",";
                else if (c.find('(') != std::string::npos) key += ref_sort_key(v, c) + ",";
                else key += c + ",";
            }
            return key + ")";
        }
        case Kind::Circle: {
            std::string key = (head_of(r) == "circ" ? "2C(" : "2D(");
            auto c = ref_components(r);
            return key + ref_sort_key(v, c[0]) + "," + ref_sort_key(v, c[1]) + ")";
        }
        case Kind::Arc: {
            auto c = ref_components(r);
            return "3A(" + ref_sort_key(v, c[0]) + "," + ref_sort_key(v, c[1]) + "," + c[2] + ")";
        }
        case Kind::Angle: {
            auto c = ref_components(r);
            return "4G(" + ref_sort_key(v, c[0]) + "," + ref_sort_key(v, c[1]) + "," +
                   ref_sort_key(v, c[2]) + ")";
        }
    }
    return r;
}

std::string Fact::key() const {
    std::string s = std::to_string(int(pred));
    for (const auto& a : args) s += "|" + a;
    if (pred == Pred::VecRatio) s += "|" + r.str();
    return s;
}

namespace {

const char* pred_name(Pred p) {
    switch (p) {
        case Pred::OnLine: return "online";
        case Pred::OnCircle: return "oncircle";
        case Pred::OnArc: return "onarc";
        case Pred::Perp: return "perp";
        case Pred::VecRatio: return "vecratio";
        case Pred::Harmonic: return "harmonic";
        case Pred::Tangent: return "tangent";
        case Pred::Bisects: return "bisects";
        case Pred::ReflectionOf: return "reflectionof";
        case Pred::PerpBisector: return "perpbisector";
    }
    return "?";
}

} // namespace

std::string Fact::str() const {
    std::string s = pred_name(pred);
    for (const auto& a : args) s += " " + a;
    if (pred == Pred::VecRatio) s += " " + r.str();
    return s;
}

std::vector<Fact> vecratio_variants(const Fact& f) {
    const Ref &x = f.args[0], &y = f.args[1], &z = f.args[2], &w = f.args[3];
    Fact v1 = f;
    Fact v2 = f; v2.args = {y, x, w, z};
    Fact v3 = f; v3.args = {z, w, x, y}; v3.r = f.r.inverse();
    Fact v4 = f; v4.args = {w, z, y, x}; v4.r = f.r.inverse();
    return {v1, v2, v3, v4};
}

Fact canonical_fact(const Vocab& v, Fact f) {
    auto key_less = [&](const std::vector<Ref>& a, const Rat& ra,
                        const std::vector<Ref>& b, const Rat& rb) {
        for (std::size_t i = 0; i < a.size(); i++) {
            auto ka = ref_sort_key(v, a[i]), kb = ref_sort_key(v, b[i]);
            if (ka != kb) return ka < kb;
        }
        return ra < rb;
    };
    switch (f.pred) {
        case Pred::VecRatio: {
            auto vars = vecratio_variants(f);
            Fact best = vars[0];
            for (const auto& g : vars)
                if (key_less(g.args, g.r, best.args, best.r)) best = g;
            return best;
        }
        case Pred::Harmonic: {
            const Ref &x = f.args[0], &y = f.args[1], &z = f.args[2], &w = f.args[3];
            std::vector<std::vector<Ref>> orbit = {
                {x, y, z, w}, {y, x, w, z}, {z, w, x, y}, {w, z, y, x}};
            auto best = orbit[0];
            for (const auto& g : orbit) if (key_less(g, f.r, best, f.r)) best = g;
            f.args = best;
            return f;
        }
        case Pred::Perp: {
            if (ref_sort_key(v, f.args[1]) < ref_sort_key(v, f.args[0]))
                std::swap(f.args[0], f.args[1]);
            return f;
        }
        case Pred::PerpBisector: {
            if (ref_sort_key(v, f.args[2]) < ref_sort_key(v, f.args[1]))
                std::swap(f.args[1], f.args[2]);
            return f;
        }
        default: return f;
    }
}

void KnowledgeBase::register_object(const Ref& r, bool with_implicit_facts) {
    if (has_object(r)) return;
    Kind k = ref_kind(r);
    if (k == Kind::Point && !vocab.has(r)) throw ValidationError("unknown point label: " + r);
    object_kind[r] = k;
    objects.push_back(r);
    if (!with_implicit_facts) return;

    std::string h = head_of(r);
    auto imp = [&](Pred p, std::vector<Ref> args) {
        Fact f{p, std::move(args), Rat(), true, "implicit " + r};
        add_fact(std::move(f));
    };
    if (h == "line") {
        auto [p, q] = line_points(r);
        imp(Pred::OnLine, {p, r});
        imp(Pred::OnLine, {q, r});
    } else if (h == "pbis") {
        auto [p, q] = line_points(r);
        imp(Pred::PerpBisector, {r, p, q});
    } else if (h == "circ") {
        auto [c, t] = circ_parts(r);
        register_object(c);
        imp(Pred::OnCircle, {t, r});
    } else if (h == "diam") {
        auto [p, q] = diam_points(r);
        imp(Pred::OnCircle, {p, r});
        imp(Pred::OnCircle, {q, r});
    } else if (h == "ang") {
        auto a = ang_parts(r);
        register_object(mk_line(vocab, a.vertex, a.x));
        register_object(mk_line(vocab, a.vertex, a.y));
    } else if (h == "arc") {
        auto a = arc_parts(r);
        if (!a.expr.base.empty()) register_object(a.expr.base);
    } else if (h == "hom") {
        auto hp = hom_parts(r);
        register_object(hp.center);
        register_object(hp.base);
    }
}

bool KnowledgeBase::add_fact(Fact f) {
    f = canonical_fact(vocab, std::move(f));
    if (fact_keys_.count(f.key())) return false;
    if (facts.size() >= fact_cap)
        throw ClosureBudgetExceeded("fact base exceeded cap of " + std::to_string(fact_cap));
    for (const auto& a : f.args) register_object(a);
    fact_keys_.insert(f.key());
    facts.push_back(std::move(f));
    return true;
}

bool KnowledgeBase::contains(const Fact& f) const {
    return fact_keys_.count(canonical_fact(vocab, f).key()) > 0;
}

void KnowledgeBase::finalize() {
    points_on.clear();
    loci_of.clear();
    for (const auto& f : facts) {
        if (f.pred == Pred::OnLine || f.pred == Pred::OnCircle || f.pred == Pred::OnArc) {
            auto& pts = points_on[f.args[1]];
            if (std::find(pts.begin(), pts.end(), f.args[0]) == pts.end())
                pts.push_back(f.args[0]);
            auto& ls = loci_of[f.args[0]];
            if (std::find(ls.begin(), ls.end(), f.args[1]) == ls.end())
                ls.push_back(f.args[1]);
        }
    }
    auto less = [this](const Ref& a, const Ref& b) { return ref_less(a, b); };
    for (auto& [k, pts] : points_on) std::sort(pts.begin(), pts.end(), less);
    for (auto& [k, ls] : loci_of) std::sort(ls.begin(), ls.end(), less);
}

const std::string& KnowledgeBase::sort_key(const Ref& r) const {
    auto it = key_cache_.find(r);
    if (it != key_cache_.end()) return it->second;
    return key_cache_.emplace(r, ref_sort_key(vocab, r)).first->second;
}

bool KnowledgeBase::ref_less(const Ref& a, const Ref& b) const {
    return sort_key(a) < sort_key(b);
}

const RuleSpec* KnowledgeBase::rule_by_id(const std::string& id) const {
    for (const auto& r : rules)
        if (r.id == id) return &r;
    return nullptr;
}

std::vector<Fact> KnowledgeBase::definition_facts() const {
    std::vector<Fact> out;
    for (const auto& f : facts)
        if (!f.implicit_ && f.origin.rfind("def", 0) == 0) out.push_back(f);
    return out;
}

std::vector<Fact> KnowledgeBase::lemma_facts() const {
    std::vector<Fact> out;
    for (const auto& f : facts)
        if (!f.implicit_ && f.origin.rfind("lemma", 0) == 0) out.push_back(f);
    return out;
}

// ---------------------------------------------------------------------------
// Rational expression templates

Rat RatExpr::eval(const std::map<std::string, Rat>& env) const {
    switch (op) {
        case Op::Lit: return lit;
        case Op::Var: {
            auto it = env.find(var);
            if (it == env.end()) throw ValidationError("unbound ratio variable ?" + var);
            return it->second;
        }
        case Op::Neg: return -a->eval(env);
        case Op::Add: return a->eval(env) + b->eval(env);
        case Op::Sub: return a->eval(env) - b->eval(env);
        case Op::Mul: return a->eval(env) * b->eval(env);
        case Op::Div: return a->eval(env) / b->eval(env);
    }
    throw ValidationError("bad ratio expression");
}

namespace {

struct ExprParser {
    const std::string& s;
    std::size_t i = 0;
    explicit ExprParser(const std::string& str) : s(str) {}

    void skip() { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) i++; }
    bool eat(char c) { skip(); if (i < s.size() && s[i] == c) { i++; return true; } return false; }

    std::shared_ptr<const RatExpr> parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (eat('+')) {
                auto e = std::make_shared<RatExpr>();
                e->op = RatExpr::Op::Add; e->a = lhs; e->b = parse_term(); lhs = e;
            } else if (eat('-')) {
                auto e = std::make_shared<RatExpr>();
                e->op = RatExpr::Op::Sub; e->a = lhs; e->b = parse_term(); lhs = e;
            } else break;
        }
        return lhs;
    }

    std::shared_ptr<const RatExpr> parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            if (eat('*')) {
                auto e = std::make_shared<RatExpr>();
                e->op = RatExpr::Op::Mul; e->a = lhs; e->b = parse_factor(); lhs = e;
            } else if (eat('/')) {
                auto e = std::make_shared<RatExpr>();
                e->op = RatExpr::Op::Div; e->a = lhs; e->b = parse_factor(); lhs = e;
            } else break;
        }
        return lhs;
    }

    std::shared_ptr<const RatExpr> parse_factor() {
        skip();
        if (eat('-')) {
            auto e = std::make_shared<RatExpr>();
            e->op = RatExpr::Op::Neg; e->a = parse_factor();
            return e;
        }
        if (eat('(')) {
            auto e = parse_expr();
            if (!eat(')')) throw ValidationError("unbalanced parens in ratio expression: " + s);
            return e;
        }
        if (i < s.size() && s[i] == '?') {
            i++;
            std::string name;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])))) name += s[i++];
            auto e = std::make_shared<RatExpr>();
            e->op = RatExpr::Op::Var; e->var = name;
            return e;
        }
        std::string num;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])))) num += s[i++];
        if (num.empty()) throw ValidationError("bad ratio expression: " + s);
        auto e = std::make_shared<RatExpr>();
        e->op = RatExpr::Op::Lit; e->lit = Rat::parse(num);
        return e;
    }
};

} // namespace

std::shared_ptr<const RatExpr> RatExpr::parse(const std::string& s) {
    ExprParser p(s);
    auto e = p.parse_expr();
    p.skip();
    if (p.i != s.size()) throw ValidationError("trailing junk in ratio expression: " + s);
    return e;
}

std::string Ndg::str() const {
    static const char* names[] = {"distinct", "noncollinear", "notonline",
                                  "intersects", "outsidecircle", "nonzeroangle"};
    std::string s = names[int(kind)];
    s += "(";
    for (std::size_t i = 0; i < args.size(); i++) s += (i ? "," : "") + args[i];
    return s + ")";
}

// ---------------------------------------------------------------------------
// DSL parser

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    bool in_str = false;
    for (char c : line) {
        if (in_str) { cur += c; if (c == '"') { in_str = false; } continue; }
        if (c == '"') { cur += c; in_str = true; continue; }
        if (c == '(') depth++;
        if (c == ')') depth--;
        if (std::isspace(static_cast<unsigned char>(c)) && depth == 0) {
            if (!cur.empty()) { out.push_back(cur); cur.clear(); }
        } else cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// Canonicalize a ref written in the DSL (sorting symmetric component pairs).
Ref parse_ref(const Vocab& v, const std::string& s) {
    Kind k = ref_kind(s);
    if (k == Kind::Point) {
        if (!v.has(s)) throw ValidationError("unknown point label: " + s);
        return s;
    }
    if (s.back() != ')') throw ValidationError("malformed object: " + s);
    auto c = ref_components(s);
    std::string h = head_of(s);
    auto want = [&](std::size_t n) {
        if (c.size() != n) throw ValidationError("malformed object: " + s);
    };
    if (h == "line") { want(2); return mk_line(v, parse_ref(v, c[0]), parse_ref(v, c[1])); }
    if (h == "pbis") { want(2); return mk_pbis(v, parse_ref(v, c[0]), parse_ref(v, c[1])); }
    if (h == "circ") { want(2); return mk_circ(parse_ref(v, c[0]), parse_ref(v, c[1])); }
    if (h == "diam") { want(2); return mk_diam(v, parse_ref(v, c[0]), parse_ref(v, c[1])); }
    if (h == "ang") {
        want(3);
        return mk_ang(v, parse_ref(v, c[0]), parse_ref(v, c[1]), parse_ref(v, c[2]));
    }
    if (h == "hom") { want(3); return mk_hom(parse_ref(v, c[0]), Rat::parse(c[1]), parse_ref(v, c[2])); }
    if (h == "arc") {
        want(3);
        return mk_arc(v, parse_ref(v, c[0]), parse_ref(v, c[1]), AngleExpr::parse(c[2]));
    }
    throw ValidationError("unknown object form: " + s);
}

std::optional<Pred> pred_by_name(const std::string& s) {
    if (s == "online") return Pred::OnLine;
    if (s == "oncircle") return Pred::OnCircle;
    if (s == "onarc") return Pred::OnArc;
    if (s == "perp") return Pred::Perp;
    if (s == "vecratio") return Pred::VecRatio;
    if (s == "harmonic") return Pred::Harmonic;
    if (s == "tangent") return Pred::Tangent;
    if (s == "bisects") return Pred::Bisects;
    if (s == "reflectionof") return Pred::ReflectionOf;
    if (s == "perpbisector") return Pred::PerpBisector;
    return std::nullopt;
}

// Parses one fact expression (tokens after "def"/"lemma"), expanding sugar.
std::vector<Fact> parse_factexpr(const Vocab& v, const std::vector<std::string>& t,
                                 const std::string& origin) {
    if (t.empty()) throw ValidationError("empty fact expression");
    const std::string& p = t[0];
    auto ref = [&](std::size_t i) {
        if (i >= t.size()) throw ValidationError("too few arguments for " + p);
        return parse_ref(v, t[i]);
    };
    std::vector<Fact> out;
    auto one = [&](Pred pr, std::vector<Ref> args, Rat r = Rat()) {
        out.push_back(Fact{pr, std::move(args), r, false, origin});
    };
    if (p == "online") one(Pred::OnLine, {ref(1), ref(2)});
    else if (p == "oncircle") one(Pred::OnCircle, {ref(1), ref(2)});
    else if (p == "perp") one(Pred::Perp, {ref(1), ref(2)});
    else if (p == "vecratio") one(Pred::VecRatio, {ref(1), ref(2), ref(3), ref(4)}, Rat::parse(t.at(5)));
    else if (p == "harmonic") one(Pred::Harmonic, {ref(1), ref(2), ref(3), ref(4)});
    else if (p == "tangent") one(Pred::Tangent, {ref(1), ref(2)});
    else if (p == "bisects") one(Pred::Bisects, {ref(1), ref(2)});
    else if (p == "reflectionof") one(Pred::ReflectionOf, {ref(1), ref(2), ref(3)});
    else if (p == "seesangle") {
        // seesangle S X Y coeff base pi_coeff ; base "none" for constants
        AngleExpr e;
        e.coeff = Rat::parse(t.at(4));
        if (t.at(5) != "none") e.base = parse_ref(v, t[5]);
        e.pi_coeff = Rat::parse(t.at(6));
        Ref arc = mk_arc(v, ref(2), ref(3), e);
        one(Pred::OnArc, {ref(1), arc});
    } else if (p == "linethrough") {
        Ref l = ref(1);
        one(Pred::OnLine, {ref(2), l});
        one(Pred::OnLine, {ref(3), l});
    } else if (p == "perpat") {
        Ref l = ref(1), m = ref(2), l2 = ref(3);
        one(Pred::Perp, {l, l2});
        one(Pred::OnLine, {m, l});
        one(Pred::OnLine, {m, l2});
    } else if (p == "circlecenterthrough") {
        Ref k = ref(1);
        if (k != mk_circ(ref(2), ref(3))) throw ValidationError("circle name does not match its parts");
        one(Pred::OnCircle, {ref(3), k});
    } else if (p == "diametercircle") {
        Ref k = ref(1);
        if (k != mk_diam(v, ref(2), ref(3))) throw ValidationError("circle name does not match its parts");
        one(Pred::OnCircle, {ref(2), k});
        one(Pred::OnCircle, {ref(3), k});
    } else throw ValidationError("unknown predicate: " + p);
    return out;
}

ArgPat parse_argpat(const std::string& s) {
    ArgPat a;
    if (!s.empty() && s[0] == '?') { a.t = ArgPat::T::Var; a.var = s.substr(1); return a; }
    std::string h = head_of(s);
    if (h == "line") {
        auto c = ref_components(s);
        if (c[0][0] == '?' || c[1][0] == '?') {
            a.t = ArgPat::T::LineOf;
            a.x = c[0].substr(1);
            a.y = c[1].substr(1);
            return a;
        }
    }
    if (h == "hom") {
        auto c = ref_components(s);
        a.t = ArgPat::T::HomOf;
        a.hcenter = c[0].substr(1);
        a.hratio = RatExpr::parse(c[1].substr(1, c[1].size() - 2)); // strip { }
        a.hbase = c[2].substr(1);
        return a;
    }
    a.t = ArgPat::T::Concrete;
    a.concrete = s;
    return a;
}

AtomPat parse_atom(const Vocab& v, std::vector<std::string> t) {
    (void)v;
    AtomPat at;
    std::string head = t[0];
    if (head[0] == '!') { at.negated = true; head = head.substr(1); }
    auto pr = pred_by_name(head);
    if (!pr) throw ValidationError("unknown predicate in pattern: " + head);
    at.pred = *pr;
    std::size_t n_args = t.size() - 1;
    std::size_t n_refs = n_args;
    if (at.pred == Pred::VecRatio) n_refs = 4;
    for (std::size_t i = 1; i <= n_refs; i++) at.args.push_back(parse_argpat(t.at(i)));
    if (at.pred == Pred::VecRatio) {
        std::string rt = t.at(5);
        if (rt[0] == '?') at.rat_var = rt.substr(1);
        else if (rt[0] == '{') at.rat_expr = RatExpr::parse(rt.substr(1, rt.size() - 2));
        else { at.has_rat_lit = true; at.rat_lit = Rat::parse(rt); }
    }
    return at;
}

} // namespace

KnowledgeBase load_kb(const std::string& dsl_text, bool run_closure) {
    KnowledgeBase kb;
    std::istringstream in(dsl_text);
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ln++;
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto t = tokenize(line);
        if (t.empty()) continue;
        try {
            const std::string& dir = t[0];
            if (dir == "point") {
                if (t.size() != 2) throw ValidationError("point takes one name");
                if (!std::count(geom::point_labels().begin(), geom::point_labels().end(), t[1]))
                    throw ValidationError("point label without numeric semantics: " + t[1]);
                kb.vocab.add(t[1]);
                kb.register_object(t[1]);
            } else if (dir == "def" || dir == "lemma") {
                for (auto& f : parse_factexpr(kb.vocab, {t.begin() + 1, t.end()},
                                              dir + " @" + std::to_string(ln))) {
                    if (!f.implicit_ && !kb.add_fact(f))
                        throw ValidationError("duplicate fact: " + f.str());
                    kb.explicit_fact_count++;
                }
            } else if (dir == "generic") {
                // generic <id>: atom & atom & ... => atom
                GenericLemma g;
                g.id = t.at(1);
                if (!g.id.empty() && g.id.back() == ':') g.id.pop_back();
                std::vector<std::vector<std::string>> groups(1);
                bool concl = false;
                std::vector<std::string> concl_tokens;
                for (std::size_t i = 2; i < t.size(); i++) {
                    if (t[i] == "=>") { concl = true; continue; }
                    if (t[i] == "&") { if (!concl) groups.emplace_back(); continue; }
                    if (concl) concl_tokens.push_back(t[i]);
                    else groups.back().push_back(t[i]);
                }
                for (auto& gr : groups) {
                    if (gr.empty()) continue;
                    if (gr[0] == "named") { g.named_line_vars.push_back(gr.at(1).substr(1)); continue; }
                    g.premises.push_back(parse_atom(kb.vocab, gr));
                }
                if (concl_tokens.empty()) throw ValidationError("generic lemma without conclusion");
                g.conclusion = parse_atom(kb.vocab, concl_tokens);
                kb.generics.push_back(std::move(g));
            } else if (dir == "rule") {
                // rule <id> sem <sem> says "<template>"
                RuleSpec r;
                r.id = t.at(1);
                std::size_t i = 2;
                while (i < t.size()) {
                    if (t[i] == "sem") {
                        const std::string& s = t.at(i + 1);
                        static const std::map<std::string, Sem> sems = {
                            {"line_through", Sem::LineThrough}, {"circle_center", Sem::CircleCenter},
                            {"intersect", Sem::Intersect}, {"perp_through", Sem::PerpThrough},
                            {"reflect_point", Sem::ReflectPoint}, {"ratio_point", Sem::RatioPoint},
                            {"perp_bisector", Sem::PerpBisector}, {"diameter_circle", Sem::DiameterCircle},
                            {"circumcircle", Sem::Circumcircle}, {"tangent_circle", Sem::TangentCircle},
                            {"tangent_line", Sem::TangentLine}, {"angle_bisector", Sem::AngleBisector},
                            {"mirror_side", Sem::MirrorSide}, {"homothety", Sem::Homothety},
                            {"harmonic_point", Sem::HarmonicPoint},
                            {"angle_measure", Sem::AngleMeasure}, {"angle_locus", Sem::AngleLocus}};
                        auto it = sems.find(s);
                        if (it == sems.end()) throw ValidationError("unknown rule semantics: " + s);
                        r.sem = it->second;
                        i += 2;
                    } else if (t[i] == "says") {
                        std::string s = t.at(i + 1);
                        if (s.size() < 2 || s.front() != '"' || s.back() != '"')
                            throw ValidationError("says template must be quoted");
                        r.sentence = s.substr(1, s.size() - 2);
                        i += 2;
                    } else throw ValidationError("unknown rule attribute: " + t[i]);
                }
                kb.rules.push_back(std::move(r));
            } else if (dir == "option") {
                if (t.at(1) == "fact_cap") kb.fact_cap = std::stoul(t.at(2));
                else throw ValidationError("unknown option: " + t.at(1));
            } else {
                throw ValidationError("unknown directive: " + dir);
            }
        } catch (const ValidationError& e) {
            throw ParseError(ln, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(ln, e.what());
        } catch (const std::out_of_range&) {
            throw ParseError(ln, "too few tokens");
        }
    }
    if (run_closure) close_generic(kb);
    kb.finalize();
    return kb;
}

// ---------------------------------------------------------------------------
// Generic-lemma closure

namespace {

struct Bindings {
    std::map<std::string, Ref> refs;
    std::map<std::string, Rat> rats;
};

void untrail(Bindings& b, std::vector<std::string>& trail, std::size_t mark) {
    while (trail.size() > mark) {
        b.refs.erase(trail.back());
        trail.pop_back();
    }
}

bool bind_var(const std::string& var, const Ref& val, Bindings& b, std::vector<std::string>& trail) {
    auto it = b.refs.find(var);
    if (it != b.refs.end()) return it->second == val;
    b.refs[var] = val;
    trail.push_back(var);
    return true;
}

// Enumerates every way to unify pattern args[i..] with values, continuing
// with k; LineOf patterns branch over the two point orderings.
void unify_args(const KnowledgeBase& kb, const std::vector<ArgPat>& pats,
                const std::vector<Ref>& vals, std::size_t i, Bindings& b,
                std::vector<std::string>& trail, const std::function<void()>& k) {
    if (i == pats.size()) { k(); return; }
    const ArgPat& pat = pats[i];
    const Ref& val = vals[i];
    std::size_t mark = trail.size();
    switch (pat.t) {
        case ArgPat::T::Var:
            if (bind_var(pat.var, val, b, trail))
                unify_args(kb, pats, vals, i + 1, b, trail, k);
            untrail(b, trail, mark);
            return;
        case ArgPat::T::Concrete:
            if (pat.concrete == val) unify_args(kb, pats, vals, i + 1, b, trail, k);
            return;
        case ArgPat::T::LineOf: {
            if (!is_named_line(val)) return;
            auto [p, q] = line_points(val);
            if (bind_var(pat.x, p, b, trail) && bind_var(pat.y, q, b, trail))
                unify_args(kb, pats, vals, i + 1, b, trail, k);
            untrail(b, trail, mark);
            if (bind_var(pat.x, q, b, trail) && bind_var(pat.y, p, b, trail))
                unify_args(kb, pats, vals, i + 1, b, trail, k);
            untrail(b, trail, mark);
            return;
        }
        case ArgPat::T::HomOf: return; // conclusion-only form
    }
}

Ref instantiate_arg(KnowledgeBase& kb, const ArgPat& pat, const Bindings& b) {
    switch (pat.t) {
        case ArgPat::T::Var: {
            auto it = b.refs.find(pat.var);
            if (it == b.refs.end()) throw ValidationError("unbound variable ?" + pat.var);
            return it->second;
        }
        case ArgPat::T::Concrete: return pat.concrete;
        case ArgPat::T::LineOf:
            return mk_line(kb.vocab, b.refs.at(pat.x), b.refs.at(pat.y));
        case ArgPat::T::HomOf: {
            Rat r = pat.hratio->eval(b.rats);
            if (r.is_zero()) throw std::domain_error("zero homothety ratio");
            return mk_hom(b.refs.at(pat.hcenter), r, b.refs.at(pat.hbase));
        }
    }
    throw ValidationError("bad argument pattern");
}

// Enumerates fact/variant matches of one positive premise.
void match_atom(const KnowledgeBase& kb, const AtomPat& at, Bindings& b,
                const std::function<void()>& k) {
    std::vector<std::string> trail;
    auto try_args = [&](const std::vector<Ref>& args, const Rat* r) {
        unify_args(kb, at.args, args, 0, b, trail, [&] {
            if (at.pred == Pred::VecRatio && r) {
                if (at.has_rat_lit) {
                    if (*r == at.rat_lit) k();
                    return;
                }
                if (!at.rat_var.empty()) {
                    auto it = b.rats.find(at.rat_var);
                    if (it != b.rats.end()) {
                        if (it->second == *r) k();
                        return;
                    }
                    b.rats[at.rat_var] = *r;
                    k();
                    b.rats.erase(at.rat_var);
                    return;
                }
            }
            k();
        });
    };
    for (const auto& f : kb.facts) {
        if (f.pred != at.pred) continue;
        if (f.pred == Pred::VecRatio) {
            for (const auto& var : vecratio_variants(f)) try_args(var.args, &var.r);
        } else if (f.pred == Pred::Perp) {
            try_args(f.args, nullptr);
            std::vector<Ref> rev = {f.args[1], f.args[0]};
            try_args(rev, nullptr);
        } else {
            try_args(f.args, nullptr);
        }
    }
}

bool premise_holds_negated(const KnowledgeBase& kb, const AtomPat& at, const Bindings& b) {
    // Negation as absence; all variables must be bound by now.
    Fact probe;
    probe.pred = at.pred;
    for (const auto& ap : at.args) {
        if (ap.t == ArgPat::T::Var) probe.args.push_back(b.refs.at(ap.var));
        else if (ap.t == ArgPat::T::Concrete) probe.args.push_back(ap.concrete);
        else throw ValidationError("composite pattern in negated premise");
    }
    return !kb.contains(probe);
}

} // namespace

void close_generic(KnowledgeBase& kb) {
    bool changed = true;
    int rounds = 0;
    while (changed) {
        changed = false;
        if (++rounds > 64)
            throw ClosureBudgetExceeded("generic closure did not stabilize in 64 rounds");
        for (const auto& g : kb.generics) {
            // Collect instantiations against the current snapshot first so a
            // round is well-defined, then insert.
            std::vector<Fact> pending;
            std::function<void(std::size_t, Bindings&)> step = [&](std::size_t i, Bindings& b) {
                if (i == g.premises.size()) {
                    for (const auto& var : g.named_line_vars) {
                        auto it = b.refs.find(var);
                        if (it == b.refs.end() || !is_named_line(it->second)) return;
                    }
                    Fact f;
                    f.pred = g.conclusion.pred;
                    try {
                        for (const auto& ap : g.conclusion.args)
                            f.args.push_back(instantiate_arg(kb, ap, b));
                        if (f.pred == Pred::VecRatio) {
                            if (g.conclusion.rat_expr) f.r = g.conclusion.rat_expr->eval(b.rats);
                            else if (!g.conclusion.rat_var.empty()) f.r = b.rats.at(g.conclusion.rat_var);
                            else f.r = g.conclusion.rat_lit;
                            if (f.r.is_zero()) return;
                        }
                    } catch (const std::domain_error&) {
                        return; // division by zero in ratio template: instantiation undefined
                    }
                    f.origin = "closure " + g.id;
                    pending.push_back(std::move(f));
                    return;
                }
                const AtomPat& at = g.premises[i];
                if (at.negated) {
                    if (premise_holds_negated(kb, at, b)) step(i + 1, b);
                    return;
                }
                match_atom(kb, at, b, [&] { step(i + 1, b); });
            };
            Bindings b;
            step(0, b);
            for (auto& f : pending)
                if (kb.add_fact(std::move(f))) changed = true;
        }
    }
}

} // namespace wernick
