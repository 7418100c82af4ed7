#include "zgkh/zigzag.hpp"

#include "zgkh/intlin.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

namespace zgkh {

// ------------------------------------------------------------ rationals

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (num == 0 && den == 0) throw precondition_error("0/0 is not a rational tangle");
    if (den == 0) {
        p = 1, q = 0;
        return;
    }
    if (den < 0) num = -num, den = -den;
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    p = num / g, q = den / g;
}

std::string Rational::to_string() const {
    if (is_infinite()) return "inf";
    if (q == 1) return std::to_string(p);
    return std::to_string(p) + "/" + std::to_string(q);
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s == "inf" || s == "infinity" || s == "1/0") return Rational::infinity();
    auto number = [&](const std::string& t) -> std::int64_t {
        std::size_t used = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(t, &used);
        } catch (const std::exception&) {
            throw parse_error("bad rational '" + text + "'");
        }
        if (used != t.size()) throw parse_error("bad rational '" + text + "'");
        return v;
    };
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(number(s), 1);
    std::int64_t den = number(s.substr(slash + 1));
    if (den == 0) throw parse_error("zero denominator in '" + text + "'");
    return Rational(number(s.substr(0, slash)), den);
}

std::pair<int, int> connectivity_parity(const Rational& x) {
    return {static_cast<int>(((x.p % 2) + 2) % 2), static_cast<int>(x.q % 2)};
}

// ------------------------------------------------------------ graphs

namespace {

bool is_saddle(Obj a, Obj b) { return a != b; }

// parities follow from alternation once one saddle edge is known to be odd
void assign_parity(ZigzagGraph& g) {
    int anchor = -1;
    for (std::size_t k = 0; k < g.edges.size(); ++k)
        if (is_saddle(g.vertices[k], g.vertices[k + 1])) {
            anchor = static_cast<int>(k);
            break;
        }
    if (anchor < 0) throw invariant_error("zigzag graph without saddle edge");
    for (std::size_t k = 0; k < g.edges.size(); ++k) g.edges[k].odd = (static_cast<int>(k) - anchor) % 2 == 0;
}

char vertex_char(Obj o) { return o == Obj::Inf ? 'o' : '*'; }

struct Gamma {
    std::vector<Obj> types;
    std::vector<bool> forward;  // relative to the source -> target frame
};

// the replacement of one edge when passing from zz(x) to zz(x + 1)
Gamma replacement(Obj s, Obj t, bool odd, bool s_end, bool t_end) {
    const Obj o = Obj::Inf, b = Obj::Zero;
    if (s == o && t == b) return {{o, o, b}, {true, true}};
    if (s == o && t == o) return {{o, o}, {true}};
    if (s == b && t == b) {
        if (odd) return {{b, o, o, b}, {false, true, true}};
        if (t_end) return {{b, b, o}, {true, false}};
        if (s_end) return {{o, b, b}, {true, true}};
        return {{b, b}, {true}};
    }
    throw invariant_error("saddle edge directed from a dot vertex");
}

ZigzagGraph plus_one(const ZigzagGraph& g) {
    ZigzagGraph out;
    int last = static_cast<int>(g.vertices.size()) - 1;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        int a = static_cast<int>(k), c = a + 1;
        int s = g.edges[k].forward ? a : c, t = g.edges[k].forward ? c : a;
        Gamma gm = replacement(g.vertices[s], g.vertices[t], g.edges[k].odd, s == 0 || s == last,
                               t == 0 || t == last);
        if (!g.edges[k].forward) {
            std::reverse(gm.types.begin(), gm.types.end());
            std::reverse(gm.forward.begin(), gm.forward.end());
            gm.forward.flip();
        }
        if (out.vertices.empty()) out.vertices.push_back(gm.types.front());
        else if (out.vertices.back() != gm.types.front()) throw invariant_error("zz gluing type mismatch");
        for (std::size_t j = 1; j < gm.types.size(); ++j) out.vertices.push_back(gm.types[j]);
        for (bool f : gm.forward) out.edges.push_back({f, true});
    }
    assign_parity(out);
    return out;
}

}  // namespace

std::optional<std::string> ZigzagGraph::validate() const {
    if (vertices.size() < 2) return "fewer than two vertices";
    if (edges.size() + 1 != vertices.size()) return "not a line";
    bool saddle = false;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        Obj a = vertices[k], b = vertices[k + 1];
        if (k > 0 && edges[k].odd == edges[k - 1].odd) return "adjacent edges " + std::to_string(k) + " share parity";
        if (!is_saddle(a, b)) continue;
        saddle = true;
        if (!edges[k].odd) return "even saddle edge " + std::to_string(k);
        Obj src = edges[k].forward ? a : b;
        if (src != Obj::Inf) return "saddle edge " + std::to_string(k) + " leaves a dot vertex";
    }
    if (!saddle) return "no saddle edge";
    return std::nullopt;
}

ZigzagGraph ZigzagGraph::inverted() const {
    ZigzagGraph g = *this;
    for (auto& v : g.vertices) v = v == Obj::Inf ? Obj::Zero : Obj::Inf;
    for (auto& e : g.edges) e.forward = !e.forward;
    return g;
}

ZigzagGraph ZigzagGraph::reindexed() const {
    ZigzagGraph g;
    g.vertices.assign(vertices.rbegin(), vertices.rend());
    for (auto it = edges.rbegin(); it != edges.rend(); ++it) g.edges.push_back({!it->forward, it->odd});
    return g;
}

// odd edges are drawn "->", even ones "=>"
std::string ZigzagGraph::render() const {
    std::string s(1, vertex_char(vertices.front()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        char shaft = edges[k].odd ? '-' : '=';
        s += edges[k].forward ? std::string(" ") + shaft + "> " : std::string(" <") + shaft + " ";
        s += vertex_char(vertices[k + 1]);
    }
    return s;
}

bool ZigzagGraph::operator==(const ZigzagGraph& o) const {
    if (vertices != o.vertices || edges.size() != o.edges.size()) return false;
    for (std::size_t k = 0; k < edges.size(); ++k)
        if (edges[k].forward != o.edges[k].forward || edges[k].odd != o.edges[k].odd) return false;
    return true;
}

nlohmann::json to_json(const ZigzagGraph& g) {
    nlohmann::json v = nlohmann::json::array(), e = nlohmann::json::array();
    for (Obj o : g.vertices) v.push_back(o == Obj::Inf ? "circle" : "dot");
    for (const auto& x : g.edges)
        e.push_back({{"direction", x.forward ? "forward" : "backward"}, {"parity", x.odd ? "odd" : "even"}});
    return {{"vertices", v}, {"edges", e}, {"text", g.render()}};
}

ZigzagGraph zz(const Rational& x) {
    if (!x.positive()) throw precondition_error("zz needs a positive rational, got " + x.to_string());
    // moves back to 1: true for y -> y + 1, false for y -> 1 / y
    std::vector<bool> moves;
    std::int64_t p = x.p, q = x.q;
    while (!(p == 1 && q == 1)) {
        if (p > q) {
            std::int64_t k = (p - 1) / q;  // stay >= 1
            moves.insert(moves.end(), static_cast<std::size_t>(k), true);
            p -= k * q;
        } else {
            moves.push_back(false);
            std::swap(p, q);
        }
    }
    ZigzagGraph g;
    g.vertices = {Obj::Inf, Obj::Zero};
    g.edges = {{true, true}};
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) g = *it ? plus_one(g) : g.inverted();
    return g;
}

EndsParity ends_parity(const ZigzagGraph& g) {
    EndsParity r;
    auto look = [&](Obj v, const ZigzagGraph::Edge& e) {
        if (!e.odd) r.even_end = true;
        else if (v == Obj::Inf) r.odd_circle_end = true;
        else r.odd_dot_end = true;
    };
    look(g.vertices.front(), g.edges.front());
    look(g.vertices.back(), g.edges.back());
    return r;
}

// ------------------------------------------------------------ category

Morph compose(const Morph& second, const Morph& first) {
    if (second.src != first.tgt) throw invariant_error("composing morphisms with mismatched objects");
    Morph r{first.src, second.tgt, {}, {}};
    bool e1 = first.src == first.tgt, e2 = second.src == second.tgt;
    if (e1 && e2) {
        r.a = second.a * first.a;
        r.b = second.a * first.b + second.b * first.a - GPolynomial::G() * second.b * first.b;
    } else if (e1) {
        r.b = second.b * first.a;  // S D = 0
    } else if (e2) {
        r.b = second.a * first.b;  // D S = 0
    } else {
        GPolynomial c = second.b * first.b;  // S S = S^2 = G + D
        r.a = GPolynomial::G() * c;
        r.b = c;
    }
    return r;
}

Morph operator+(const Morph& x, const Morph& y) {
    if (x.src != y.src || x.tgt != y.tgt) throw invariant_error("adding morphisms with mismatched objects");
    return {x.src, x.tgt, x.a + y.a, x.b + y.b};
}

Morph operator*(const GPolynomial& z, const Morph& m) { return {m.src, m.tgt, z * m.a, z * m.b}; }

std::string to_string(const Morph& m) {
    std::string other = m.src == m.tgt ? "D" : "S";
    std::string s;
    if (!m.a.is_zero()) s = "(" + to_string(m.a) + ")I";
    if (!m.b.is_zero()) s += (s.empty() ? "" : " + ") + std::string("(") + to_string(m.b) + ")" + other;
    return s.empty() ? "0" : s;
}

namespace {

nlohmann::json poly_json(const GPolynomial& p) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : p.coeffs()) j.push_back(int_to_json(c));
    return j;
}

const char* obj_name(Obj o) { return o == Obj::Inf ? "inf" : "0"; }

}  // namespace

void ZMap::add(int s, int t, const Morph& m) {
    auto key = std::make_pair(s, t);
    auto it = e.find(key);
    Morph v = it == e.end() ? m : it->second + m;
    if (v.is_zero()) {
        if (it != e.end()) e.erase(it);
    } else {
        e[key] = v;
    }
}

ZMap compose(const ZMap& second, const ZMap& first) {
    std::map<int, std::vector<std::pair<int, const Morph*>>> by_src;
    for (const auto& [key, m] : second.e) by_src[key.first].push_back({key.second, &m});
    ZMap r;
    for (const auto& [key, m] : first.e) {
        auto it = by_src.find(key.second);
        if (it == by_src.end()) continue;
        for (const auto& [t, m2] : it->second) r.add(key.first, t, compose(*m2, m));
    }
    return r;
}

ZMap operator+(const ZMap& x, const ZMap& y) {
    ZMap r = x;
    for (const auto& [key, m] : y.e) r.add(key.first, key.second, m);
    return r;
}

ZMap operator*(const GPolynomial& z, const ZMap& m) {
    ZMap r;
    for (const auto& [key, v] : m.e) r.add(key.first, key.second, z * v);
    return r;
}

ZMap operator-(const ZMap& x, const ZMap& y) { return x + GPolynomial(Int(-1)) * y; }

nlohmann::json to_json(const ZMap& m) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [key, v] : m.e) {
        nlohmann::json x{{"src", key.first}, {"tgt", key.second}, {"src_obj", obj_name(v.src)}, {"tgt_obj", obj_name(v.tgt)}};
        if (v.src == v.tgt) x["I"] = poly_json(v.a), x["D"] = poly_json(v.b);
        else x["S"] = poly_json(v.b);
        j.push_back(x);
    }
    return j;
}

// ------------------------------------------------------------ complexes

const char* diff_name(ZigzagComplex::Diff d) {
    switch (d) {
    case ZigzagComplex::Diff::S: return "S";
    case ZigzagComplex::Diff::S2: return "S2";
    case ZigzagComplex::Diff::D: return "D";
    }
    return "?";
}

ZMap ZigzagComplex::differential() const {
    ZMap d;
    for (const auto& x : diffs) {
        Obj o = objects[x.from].obj;
        switch (x.kind) {
        case Diff::S: d.add(x.from, x.to, Morph::saddle(o)); break;
        case Diff::S2: d.add(x.from, x.to, Morph::S2(o)); break;
        case Diff::D: d.add(x.from, x.to, Morph::D(o)); break;
        }
    }
    return d;
}

ZMap ZigzagComplex::scalar(const GPolynomial& z) const {
    ZMap m;
    for (std::size_t k = 0; k < objects.size(); ++k)
        m.add(static_cast<int>(k), static_cast<int>(k), z * Morph::identity(objects[k].obj));
    return m;
}

std::optional<std::string> ZigzagComplex::validate() const {
    if (objects.empty() || diffs.size() + 1 != objects.size()) return "not a line of objects";
    bool saddle = false;
    for (std::size_t k = 0; k < diffs.size(); ++k) {
        const auto& x = diffs[k];
        std::string where = "d_" + std::to_string(k + 1);
        int lo = static_cast<int>(k);
        if (!((x.from == lo && x.to == lo + 1) || (x.from == lo + 1 && x.to == lo))) return where + " is not between neighbours";
        Obj s = objects[x.from].obj, t = objects[x.to].obj;
        if (x.kind == Diff::S) {
            if (s != Obj::Inf || t != Obj::Zero) return where + ": S must go from infinity to 0";
            saddle = true;
        } else if (s != t) {
            return where + ": " + diff_name(x.kind) + " between different objects";
        }
        if (k > 0 && (x.kind == Diff::D) == (diffs[k - 1].kind == Diff::D))
            return where + " and its predecessor are not a D and a non-D";
        const Grading &gs = objects[x.from].at, &gt = objects[x.to].at;
        int deg = x.kind == Diff::S ? 1 : 2;
        if (gt.i != gs.i + 1 || gt.q != gs.q + deg) return where + " has the wrong degree";
    }
    if (!saddle) return "no saddle differential";
    return std::nullopt;
}

bool ZigzagComplex::squares_to_zero() const {
    ZMap d = differential();
    return compose(d, d).e.empty();
}

ZigzagGraph ZigzagComplex::graph() const {
    ZigzagGraph g;
    for (const auto& o : objects) g.vertices.push_back(o.obj);
    for (std::size_t k = 0; k < diffs.size(); ++k)
        g.edges.push_back({diffs[k].from == static_cast<int>(k), diffs[k].kind != Diff::D});
    return g;
}

nlohmann::json to_json(const ZigzagComplex& c) {
    nlohmann::json objs = nlohmann::json::array(), ds = nlohmann::json::array();
    for (const auto& o : c.objects) objs.push_back({{"object", obj_name(o.obj)}, {"i", o.at.i}, {"q", o.at.q}});
    for (const auto& x : c.diffs) ds.push_back({{"from", x.from}, {"to", x.to}, {"map", diff_name(x.kind)}});
    return {{"objects", objs}, {"differentials", ds}};
}

ZigzagComplex graph_to_complex(const ZigzagGraph& g) {
    if (auto err = g.validate()) throw precondition_error("not a zigzag graph: " + *err);
    ZigzagComplex c;
    c.objects.push_back({g.vertices[0], {0, 0}});
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        int lo = static_cast<int>(k);
        Obj a = g.vertices[k], b = g.vertices[k + 1];
        auto kind = is_saddle(a, b) ? ZigzagComplex::Diff::S
                    : g.edges[k].odd ? ZigzagComplex::Diff::S2
                                     : ZigzagComplex::Diff::D;
        int deg = kind == ZigzagComplex::Diff::S ? 1 : 2;
        Grading at = c.objects.back().at;
        if (g.edges[k].forward) at = {at.i + 1, at.q + deg};
        else at = {at.i - 1, at.q - deg};
        c.objects.push_back({b, at});
        if (g.edges[k].forward) c.diffs.push_back({lo, lo + 1, kind});
        else c.diffs.push_back({lo + 1, lo, kind});
    }
    return c;
}

ZigzagComplex one_crossing_complex() {
    ZigzagComplex c;
    c.objects = {{Obj::Zero, {0, 0}}, {Obj::Inf, {1, 1}}};
    c.diffs = {{0, 1, ZigzagComplex::Diff::S}};
    return c;
}

// ------------------------------------------------------------ closure

// Infinity closes to the marked circle alone (basis *); 0 to the marked circle
// and a free circle (basis 1, X).  S from infinity splits off the free circle,
// * -> X + G 1; S into infinity merges it back, 1 -> *, X -> 0.  D = S^2 - G
// then acts by 0 on * and by 1 -> X, X -> -G X.
std::vector<std::vector<GPolynomial>> closure_matrix(const Morph& m) {
    const GPolynomial G = GPolynomial::G();
    if (m.src == Obj::Inf && m.tgt == Obj::Inf) return {{m.a}};
    if (m.src == Obj::Zero && m.tgt == Obj::Zero) return {{m.a, m.b}, {GPolynomial(), m.a - G * m.b}};
    if (m.src == Obj::Inf) return {{G * m.b, m.b}};
    return {{m.b}, {GPolynomial()}};
}

namespace {

std::vector<int> closure_offsets(const ZigzagComplex& c) {
    std::vector<int> off;
    int n = 0;
    for (const auto& o : c.objects) {
        off.push_back(n);
        n += o.obj == Obj::Inf ? 1 : 2;
    }
    off.push_back(n);
    return off;
}

}  // namespace

FreeComplex closure(const ZigzagComplex& c) {
    FreeComplex out;
    for (const auto& o : c.objects) {
        if (o.obj == Obj::Inf) {
            out.add_gen(o.at);
        } else {
            out.add_gen({o.at.i, o.at.q + 1});
            out.add_gen({o.at.i, o.at.q - 1});
        }
    }
    auto off = closure_offsets(c);
    for (const auto& [key, m] : c.differential().e) {
        auto mat = closure_matrix(m);
        for (std::size_t r = 0; r < mat.size(); ++r)
            for (std::size_t s = 0; s < mat[r].size(); ++s) {
                if (mat[r][s].is_zero()) continue;
                auto mono = mat[r][s].as_monomial();
                if (!mono) throw invariant_error("closure of a graded complex is not homogeneous");
                out.set(off[key.first] + static_cast<int>(r), off[key.second] + static_cast<int>(s), *mono);
            }
    }
    return out;
}

ChainMap closure(const ZigzagComplex& src, const ZigzagComplex& tgt, const ZMap& m) {
    auto so = closure_offsets(src), to = closure_offsets(tgt);
    ChainMap out{so.back(), to.back(), {}};
    for (const auto& [key, v] : m.e) {
        auto mat = closure_matrix(v);
        for (std::size_t r = 0; r < mat.size(); ++r)
            for (std::size_t s = 0; s < mat[r].size(); ++s)
                if (!mat[r][s].is_zero())
                    out.add(so[key.first] + static_cast<int>(r), to[key.second] + static_cast<int>(s), mat[r][s]);
    }
    return out;
}

// ------------------------------------------------------------ two-bridge diagrams

namespace {

// A four-ended tangle diagram.  Crossings list their legs counterclockwise with
// the under strand on legs 0 and 2.
struct TangleDiagram {
    std::vector<std::array<int, 4>> crossings;
    int nw = 0, ne = 0, se = 1, sw = 1;  // R(0): arcs nw-ne and sw-se
    int next = 2;

    // R(x) -> R(x + 1): a crossing joining the two eastern ends
    void twist() {
        int a = ne, b = se, c = next++, d = next++;
        // legs counterclockwise from the north-west one: a, b, d, c
        crossings.push_back({a, b, d, c});
        ne = c, se = d;
    }
    // quarter turn, R(x) -> R(-1/x)
    void rotate() {
        int onw = nw, one = ne, ose = se, osw = sw;
        sw = onw, se = osw, ne = ose, nw = one;
    }
    // R(x) -> R(-x)
    void mirror() {
        for (auto& x : crossings) x = {x[1], x[2], x[3], x[0]};
    }
};

}  // namespace

PDCode two_bridge_pd(const Rational& x) {
    if (!x.positive()) throw precondition_error("two_bridge_pd needs a positive rational");
    if (x.p % 2 == 0) throw precondition_error("the closure of R(" + x.to_string() + ") is a two-component link");
    std::vector<bool> moves;
    std::int64_t p = x.p, q = x.q;
    while (!(p == 1 && q == 1)) {
        if (p > q) {
            moves.push_back(true);
            p -= q;
        } else {
            moves.push_back(false);
            std::swap(p, q);
        }
    }
    TangleDiagram t;
    t.twist();
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
        if (*it) {
            t.twist();
        } else {
            t.rotate();
            t.mirror();
        }
    }
    // numerator closure: nw-ne and sw-se
    std::vector<int> parent(t.next);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    parent[find(t.nw)] = find(t.ne);
    parent[find(t.sw)] = find(t.se);
    std::map<int, int> label;
    std::vector<std::array<int, 4>> tuples;
    for (const auto& cr : t.crossings) {
        std::array<int, 4> out{};
        for (int k = 0; k < 4; ++k) {
            int r = find(cr[k]);
            auto it = label.find(r);
            if (it == label.end()) it = label.emplace(r, static_cast<int>(label.size()) + 1).first;
            out[k] = it->second;
        }
        tuples.push_back(out);
    }
    return pd_from_tuples(tuples);
}

// ------------------------------------------------------------ homotopies

namespace {

using CoeffKey = std::tuple<int, int, int, int>;  // source, target, basis (0: I, 1: D or S), G power

void flatten(const ZMap& m, const std::function<void(const CoeffKey&, const Int&)>& emit) {
    for (const auto& [key, v] : m.e) {
        for (int k = 0; k <= v.a.degree_in_G(); ++k)
            if (v.a.coeff(k) != 0) emit({key.first, key.second, 0, k}, v.a.coeff(k));
        for (int k = 0; k <= v.b.degree_in_G(); ++k)
            if (v.b.coeff(k) != 0) emit({key.first, key.second, 1, k}, v.b.coeff(k));
    }
}

// homogeneous maps of homological degree -1 and overall quantum degree 2
std::vector<ZMap> homotopy_basis(const ZigzagComplex& c) {
    std::vector<ZMap> out;
    int n = static_cast<int>(c.objects.size());
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const auto &s = c.objects[j], &t = c.objects[k];
            if (t.at.i != s.at.i - 1) continue;
            int m = t.at.q - s.at.q + 2;
            if (m < 0) continue;
            auto push = [&](Morph x) {
                ZMap z;
                z.add(j, k, x);
                out.push_back(z);
            };
            if (s.obj == t.obj) {
                if (m % 2) continue;
                push(GPolynomial::G(m / 2) * Morph::identity(s.obj));
                if (m >= 2) push(GPolynomial::G(m / 2 - 1) * Morph::D(s.obj));
            } else {
                if (m % 2 == 0) continue;
                push(GPolynomial::G((m - 1) / 2) * Morph::saddle(s.obj));
            }
        }
    return out;
}

// h from the span of `basis` with h d + d h = target
std::optional<ZMap> solve_homotopy(const ZMap& d, const std::vector<ZMap>& basis, const ZMap& target) {
    std::map<CoeffKey, int> rows;
    auto row_of = [&](const CoeffKey& k) {
        auto it = rows.find(k);
        if (it == rows.end()) it = rows.emplace(k, static_cast<int>(rows.size())).first;
        return it->second;
    };
    std::vector<std::vector<std::pair<int, Int>>> cols;
    for (const auto& h : basis) {
        std::vector<std::pair<int, Int>> col;
        flatten(compose(h, d) + compose(d, h), [&](const CoeffKey& k, const Int& v) { col.push_back({row_of(k), v}); });
        cols.push_back(std::move(col));
    }
    std::vector<std::pair<int, Int>> rhs;
    flatten(target, [&](const CoeffKey& k, const Int& v) { rhs.push_back({row_of(k), v}); });
    IntMat A(static_cast<int>(rows.size()), static_cast<int>(basis.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& [r, v] : cols[j]) A.at(r, static_cast<int>(j)) += v;
    std::vector<Int> b(rows.size(), Int(0));
    for (const auto& [r, v] : rhs) b[r] += v;
    auto x = solve_integer(A, b);
    if (!x) return std::nullopt;
    ZMap h;
    for (std::size_t j = 0; j < basis.size(); ++j)
        if ((*x)[j] != 0) h = h + GPolynomial((*x)[j]) * basis[j];
    return h;
}

bool is_chain_map(const ZMap& d_src, const ZMap& d_tgt, const ZMap& f) {
    return compose(f, d_src) == compose(d_tgt, f);
}

}  // namespace

ZMap edge_homotopy(const ZigzagComplex& c, int i) {
    if (i < 1 || i > static_cast<int>(c.diffs.size())) throw precondition_error("edge index out of range");
    const auto& x = c.diffs[i - 1];
    ZMap target;
    for (int k : {i - 1, i}) {
        Obj o = c.objects[k].obj;
        target.add(k, k, x.kind == ZigzagComplex::Diff::D ? Morph::D(o) : Morph::S2(o));
    }
    ZMap d = c.differential();
    auto h = solve_homotopy(d, homotopy_basis(c), target);
    if (!h) throw invariant_error("no homotopy for edge " + std::to_string(i) + ": the zigzag complex is malformed");
    return *h;
}

bool FGCertificate::verify() const {
    ZMap d = c.differential(), dp = c_prime.differential();
    if (!is_chain_map(d, dp, f) || !is_chain_map(dp, d, g)) return false;
    GPolynomial G = GPolynomial::G();
    if (c.scalar(G) - compose(g, f) != compose(h, d) + compose(d, h)) return false;
    return c_prime.scalar(G) - compose(f, g) == compose(h_prime, dp) + compose(dp, h_prime);
}

nlohmann::json to_json(const FGCertificate& c) {
    return {{"k", 1},
            {"complex", to_json(c.c)},
            {"one_crossing", to_json(c.c_prime)},
            {"f", to_json(c.f)},
            {"g", to_json(c.g)},
            {"h", to_json(c.h)},
            {"h_prime", to_json(c.h_prime)},
            {"verified", c.verify()}};
}

FGCertificate fg_certificate(const Rational& x) {
    if (!x.positive() || x.p % 2 == 0 || x.q % 2 == 0)
        throw precondition_error("fg_certificate needs p/q > 0 with p and q odd, got " + x.to_string());
    ZigzagGraph gr = zz(x);
    if (gr.vertices.front() != Obj::Inf) gr = gr.reindexed();
    FGCertificate cert;
    cert.c = graph_to_complex(gr);
    cert.c_prime = one_crossing_complex();
    int n = static_cast<int>(cert.c.diffs.size());
    if (cert.c.objects[n].obj != Obj::Zero) throw invariant_error("odd/odd zigzag graph without a dot end");
    const GPolynomial minus_one(Int(-1));
    cert.f.add(0, 1, Morph::identity(Obj::Inf));
    cert.f.add(n, 0, minus_one * Morph::D(Obj::Zero));
    cert.g.add(1, 0, minus_one * Morph::D(Obj::Inf));
    cert.g.add(0, n, Morph::identity(Obj::Zero));
    for (int i = 1; i <= n; ++i) {
        ZMap hi = edge_homotopy(cert.c, i);
        cert.h = cert.h + (i % 2 ? GPolynomial(Int(1)) : minus_one) * hi;
    }
    cert.h_prime.add(1, 0, Morph::saddle(Obj::Inf));
    if (!cert.verify()) throw invariant_error("fg certificate for " + x.to_string() + " failed to verify");
    return cert;
}

RationalDistance lambda_distance_rational(const Rational& x, const Rational& y) {
    if (connectivity_parity(x) != connectivity_parity(y))
        throw precondition_error(x.to_string() + " and " + y.to_string() + " have different connectivity");
    RationalDistance r;
    if (x == y) {
        r.z = Rational(-1, 1);
        return r;
    }
    // a p + b q = -1, so w -> (a w + b) / (q w - p) is invertible over Z and sends x to infinity
    std::int64_t a = 0, b = 0;
    {
        std::int64_t old_r = x.p, rr = x.q, old_s = 1, s = 0, old_t = 0, t = 1;
        while (rr != 0) {
            std::int64_t k = old_r / rr;
            std::tie(old_r, rr) = std::make_pair(rr, old_r - k * rr);
            std::tie(old_s, s) = std::make_pair(s, old_s - k * s);
            std::tie(old_t, t) = std::make_pair(t, old_t - k * t);
        }
        // old_s p + old_t q = old_r = +-1
        a = -old_s * old_r, b = -old_t * old_r;
    }
    std::int64_t num = y.is_infinite() ? a : a * y.p + b * y.q;
    std::int64_t den = y.is_infinite() ? x.q : x.q * y.p - x.p * y.q;
    Rational y1(num, den);
    if (y1.is_infinite()) throw invariant_error("change of coordinates is not injective");
    // twists on the right side move y1 into (0, 1]
    std::int64_t P = ((y1.p - 1) % y1.q + y1.q) % y1.q + 1;
    // w -> 1/w - 1 sends infinity to -1
    r.z = Rational(y1.q - P, P);
    r.distance = 1;
    r.certificate = fg_certificate(r.z);
    return r;
}

nlohmann::json to_json(const RationalDistance& d) {
    nlohmann::json j{{"distance", d.distance}, {"normalized_pair", {"-1", d.z.to_string()}}};
    if (d.certificate) j["certificate"] = to_json(*d.certificate);
    return j;
}

}  // namespace zgkh
