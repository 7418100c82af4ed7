#pragma once

// Rational tangles: zigzag graphs and complexes over the two-object category of
// four-ended crossingless tangles, their closures, and unknotting certificates.

#include "zgkh/chain.hpp"
#include "zgkh/tqft.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zgkh {

// p/q in lowest terms with q >= 0; (1, 0) is infinity.
struct Rational {
    std::int64_t p = 0, q = 1;

    Rational() = default;
    Rational(std::int64_t num, std::int64_t den);  // normalizes; throws on 0/0

    static Rational infinity() { return Rational(1, 0); }
    bool is_infinite() const { return q == 0; }
    bool positive() const { return q > 0 && p > 0; }
    bool operator==(const Rational& o) const { return p == o.p && q == o.q; }
    std::string to_string() const;
};
// "p/q", "p", "inf"
Rational parse_rational(const std::string& text);

// the equivalence class of the tangle's endpoint pairing: (p mod 2, q mod 2)
std::pair<int, int> connectivity_parity(const Rational& x);

enum class Obj { Zero, Inf };  // the tangle 0 (dot vertex) and the tangle infinity (circle vertex)

struct ZigzagGraph {
    struct Edge {
        bool forward = true;  // from vertex k to vertex k + 1
        bool odd = true;
    };
    std::vector<Obj> vertices;
    std::vector<Edge> edges;  // edge k joins vertices k and k + 1

    // line shape, alternating parity, saddles odd and directed circle -> dot, a saddle exists
    std::optional<std::string> validate() const;
    // switch vertex types and reverse every edge
    ZigzagGraph inverted() const;
    // the same graph read from the other end
    ZigzagGraph reindexed() const;
    std::string render() const;
    bool operator==(const ZigzagGraph& o) const;
};
nlohmann::json to_json(const ZigzagGraph& g);

ZigzagGraph zz(const Rational& x);

struct EndsParity {
    bool even_end = false, odd_circle_end = false, odd_dot_end = false;
    bool operator==(const EndsParity&) const = default;
};
EndsParity ends_parity(const ZigzagGraph& g);

// A Z[G]-linear combination of cobordisms between two objects.  Endomorphisms
// are a I + b D; between different objects the morphism is b S and a = 0.
// Relations: D = S^2 - G, S D = D S = 0, D^2 = -G D.
struct Morph {
    Obj src = Obj::Zero, tgt = Obj::Zero;
    GPolynomial a, b;

    static Morph identity(Obj o) { return {o, o, GPolynomial(Int(1)), {}}; }
    static Morph saddle(Obj from) { return {from, from == Obj::Zero ? Obj::Inf : Obj::Zero, {}, GPolynomial(Int(1))}; }
    static Morph D(Obj o) { return {o, o, {}, GPolynomial(Int(1))}; }
    static Morph S2(Obj o) { return {o, o, GPolynomial::G(), GPolynomial(Int(1))}; }

    bool is_zero() const { return a.is_zero() && b.is_zero(); }
    bool operator==(const Morph& o) const { return src == o.src && tgt == o.tgt && a == o.a && b == o.b; }
};
Morph compose(const Morph& second, const Morph& first);
Morph operator+(const Morph& x, const Morph& y);
Morph operator*(const GPolynomial& z, const Morph& m);
std::string to_string(const Morph& m);

// Maps between direct sums of objects, keyed by (source index, target index).
struct ZMap {
    std::map<std::pair<int, int>, Morph> e;

    void add(int s, int t, const Morph& m);
    bool operator==(const ZMap& o) const { return e == o.e; }
    bool operator!=(const ZMap& o) const { return e != o.e; }
};
ZMap compose(const ZMap& second, const ZMap& first);
ZMap operator+(const ZMap& x, const ZMap& y);
ZMap operator-(const ZMap& x, const ZMap& y);
ZMap operator*(const GPolynomial& z, const ZMap& m);
nlohmann::json to_json(const ZMap& m);

struct ZigzagComplex {
    enum class Diff { S, S2, D };
    struct Object {
        Obj obj = Obj::Zero;
        Grading at;
    };
    struct Differential {
        int from = 0, to = 0;  // adjacent object indices
        Diff kind = Diff::S;
    };
    std::vector<Object> objects;
    std::vector<Differential> diffs;  // diffs[k] joins objects k and k + 1

    ZMap differential() const;
    ZMap scalar(const GPolynomial& z) const;
    // the five allowed shapes, the pairing of consecutive differentials and the
    // quantum degree rule
    std::optional<std::string> validate() const;
    // d^2 = 0 in the category
    bool squares_to_zero() const;
    ZigzagGraph graph() const;
};
nlohmann::json to_json(const ZigzagComplex& c);
const char* diff_name(ZigzagComplex::Diff d);

// A_0 sits at (0, 0); every differential raises the homological degree by one
// and the quantum degree by 1 (S) or 2 (S^2, D).
ZigzagComplex graph_to_complex(const ZigzagGraph& g);

// The tangle 0 placed before the tangle infinity, joined by S: the complex of R(-1).
ZigzagComplex one_crossing_complex();

// Closing the tangle with the arcs for which infinity becomes one marked circle
// and 0 a marked circle plus a free one.  Generators: one per infinity object,
// and two per 0 object, the free circle labelled 1 (q + 1) then X (q - 1).
FreeComplex closure(const ZigzagComplex& c);
ChainMap closure(const ZigzagComplex& src, const ZigzagComplex& tgt, const ZMap& m);
// reduced TQFT image of a morphism as rows (source basis) x columns (target basis)
std::vector<std::vector<GPolynomial>> closure_matrix(const Morph& m);

// Numerator closure of the standard alternating diagram of R(x); throws a
// precondition error when the closure is a two-component link.
PDCode two_bridge_pd(const Rational& x);

// h with h d + d h = u (id_{A_i} + id_{A_{i-1}}), u = S^2 for odd d_i, D for even d_i
ZMap edge_homotopy(const ZigzagComplex& c, int i);

struct FGCertificate {
    ZigzagComplex c, c_prime;
    ZMap f, g, h, h_prime;  // f : C -> C', g : C' -> C
    // G id_C - g f = h d + d h  and  G id_C' - f g = h' d' + d' h'
    bool verify() const;
};
nlohmann::json to_json(const FGCertificate& c);
// p and q both odd
FGCertificate fg_certificate(const Rational& x);

struct RationalDistance {
    int distance = 0;
    Rational z;  // the partner of -1 after the change of coordinates
    std::optional<FGCertificate> certificate;
};
RationalDistance lambda_distance_rational(const Rational& x, const Rational& y);
nlohmann::json to_json(const RationalDistance& d);

}  // namespace zgkh
