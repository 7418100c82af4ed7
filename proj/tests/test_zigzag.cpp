#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "zgkh/zigzag.hpp"

#include <numeric>
#include <random>

using namespace zgkh;

namespace {

using Diff = ZigzagComplex::Diff;
const Obj O = Obj::Inf, B = Obj::Zero;

ZigzagGraph three_sevenths_by_hand() {
    ZigzagGraph g;
    g.vertices = {O, B, B, B, B, O, O, B, B, B};
    g.edges = {{true, true},  {true, false},  {true, true},  {false, false}, {false, true},
               {true, false}, {true, true},   {true, false}, {true, true}};
    return g;
}

GPolynomial poly(std::mt19937& rng) {
    std::uniform_int_distribution<int> len(0, 3), c(-4, 4);
    std::vector<Int> v(len(rng));
    for (auto& x : v) x = c(rng);
    return GPolynomial(v);
}

Morph random_morph(std::mt19937& rng, Obj s, Obj t) {
    if (s == t) return {s, t, poly(rng), poly(rng)};
    return {s, t, {}, poly(rng)};
}

using Mat = std::vector<std::vector<GPolynomial>>;

Mat matmul(const Mat& x, const Mat& y) {
    Mat out(x.size(), std::vector<GPolynomial>(y[0].size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y[0].size(); ++j)
            for (std::size_t k = 0; k < y.size(); ++k) out[i][j] += x[i][k] * y[k][j];
    return out;
}

// the expected right-hand side of the edge homotopy identity
ZMap edge_target(const ZigzagComplex& c, int i) {
    ZMap t;
    for (int k : {i - 1, i}) {
        Obj o = c.objects[k].obj;
        t.add(k, k, c.diffs[i - 1].kind == Diff::D ? Morph::D(o) : Morph::S2(o));
    }
    return t;
}

}  // namespace

TEST_CASE("Rational") {
    CHECK(Rational(6, -4) == Rational(-3, 2));
    CHECK(parse_rational("3/7") == Rational(3, 7));
    CHECK(parse_rational("-1") == Rational(-1, 1));
    CHECK(parse_rational("inf").is_infinite());
    CHECK(parse_rational("4/-6").to_string() == "-2/3");
    CHECK_THROWS_AS(parse_rational("1/x"), Error);
    CHECK_THROWS_AS(parse_rational("0/0"), Error);
    CHECK(connectivity_parity(Rational(1, 1)) == std::pair{1, 1});
    CHECK(connectivity_parity(Rational(3, 7)) == std::pair{1, 1});
    CHECK(connectivity_parity(Rational(1, 2)) == std::pair{1, 0});
    CHECK(connectivity_parity(Rational(-1, 1)) == std::pair{1, 1});
}

TEST_CASE("category relations") {
    for (Obj o : {O, B}) {
        auto s = Morph::saddle(o);
        auto s2 = compose(Morph::saddle(s.tgt), s);
        CHECK(s2 == Morph::S2(o));
        // S^3 = G S
        CHECK(compose(s, s2) == GPolynomial::G() * s);
        // D = S^2 - G
        CHECK(Morph::D(o) == Morph::S2(o) + GPolynomial(Int(-1)) * GPolynomial::G() * Morph::identity(o));
        // S D = D S = 0 and D^2 = -G D
        CHECK(compose(s, Morph::D(o)).is_zero());
        CHECK(compose(Morph::D(s.tgt), s).is_zero());
        CHECK(compose(Morph::D(o), Morph::D(o)) == GPolynomial(Int(-1)) * GPolynomial::G() * Morph::D(o));
    }
}

TEST_CASE("closure matrices: derivation from the reduced Frobenius rules") {
    const GPolynomial G = GPolynomial::G(), one(Int(1)), zero;
    // split of the marked circle: * -> * (x) X + G * (x) 1, basis of 0 is (1, X)
    CHECK(closure_matrix(Morph::saddle(O)) == Mat{{G, one}});
    // merge into the marked circle: (*, 1) -> *, (*, X) -> 0
    CHECK(closure_matrix(Morph::saddle(B)) == Mat{{one}, {zero}});
    // the composites follow by multiplication
    CHECK(closure_matrix(Morph::S2(O)) == matmul(closure_matrix(Morph::saddle(O)), closure_matrix(Morph::saddle(B))));
    CHECK(closure_matrix(Morph::S2(B)) == matmul(closure_matrix(Morph::saddle(B)), closure_matrix(Morph::saddle(O))));
    // D on the free circle: 1 -> X, X -> -G X (multiplication by X with X^2 = -G X)
    CHECK(closure_matrix(Morph::D(B)) == Mat{{zero, one}, {zero, -G}});
    CHECK(closure_matrix(Morph::D(O)) == Mat{{zero}});

    // functoriality on random morphisms
    std::mt19937 rng(41);
    for (int t = 0; t < 300; ++t) {
        Obj a = rng() % 2 ? O : B, b = rng() % 2 ? O : B, c = rng() % 2 ? O : B;
        auto m1 = random_morph(rng, a, b), m2 = random_morph(rng, b, c);
        CHECK(closure_matrix(compose(m2, m1)) == matmul(closure_matrix(m1), closure_matrix(m2)));
    }

    // the one-crossing tangle closes to the unknot of the 1-crossing diagram
    auto u = gaussian_eliminate(closure(graph_to_complex(zz(Rational(1, 1)))));
    auto oracle = build_reduced_complex(parse_pd("X[1,1,2,2]"));
    REQUIRE(u.size() == 1);
    CHECK(testing::canonical_invariants(u) == testing::canonical_invariants(oracle));
}

TEST_CASE("zz examples") {
    CHECK(zz(Rational(1, 1)).render() == "o -> *");
    CHECK(zz(Rational(2, 1)).render() == "o => o -> *");
    CHECK(zz(Rational(3, 1)).render() == "o -> o => o -> *");
    auto z37 = zz(Rational(3, 7));
    CHECK(z37 == three_sevenths_by_hand());
    CHECK(z37.vertices == three_sevenths_by_hand().vertices);
    CHECK(z37.render() == "o -> * => * -> * <= * <- o => o -> * => * -> *");
    CHECK_FALSE(z37.validate());
    CHECK_THROWS_AS(zz(Rational(-1, 2)), Error);
    CHECK_THROWS_AS(zz(Rational(0, 1)), Error);
}

TEST_CASE("graph_to_complex") {
    auto c1 = graph_to_complex(zz(Rational(1, 1)));
    REQUIRE(c1.objects.size() == 2);
    CHECK(c1.objects[0].obj == O);
    CHECK(c1.objects[1].obj == B);
    CHECK(c1.objects[1].at == Grading{1, 1});
    CHECK(c1.diffs[0].kind == Diff::S);

    auto c = graph_to_complex(zz(Rational(3, 7)));
    CHECK_FALSE(c.validate());
    std::vector<Grading> at;
    for (const auto& o : c.objects) at.push_back(o.at);
    CHECK(at == std::vector<Grading>{{0, 0}, {1, 1}, {2, 3}, {3, 5}, {2, 3}, {1, 2}, {2, 4}, {3, 5}, {4, 7}, {5, 9}});
    CHECK(c.graph() == zz(Rational(3, 7)));

    // reading the graph from the other end gives an isomorphic complex
    auto r = graph_to_complex(zz(Rational(3, 7)).reindexed());
    CHECK(testing::canonical_invariants(closure(r)) == testing::canonical_invariants(closure(c)));
}

TEST_CASE("property: zigzag graphs for coprime p, q <= 30") {
    for (int p = 1; p <= 30; ++p)
        for (int q = 1; q <= 30; ++q) {
            if (std::gcd(p, q) != 1) continue;
            CAPTURE(p);
            CAPTURE(q);
            auto g = zz(Rational(p, q));
            CHECK_FALSE(g.validate());
            CHECK(g.vertices.size() == static_cast<std::size_t>(p + q));
            CHECK(g.edges.size() == static_cast<std::size_t>(p + q - 1));
            auto e = ends_parity(g);
            CHECK(e.even_end == (p % 2 == 0 || q % 2 == 0));
            CHECK(e.odd_circle_end == (p % 2 == 1));
            CHECK(e.odd_dot_end == (q % 2 == 1));
            auto inv = zz(Rational(q, p));
            CHECK((inv == g.inverted() || inv == g.inverted().reindexed()));
            if (p + q <= 24) CHECK(graph_to_complex(g).squares_to_zero());
        }
    CHECK(ends_parity(zz(Rational(1, 1))) == EndsParity{false, true, true});
    CHECK(ends_parity(zz(Rational(2, 1))) == EndsParity{true, false, true});
    CHECK(ends_parity(zz(Rational(3, 7))) == EndsParity{false, true, true});
}

TEST_CASE("invalid graphs are rejected") {
    ZigzagGraph g;
    g.vertices = {B, O};
    g.edges = {{true, true}};  // saddle from a dot
    CHECK(g.validate());
    CHECK_THROWS_AS(graph_to_complex(g), Error);
    g.vertices = {O, O};
    g.edges = {{true, true}};  // no saddle
    CHECK(g.validate());
    g.vertices = {O, B, B};
    g.edges = {{true, true}, {true, true}};  // parities do not alternate
    CHECK(g.validate());
}

TEST_CASE("closure against two-bridge diagrams") {
    CHECK(two_bridge_pd(Rational(1, 1)).size() == 1);
    CHECK(two_bridge_pd(Rational(3, 1)).size() == 3);
    auto p52 = two_bridge_pd(Rational(5, 2));
    CHECK(p52.size() == 4);  // 5/2 = 2 + 1/2
    CHECK_THROWS_AS(two_bridge_pd(Rational(2, 1)), Error);

    auto trefoil = closure(graph_to_complex(zz(Rational(3, 1))));
    CHECK(validate(trefoil).ok());
    // R(3) closes to the left-handed trefoil, the mirror of the table entry
    CHECK(testing::canonical_invariants(trefoil) ==
          testing::canonical_invariants(dual(testing::knot_complex("3_1"))));
    CHECK(u_G(trefoil) == 1);

    for (auto x : {Rational(5, 2), Rational(7, 3), Rational(5, 1), Rational(1, 4)}) {
        CAPTURE(x.to_string());
        auto pd = two_bridge_pd(x);
        auto oracle = build_reduced_complex(pd, make_basepoint(pd));
        CHECK(testing::canonical_invariants(closure(graph_to_complex(zz(x)))) ==
              testing::canonical_invariants(oracle));
    }
    // 5/2 closes to the figure eight
    CHECK(testing::canonical_invariants(closure(graph_to_complex(zz(Rational(5, 2))))) ==
          testing::canonical_invariants(testing::knot_complex("4_1")));
}

TEST_CASE("edge_homotopy") {
    auto c1 = graph_to_complex(zz(Rational(1, 1)));
    auto h = edge_homotopy(c1, 1);
    auto d = c1.differential();
    CHECK(compose(h, d) + compose(d, h) == edge_target(c1, 1));
    REQUIRE(h.e.size() == 1);
    CHECK(h.e.begin()->first == std::pair{1, 0});
    CHECK(h.e.begin()->second == Morph::saddle(B));

    for (auto x : {Rational(3, 7), Rational(3, 1), Rational(5, 3), Rational(8, 5)}) {
        auto c = graph_to_complex(zz(x));
        auto dc = c.differential();
        for (int i = 1; i <= static_cast<int>(c.diffs.size()); ++i) {
            CAPTURE(x.to_string());
            CAPTURE(i);
            auto hi = edge_homotopy(c, i);
            CHECK(compose(hi, dc) + compose(dc, hi) == edge_target(c, i));
        }
    }
    CHECK_THROWS_AS(edge_homotopy(c1, 2), Error);
}

TEST_CASE("fg_certificate") {
    for (auto x : {Rational(1, 1), Rational(3, 7), Rational(5, 3)}) {
        CAPTURE(x.to_string());
        auto cert = fg_certificate(x);
        CHECK(cert.verify());
    }
    // f is the identity on the circle end and -D on the dot end
    auto cert = fg_certificate(Rational(3, 7));
    int n = static_cast<int>(cert.c.objects.size()) - 1;
    REQUIRE(cert.f.e.size() == 2);
    CHECK(cert.f.e.at({0, 1}) == Morph::identity(O));
    CHECK(cert.f.e.at({n, 0}) == GPolynomial(Int(-1)) * Morph::D(B));
    CHECK(cert.g.e.at({1, 0}) == GPolynomial(Int(-1)) * Morph::D(O));
    CHECK(cert.g.e.at({0, n}) == Morph::identity(B));
    CHECK(cert.h_prime.e.at({1, 0}) == Morph::saddle(O));

    // a broken certificate is caught
    auto bad = cert;
    bad.h_prime = ZMap{};
    CHECK_FALSE(bad.verify());

    CHECK_THROWS_AS(fg_certificate(Rational(2, 3)), Error);
    CHECK_THROWS_AS(fg_certificate(Rational(-1, 3)), Error);
}

TEST_CASE("lambda_distance_rational") {
    auto a = lambda_distance_rational(Rational(-1, 1), Rational(3, 1));
    CHECK(a.distance == 1);
    REQUIRE(a.certificate);
    CHECK(a.certificate->verify());

    auto same = lambda_distance_rational(Rational(3, 7), Rational(3, 7));
    CHECK(same.distance == 0);
    CHECK_FALSE(same.certificate);

    auto b = lambda_distance_rational(Rational(1, 3), Rational(-1, 1));
    CHECK(b.distance == 1);
    REQUIRE(b.certificate);
    CHECK(b.certificate->verify());

    CHECK_THROWS_AS(lambda_distance_rational(Rational(1, 2), Rational(1, 3)), Error);

    std::mt19937 rng(43);
    std::uniform_int_distribution<int> v(-9, 9);
    for (int t = 0; t < 60; ++t) {
        int p1 = v(rng), q1 = std::abs(v(rng)), p2 = v(rng), q2 = std::abs(v(rng));
        if (p1 == 0 && q1 == 0) continue;
        if (p2 == 0 && q2 == 0) continue;
        Rational x(p1, q1), y(p2, q2);
        if (connectivity_parity(x) != connectivity_parity(y)) {
            CHECK_THROWS_AS(lambda_distance_rational(x, y), Error);
            continue;
        }
        auto r = lambda_distance_rational(x, y);
        CHECK(r.distance == (x == y ? 0 : 1));
        if (r.certificate) CHECK(r.certificate->verify());
    }
}
