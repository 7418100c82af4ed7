#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "zgkh/pieces.hpp"

#include <algorithm>
#include <memory>
#include <random>

using namespace zgkh;

namespace {

// the complex Q_n: R{0} -> R{2} (+) R{4} -> R{4} with entries nG, G^2, -G, n
FreeComplex q_complex(int n) {
    FreeComplex c;
    c.add_gen({0, 0});
    c.add_gen({1, 2});
    c.add_gen({1, 4});
    c.add_gen({2, 4});
    c.set(0, 1, GMonomial(n, 1));
    c.set(0, 2, GMonomial(1, 2));
    c.set(1, 3, GMonomial(-1, 1));
    c.set(2, 3, GMonomial(n));
    return c;
}

HomClass class_of(const FreeComplex& c, Grading g, std::vector<Int> coords) {
    return {std::make_shared<const FreeComplex>(c), g, std::move(coords)};
}

FreeComplex with_pawn(const FreeComplex& c) { return direct_sum(pawn(), c); }

}  // namespace

TEST_CASE("decompose") {
    auto t = testing::knot_complex("3_1");
    auto d = decompose(t);
    CHECK(d.verify());
    CHECK(d.count(Piece::Kind::Pawn) == 1);
    CHECK(d.count(Piece::Kind::Knight) == 1);

    auto q = direct_sum(q_complex(2), q_complex(3));
    REQUIRE(validate(q).ok());
    auto dq = decompose(q);
    CHECK(dq.verify());
    std::size_t gens = 0;
    for (const auto& p : dq.pieces) gens += p.gens.size();
    CHECK(gens == static_cast<std::size_t>(dq.block.size()));
    auto other = direct_sum(q_complex(1), q_complex(6));
    for (int p : {0, 2, 3, 5})
        CHECK(specialized_homology(q, CoefficientSpec::field_graded(p)) ==
              specialized_homology(other, CoefficientSpec::field_graded(p)));
    CHECK(specialized_homology(q, CoefficientSpec::integers_g_zero()) ==
          specialized_homology(other, CoefficientSpec::integers_g_zero()));
    CHECK(u_G(q) == u_G(other));

    // Q_1 is a G-knight after elimination
    auto d1 = decompose(q_complex(1));
    REQUIRE(d1.pieces.size() == 1);
    CHECK(d1.pieces[0].kind == Piece::Kind::Knight);
    CHECK(d1.pieces[0].z1 == GMonomial(1, 1));

    // composite scalar labels are not knights
    auto d6 = decompose(knight(GMonomial(6)));
    REQUIRE(d6.pieces.size() == 1);
    CHECK(d6.pieces[0].kind == Piece::Kind::Opaque);
}

TEST_CASE("staircases") {
    auto s1 = staircase(1);
    CHECK(s1.gens == std::vector<Grading>{{0, 2}, {0, 0}, {1, 2}});
    CHECK(s1.entries.size() == 2);
    CHECK(validate(s1).ok());
    std::multiset<std::string> labels;
    for (const auto& [k, v] : s1.entries) labels.insert(to_string(v));
    CHECK(labels == std::multiset<std::string>{"2*G^0", "1*G^1"});
    for (int n = 1; n <= 5; ++n) {
        auto s = staircase(n);
        CHECK(s.size() == 2 * n + 1);
        CHECK(validate(s).ok());
        auto ds = decompose(s);
        REQUIRE(ds.pieces.size() == 1);
        CHECK(ds.pieces[0].kind == Piece::Kind::Staircase);
        CHECK(ds.pieces[0].n == n);
    }
    CHECK(u_G(staircase(3)) == 3);
    CHECK(dual_staircase(1) == dual(staircase(1)));
}

TEST_CASE("torsion_order") {
    for (int k = 1; k <= 4; ++k) {
        auto c = knight(GMonomial(1, k), {0, 0});
        CHECK(torsion_order(class_of(c, {1, 2 * k}, {1})) == k);
    }
    for (int n = 1; n <= 4; ++n) {
        auto s = staircase(n);
        auto piece = graded_piece(s, 1, 2 * n);
        REQUIRE(piece.size() == 1);
        auto x = class_of(s, {1, 2 * n}, {1});
        CHECK(torsion_order(x) == n);
        auto no = boundary_refutation(x, n - 1);
        REQUIRE(no);
        CHECK(no->verify());
        CHECK_FALSE(boundary_refutation(x, n));
    }
    CHECK_FALSE(torsion_order(class_of(pawn(), {0, 0}, {1})).has_value());
    CHECK_THROWS_AS(torsion_order(class_of(knight(GMonomial(1, 1)), {0, 0}, {1})), Error);
}

TEST_CASE("u_G") {
    CHECK(u_G(pawn()) == 0);
    CHECK(u_G(FreeComplex{}) == 0);
    for (int n = 1; n <= 5; ++n) {
        CHECK(u_G(staircase(n)) == n);
        CHECK(u_G(dual_staircase(n)) == 0);
    }
    CHECK(u_G(knight(GMonomial(1, 3))) == 3);
    CHECK(u_G(knight(GMonomial(2))) == 0);
}

TEST_CASE("lambda_zero_upper") {
    for (int k = 1; k <= 3; ++k) {
        auto c = knight(GMonomial(1, k));
        auto z = lambda_zero_upper(c);
        REQUIRE(z.k);
        CHECK(*z.k == k);
        CHECK(homotopy_boundary(c, z.h) == scalar_map(2, GPolynomial::G(k)));
        REQUIRE(z.below);
        CHECK(z.below->verify());
    }
    auto kk = tensor(knight(GMonomial(1, 1)), knight(GMonomial(2)));
    auto z = lambda_zero_upper(kk);
    REQUIRE(z.k);
    CHECK(*z.k == 1);
    for (int kmax : {0, 3, 8}) CHECK_FALSE(lambda_zero_upper(knight(GMonomial(2)), kmax).k);
    CHECK(*lambda_zero_upper(FreeComplex{}).k == 0);
}

TEST_CASE("lambda_bounds") {
    auto u = lambda_bounds(pawn());
    CHECK(u.lower == 0);
    CHECK(u.upper == 0);

    auto t = lambda_bounds(testing::knot_complex("3_1"));
    CHECK(t.lower == 1);
    CHECK(t.upper == 1);
    REQUIRE(t.certificate);
    CHECK(t.certificate->verify());

    auto e = lambda_bounds(testing::knot_complex("8_19"));
    CHECK(e.lower == 2);
    CHECK(e.upper == 2);
    CHECK(e.exact());
    REQUIRE(e.certificate);
    CHECK(e.certificate->k == 2);
    CHECK(e.certificate->verify());

    // a lone staircase carries the unknot itself
    auto s = lambda_bounds(staircase(2));
    CHECK(s.lower == 2);
    CHECK(s.upper == 2);
    CHECK_FALSE(s.pawn_found);
    REQUIRE(s.certificate);
    CHECK(s.certificate->verify());
}

TEST_CASE("verify_identity") {
    auto a = verify_s1_tensor_sn(1);
    CHECK(a.ok());
    CHECK(a.witness_found);
    auto b = verify_knight_tensor_knight(GMonomial(1, 1), 1, 2);
    CHECK(b.ok());
    CHECK(b.witness_found);
    CHECK(verify_s1_tensor_dual_s1().ok());
    for (const auto& r : verify_identity("all")) {
        CAPTURE(r.name);
        CAPTURE(r.params);
        CHECK(r.ok());
    }
    CHECK_THROWS_AS(verify_identity("nonsense"), Error);
}

TEST_CASE("property: u_G of a direct sum is the maximum") {
    std::mt19937 rng(23);
    for (int t = 0; t < 60; ++t) {
        auto a = testing::random_sum(rng, 2), b = testing::random_sum(rng, 2);
        CHECK(u_G(direct_sum(a, b)) == std::max(u_G(a), u_G(b)));
        CHECK(u_G(testing::scramble(direct_sum(a, b), rng, 20)) == std::max(u_G(a), u_G(b)));
    }
}

TEST_CASE("property: decomposition witnesses reproduce the input") {
    std::mt19937 rng(29);
    for (int t = 0; t < 60; ++t) {
        auto c = testing::scramble(testing::random_sum(rng, 3), rng, 30);
        auto d = decompose(c);
        CHECK(d.verify());
        std::size_t gens = 0;
        for (const auto& p : d.pieces) gens += p.gens.size();
        CHECK(gens == static_cast<std::size_t>(d.block.size()));
    }
}

TEST_CASE("property: lambda bounds") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> which(0, 3), pw(1, 3);
    auto gen = [&] {
        // one pawn plus pieces whose lambda against zero is finite
        FreeComplex c = pawn();
        for (int k = 0; k < 2; ++k) {
            switch (which(rng)) {
                case 0: c = direct_sum(c, knight(GMonomial(1, pw(rng)), {pw(rng), 2 * pw(rng)})); break;
                case 1: c = direct_sum(c, tensor(knight(GMonomial(1, 1)), knight(GMonomial(3)))); break;
                case 2: c = direct_sum(c, shifted(tensor(knight(GMonomial(1, 2)), knight(GMonomial(2))), 1, 2)); break;
                default: break;
            }
        }
        return c;
    };
    for (int t = 0; t < 25; ++t) {
        auto a = gen(), b = gen();
        auto la = lambda_bounds(a), lb = lambda_bounds(b);
        REQUIRE(la.upper);
        REQUIRE(lb.upper);
        CHECK(u_G(a) <= *la.upper);
        CHECK(la.lower <= *la.upper);
        REQUIRE(la.certificate);
        CHECK(la.certificate->verify());
        auto lt = lambda_bounds(tensor(a, b));
        REQUIRE(lt.upper);
        CHECK(*lt.upper <= *la.upper + *lb.upper);
        auto ld = lambda_bounds(dual(a));
        if (la.exact() && ld.exact()) CHECK(*ld.upper == *la.upper);
    }
    for (int n = 1; n <= 4; ++n) {
        auto l = lambda_bounds(staircase(n));
        CHECK(l.lower == n);
        CHECK(l.upper == n);
        // a pawn next to a staircase gives free rank 2, which no knot has
        auto two = lambda_bounds(with_pawn(staircase(n)));
        CHECK_FALSE(two.upper);
    }
}

TEST_CASE("property: tensor powers of S_1") {
    FreeComplex c = staircase(1);
    for (int n = 2; n <= 4; ++n) {
        c = tensor(c, staircase(1));
        auto d = decompose(c);
        CHECK(d.verify());
        CHECK(d.count(Piece::Kind::Staircase) == 1);
        CHECK(d.count(Piece::Kind::Opaque) == 0);
        for (const auto& p : d.pieces)
            if (p.kind == Piece::Kind::Staircase) CHECK(p.n == n);
        CHECK(u_G(c) == n);
    }
}
