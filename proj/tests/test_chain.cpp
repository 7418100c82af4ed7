#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "zgkh/chain.hpp"
#include "zgkh/pieces.hpp"
#include "zgkh/tqft.hpp"

#include <algorithm>
#include <random>

using namespace zgkh;

namespace {

FreeComplex two_gen(Grading a, Grading b, GMonomial e) {
    FreeComplex c;
    c.add_gen(a);
    c.add_gen(b);
    c.set(0, 1, e);
    return c;
}

FreeComplex trefoil() {
    auto pd = parse_braid({1, 1, 1});
    return build_reduced_complex(pd, make_basepoint(pd));
}

}  // namespace

TEST_CASE("validate") {
    CHECK(validate(pawn({0, 0})).ok());
    CHECK(validate(two_gen({0, 6}, {1, 8}, GMonomial(1, 1))).ok());
    auto bad = validate(two_gen({0, 6}, {1, 8}, GMonomial(1, 2)));
    CHECK(bad.kind == Violation::Kind::Homogeneity);
    CHECK(bad.source == 0);
    CHECK(bad.target == 1);
    CHECK(validate(two_gen({0, 0}, {2, 0}, GMonomial(1, 0))).kind == Violation::Kind::HomologicalStep);

    FreeComplex sq;  // 2 then 3 composes to 6, not zero
    sq.add_gen({0, 0});
    sq.add_gen({1, 0});
    sq.add_gen({2, 0});
    sq.set(0, 1, GMonomial(2));
    sq.set(1, 2, GMonomial(3));
    CHECK(validate(sq).kind == Violation::Kind::DSquared);
    CHECK_THROWS_AS(require_valid(sq, "test"), Error);
}

TEST_CASE("gaussian_eliminate") {
    CHECK(gaussian_eliminate(two_gen({0, 0}, {1, 0}, GMonomial(1))).empty());
    CHECK(gaussian_eliminate(two_gen({0, 0}, {1, 0}, GMonomial(-1))).empty());

    FreeComplex three;
    three.add_gen({0, 0});
    three.add_gen({1, 0});
    three.add_gen({1, 2});
    three.set(0, 1, GMonomial(1));
    three.set(0, 2, GMonomial(1, 1));
    auto r3 = gaussian_eliminate(three);
    CHECK(r3.size() == 1);
    CHECK(r3.gens[0] == Grading{1, 2});
    CHECK(r3.entries.empty());

    // hand computation of the correction term: y -> g2 becomes 3G^2 - G * 1 * G = 2G^2
    FreeComplex four;
    four.add_gen({0, 0});   // x
    four.add_gen({1, 0});   // g1
    four.add_gen({1, 2});   // g2
    four.add_gen({0, -2});  // y
    four.set(0, 1, GMonomial(1));
    four.set(0, 2, GMonomial(1, 1));
    four.set(3, 1, GMonomial(1, 1));
    four.set(3, 2, GMonomial(3, 2));
    REQUIRE(validate(four).ok());
    auto r4 = gaussian_eliminate(four);
    REQUIRE(r4.size() == 2);
    int y = r4.gens[0] == Grading{0, -2} ? 0 : 1;
    CHECK(r4.gens[y] == Grading{0, -2});
    CHECK(r4.gens[1 - y] == Grading{1, 2});
    CHECK(r4.get(y, 1 - y) == GMonomial(2, 2));
    CHECK(r4.entries.size() == 1);

    auto t = trefoil();
    CHECK(t.size() == 3);
    CHECK(gaussian_eliminate(t) == t);
}

TEST_CASE("direct_sum") {
    auto k = knight(GMonomial(1, 1), {2, 6});
    CHECK(direct_sum(k, FreeComplex{}) == k);
    auto pp = direct_sum(pawn(), pawn());
    CHECK(pp.size() == 2);
    CHECK(pp.entries.empty());
    auto tre = direct_sum(pawn({0, 2}), k);
    CHECK(tre.gens == std::vector<Grading>{{0, 2}, {2, 6}, {3, 8}});
    CHECK(tre.get(1, 2) == GMonomial(1, 1));
    // the same shape as the reduced trefoil complex, up to the order of generators
    auto t = trefoil();
    CHECK(u_G(t) == u_G(tre));
    CHECK(specialized_homology(t, CoefficientSpec::field_graded(0)) ==
          specialized_homology(tre, CoefficientSpec::field_graded(0)));
}

TEST_CASE("tensor") {
    auto k = knight(GMonomial(1, 1), {1, 4});
    CHECK(tensor(pawn(), k) == k);
    CHECK(tensor(k, pawn()) == k);

    // Koszul sign on the second factor: kappa(G) (x) kappa(2) has entries G, G, 2, -2
    auto kg = knight(GMonomial(1, 1));
    auto k2 = knight(GMonomial(2, 0));
    auto a = tensor(kg, k2);
    REQUIRE(a.size() == 4);
    CHECK(validate(a).ok());
    CHECK(a.get(0, 2) == GMonomial(1, 1));
    CHECK(a.get(1, 3) == GMonomial(1, 1));
    CHECK(a.get(0, 1) == GMonomial(2));
    CHECK(a.get(2, 3) == GMonomial(-2));
    // kappa(2) (x) kappa(G) carries the entries 2, 2, G, -G
    auto b = tensor(k2, kg);
    CHECK(b.get(0, 2) == GMonomial(2));
    CHECK(b.get(1, 3) == GMonomial(2));
    CHECK(b.get(0, 1) == GMonomial(1, 1));
    CHECK(b.get(2, 3) == GMonomial(-1, 1));
    CHECK(u_G(a) == u_G(b));

    auto rep = verify_s1_tensor_sn(1);
    CHECK(rep.invariants_agree);
    CHECK(rep.witness_found);
}

TEST_CASE("dual") {
    CHECK(dual(pawn()) == pawn());
    auto d = dual(knight(GMonomial(1, 1), {0, 0}));
    REQUIRE(d.size() == 2);
    CHECK(validate(d).ok());
    // the entry now runs from (-1, -2) to (0, 0)
    bool found = false;
    for (const auto& [key, v] : d.entries) {
        CHECK(d.gens[key.first] == Grading{-1, -2});
        CHECK(d.gens[key.second] == Grading{0, 0});
        CHECK(v == GMonomial(1, 1));
        found = true;
    }
    CHECK(found);
    CHECK(u_G(dual(trefoil())) == 1);
}

TEST_CASE("homology_at") {
    auto p = homology_at(pawn(), {0, 0});
    CHECK(p.free_rank == 1);
    CHECK(p.torsion.empty());
    CHECK_FALSE(p.g_action_zero);  // G carries the generator to G * 1 at (0, -2)

    auto t = trefoil();
    auto h38 = homology_at(t, {3, 8});
    CHECK(h38.free_rank == 1);
    CHECK(h38.torsion.empty());
    CHECK(h38.g_action_zero);
    for (int q = -10; q <= 20; ++q) CHECK(homology_at(t, {2, q}).is_zero());
    // higher copies G^m of the knight target are boundaries
    CHECK(homology_at(t, {3, 6}).is_zero());
    // the pawn contributes Z[G]{2}: Z in every q = 2 - 2m, with G acting injectively
    CHECK(homology_at(t, {0, 2}).free_rank == 1);
    CHECK(homology_at(t, {0, -4}).free_rank == 1);
    CHECK_FALSE(homology_at(t, {0, 2}).g_action_zero);
    CHECK(homology_at(t, {0, 4}).is_zero());
}

TEST_CASE("solve_chain_map") {
    auto id = solve_chain_map(pawn(), pawn(), false);
    REQUIRE(id.size() == 1);
    CHECK(id[0].get(0, 0).coeff(0) * id[0].get(0, 0).coeff(0) == 1);

    // knight source generator to a pawn at the same grading: one free coefficient
    auto kg = knight(GMonomial(1, 1), {0, 0});
    auto to_src = solve_chain_map(kg, pawn({0, 0}), false);
    REQUIRE(to_src.size() == 1);
    CHECK(to_src[0].e.size() == 1);
    CHECK(to_src[0].e.count({0, 0}) == 1);
    CHECK(solve_chain_map(kg, pawn({0, 0}), true).size() == 1);
    // to a pawn at the target grading: f(G t) = G f(t) must vanish, so no maps
    CHECK(solve_chain_map(kg, pawn({1, 2}), false).empty());

    for (const auto& f : solve_chain_map(kg, kg, false)) CHECK(is_chain_map(kg, kg, f));

    auto t = trefoil();
    auto lb = lambda_bounds(t);
    REQUIRE(lb.certificate);
    CHECK(is_chain_map(lb.certificate->complex, lb.certificate->unknot, lb.certificate->f));
    CHECK(is_chain_map(lb.certificate->unknot, lb.certificate->complex, lb.certificate->g));
    // the trefoil pawn sits at q = 2
    CHECK_FALSE(solve_chain_map(t, pawn({0, 2}), true).empty());
}

TEST_CASE("solve_nullhomotopy") {
    auto kg = knight(GMonomial(1, 1));
    auto r = solve_nullhomotopy(kg, scalar_map(2, GPolynomial::G()));
    REQUIRE(r.exists);
    CHECK(homotopy_boundary(kg, r.h) == scalar_map(2, GPolynomial::G()));
    CHECK(r.h.get(1, 0) * r.h.get(1, 0) == GPolynomial(Int(1)));  // a unit back along the knight

    auto k2 = knight(GMonomial(2));
    for (int k = 0; k <= 5; ++k) {
        auto n = solve_nullhomotopy(k2, scalar_map(2, GPolynomial::G(k)));
        CHECK_FALSE(n.exists);
        REQUIRE(n.refutation);
        CHECK(n.refutation->verify());
    }

    // a staircase has a free summand in homology, so no power of G is nullhomotopic
    for (int n = 1; n <= 4; ++n) {
        auto s = staircase(n);
        auto res = solve_nullhomotopy(s, scalar_map(s.size(), GPolynomial::G(n)));
        CHECK_FALSE(res.exists);
        REQUIRE(res.refutation);
        CHECK(res.refutation->verify());
    }
    for (int n = 1; n <= 4; ++n) {
        auto k = knight(GMonomial(1, n));
        auto phi = scalar_map(2, GPolynomial::G(n));
        auto res = solve_nullhomotopy(k, phi);
        REQUIRE(res.exists);
        CHECK(homotopy_boundary(k, res.h) == phi);
    }
}

TEST_CASE("json round trip") {
    std::mt19937 rng(7);
    for (int t = 0; t < 50; ++t) {
        auto c = testing::scramble(testing::random_sum(rng, 3), rng, 10);
        CHECK(complex_from_json(to_json(c)) == c);
        CHECK(complex_from_json(nlohmann::json::parse(to_json(c).dump())) == c);
    }
    CHECK_THROWS_AS(complex_from_json(nlohmann::json::parse(R"({"gens": [[0,0]], "entries": [[0,5,1,0]]})")),
                    Error);
}

TEST_CASE("property: elimination preserves validity and homology") {
    std::mt19937 rng(11);
    for (int t = 0; t < 60; ++t) {
        // pieces plus contractible unit knights, scrambled
        auto c = testing::random_sum(rng, 3);
        std::uniform_int_distribution<int> sh(-2, 2);
        for (int u = 0; u < 2; ++u) c = direct_sum(c, knight(GMonomial(1), {sh(rng), 2 * sh(rng)}));
        c = testing::scramble(c, rng, 25);
        REQUIRE(validate(c).ok());
        auto r = gaussian_eliminate(c);
        CHECK(validate(r).ok());
        for (const auto& [key, v] : r.entries) CHECK_FALSE(v.is_unit());
        for (int i = min_degree(c) - 1; i <= max_degree(c) + 1; ++i)
            for (int q = -16; q <= 16; ++q) {
                auto a = homology_at(c, {i, q}), b = homology_at(r, {i, q});
                CHECK(a.free_rank == b.free_rank);
                CHECK(a.torsion == b.torsion);
            }
    }
}

TEST_CASE("property: tensor associativity, unit and dual involution") {
    std::mt19937 rng(13);
    for (int t = 0; t < 40; ++t) {
        auto a = testing::random_piece(rng), b = testing::random_piece(rng), c = testing::random_piece(rng);
        auto left = tensor(tensor(a, b), c), right = tensor(a, tensor(b, c));
        CHECK(left == right);
        CHECK(validate(left).ok());
        CHECK(tensor(pawn(), a) == a);
        CHECK(tensor(a, pawn()) == a);
        auto s = testing::scramble(direct_sum(a, b), rng, 10);
        CHECK(dual(dual(s)) == s);
        CHECK(validate(dual(s)).ok());
    }
}

TEST_CASE("property: dual mirrors the free summands") {
    std::mt19937 rng(17);
    for (int t = 0; t < 30; ++t) {
        FreeComplex c;
        std::uniform_int_distribution<int> sh(-2, 2), n(1, 3);
        for (int k = n(rng); k > 0; --k) c = direct_sum(c, pawn({sh(rng), 2 * sh(rng)}));
        c = direct_sum(c, knight(GMonomial(1), {sh(rng), 2 * sh(rng)}));
        c = testing::scramble(c, rng, 15);
        auto d = dual(c);
        auto fc = field_decomposition(c, 0), fd = field_decomposition(d, 0);
        REQUIRE(fc.size() == fd.size());
        std::vector<Grading> gc, gd;
        for (const auto& p : fc) gc.push_back(p.at);
        for (const auto& p : fd) gd.push_back({-p.at.i, -p.at.q});
        std::sort(gc.begin(), gc.end());
        std::sort(gd.begin(), gd.end());
        CHECK(gc == gd);
        // the top summand's shift is where both free ranks are read off
        auto top = *std::max_element(gc.begin(), gc.end(), [](Grading x, Grading y) { return x.q < y.q; });
        CHECK(homology_at(c, top).free_rank >= 1);
        CHECK(homology_at(d, {-top.i, -top.q}).free_rank >= 1);
    }
}
