#pragma once

// Shared fixtures for the test executables: the knot table, table-string parsing
// and random generators for property tests.

#include "zgkh/chain.hpp"
#include "zgkh/pieces.hpp"
#include "zgkh/tqft.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#ifndef ZGKH_TEST_DATA
#define ZGKH_TEST_DATA "tests/data"
#endif

namespace testing {

struct KnotRecord {
    std::string name;
    std::vector<std::array<int, 4>> pd;
    int rasmussen = 0;
    std::string khr, khu;
};

inline const std::vector<KnotRecord>& knot_table() {
    static const std::vector<KnotRecord> table = [] {
        std::ifstream in(std::string(ZGKH_TEST_DATA) + "/knots.json");
        if (!in) throw std::runtime_error("cannot open knots.json");
        nlohmann::json j;
        in >> j;
        std::vector<KnotRecord> out;
        for (const auto& k : j) {
            KnotRecord r;
            r.name = k.at("name").get<std::string>();
            for (const auto& x : k.at("pd")) r.pd.push_back({x[0], x[1], x[2], x[3]});
            r.rasmussen = k.at("rasmussen").get<int>();
            r.khr = k.at("khr").get<std::string>();
            r.khu = k.at("khu").get<std::string>();
            out.push_back(std::move(r));
        }
        return out;
    }();
    return table;
}

inline const KnotRecord& knot(const std::string& name) {
    for (const auto& k : knot_table())
        if (k.name == name) return k;
    throw std::runtime_error("no knot " + name);
}

inline zgkh::FreeComplex knot_complex(const std::string& name) {
    auto pd = zgkh::pd_from_tuples(knot(name).pd);
    return zgkh::build_reduced_complex(pd, zgkh::make_basepoint(pd));
}

// (t, q, torsion order or 0 for free) -> multiplicity, from a Poincare polynomial
// such as "q+q^(3)+t^(2)*q^(5)+t^(3)*q^(7)*T^(2)".
using PoincareTable = std::map<std::tuple<int, int, int>, int>;

inline PoincareTable parse_poincare(const std::string& s) {
    PoincareTable out;
    std::size_t pos = 0;
    auto read_int = [&](std::size_t& p) {
        bool paren = p < s.size() && s[p] == '(';
        if (paren) ++p;
        std::size_t start = p;
        if (p < s.size() && s[p] == '-') ++p;
        while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
        int v = std::stoi(s.substr(start, p - start));
        if (paren) ++p;
        return v;
    };
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+') ++pos;
        else if (s[pos] == '-') {
            sign = -1;
            ++pos;
        }
        int coef = 1, t = 0, q = 0, tor = 0;
        if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
            coef = read_int(pos);
            if (pos < s.size() && s[pos] == '*') ++pos;
        }
        while (pos < s.size() && (s[pos] == 't' || s[pos] == 'q' || s[pos] == 'T')) {
            char var = s[pos++];
            int e = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                e = read_int(pos);
            }
            (var == 't' ? t : var == 'q' ? q : tor) = e;
            if (pos < s.size() && s[pos] == '*') ++pos;
        }
        out[{t, q, tor}] += sign * coef;
    }
    return out;
}

inline PoincareTable table_of(const std::map<zgkh::Grading, zgkh::HomologyGroup>& h) {
    PoincareTable out;
    for (const auto& [g, grp] : h) {
        if (grp.free_rank) out[{g.i, g.q, 0}] += grp.free_rank;
        for (const auto& t : grp.torsion) out[{g.i, g.q, static_cast<int>(t)}] += 1;
    }
    return out;
}

// A random catalogue piece at a random grading.
inline zgkh::FreeComplex random_piece(std::mt19937& rng) {
    std::uniform_int_distribution<int> kind(0, 4), shift(-3, 3), pw(1, 3), small(1, 3), which(0, 3);
    int i = shift(rng), q = 2 * shift(rng);
    switch (kind(rng)) {
        case 0: return zgkh::pawn({i, q});
        case 1: return zgkh::knight(zgkh::GMonomial(1, pw(rng)), {i, q});
        case 2: {
            static const int primes[] = {2, 3, 4, 5};
            return zgkh::knight(zgkh::GMonomial(primes[which(rng)], 0), {i, q});
        }
        case 3: return zgkh::shifted(zgkh::staircase(small(rng)), i, q);
        default: return zgkh::shifted(zgkh::dual_staircase(small(rng)), i, q);
    }
}

// Conjugates the differential by random elementary homogeneous basis changes, so
// the result is isomorphic to the input but no longer block diagonal.
inline zgkh::FreeComplex scramble(const zgkh::FreeComplex& c, std::mt19937& rng, int moves) {
    zgkh::ChainMap d = zgkh::differential_map(c);
    int n = c.size();
    if (n < 2) return c;
    std::uniform_int_distribution<int> pick(0, n - 1), coef(-2, 2);
    for (int m = 0; m < moves; ++m) {
        int a = pick(rng), b = pick(rng);
        if (a == b || c.gens[a].i != c.gens[b].i) continue;
        // e_b -> e_b + x G^k e_a is homogeneous when q_a = q_b + 2k
        int dq = c.gens[a].q - c.gens[b].q;
        if (dq < 0 || dq % 2) continue;
        int k = dq / 2;
        int x = coef(rng);
        if (x == 0) continue;
        zgkh::GPolynomial u(zgkh::GMonomial(x, k));
        zgkh::ChainMap P = zgkh::scalar_map(n, zgkh::GPolynomial(zgkh::Int(1)));
        zgkh::ChainMap Pinv = P;
        P.add(b, a, u);
        Pinv.add(b, a, -u);
        d = zgkh::compose(Pinv, zgkh::compose(d, P));
    }
    zgkh::FreeComplex out;
    out.gens = c.gens;
    for (const auto& [key, v] : d.e) {
        auto mono = v.as_monomial();
        if (!mono) throw std::runtime_error("scramble produced a non-homogeneous entry");
        if (!mono->is_zero()) out.set(key.first, key.second, *mono);
    }
    return out;
}

inline zgkh::FreeComplex random_sum(std::mt19937& rng, int pieces) {
    zgkh::FreeComplex c;
    for (int k = 0; k < pieces; ++k) c = zgkh::direct_sum(c, random_piece(rng));
    return c;
}

// Specialized homology tables and u_G values, with the global (i, q) shift removed
// by moving the unique pawn over Q[G] to (0, 0).
struct CanonicalInvariants {
    std::vector<zgkh::SpecializedHomology> tables;
    int ug = 0, ug_dual = 0;
    bool operator==(const CanonicalInvariants& o) const {
        return tables == o.tables && ug == o.ug && ug_dual == o.ug_dual;
    }
};

inline CanonicalInvariants canonical_invariants(const zgkh::FreeComplex& c) {
    zgkh::Grading pawn_at;
    int pawns = 0;
    for (const auto& p : zgkh::field_decomposition(c, 0))
        if (p.k < 0) {
            pawn_at = p.at;
            ++pawns;
        }
    if (pawns != 1) throw std::runtime_error("expected exactly one pawn over Q[G]");
    using zgkh::CoefficientSpec;
    const CoefficientSpec specs[] = {CoefficientSpec::integers_g_zero(), CoefficientSpec::field_g_one(0),
                                     CoefficientSpec::field_g_one(2),    CoefficientSpec::field_graded(0),
                                     CoefficientSpec::field_graded(2),   CoefficientSpec::field_graded(3)};
    CanonicalInvariants out;
    for (const auto& s : specs) out.tables.push_back(zgkh::specialized_homology(c, s).shifted(-pawn_at.i, -pawn_at.q));
    out.ug = zgkh::u_G(c);
    out.ug_dual = zgkh::u_G(zgkh::dual(c));
    return out;
}

}  // namespace testing
