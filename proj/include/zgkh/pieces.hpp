#pragma once

// Piece catalogue, certified decompositions, G-torsion orders and lambda bounds.

#include "zgkh/chain.hpp"
#include "zgkh/tqft.hpp"

#include <optional>
#include <string>
#include <vector>

namespace zgkh {

struct Piece {
    enum class Kind { Pawn, Knight, KnightTensor, Staircase, DualStaircase, Opaque };
    Kind kind = Kind::Opaque;
    // Pawn: its grading.  Knight and KnightTensor: the grading of the bottom
    // generator.  Staircase and DualStaircase: the shift relative to
    // staircase(n) / dual_staircase(n).  Opaque: lowest generator.
    Grading at;
    GMonomial z1, z2;       // knight label(s)
    int n = 0;              // staircase rank parameter
    std::vector<int> gens;  // generator indices in Decomposition::block
    FreeComplex complex;    // the block restricted to `gens`, in that order
};

const char* kind_name(Piece::Kind k);
std::string describe(const Piece& p);

struct Decomposition {
    FreeComplex reduced;  // the input after unit elimination
    FreeComplex block;    // reduced in the new basis; block diagonal
    ChainMap P, Pinv;     // block = Pinv * reduced * P
    std::vector<Piece> pieces;

    // recomputes Pinv * P = 1 and Pinv * d * P = block exactly
    bool verify() const;
    std::size_t count(Piece::Kind k) const;
};

Decomposition decompose(const FreeComplex& c);
nlohmann::json to_json(const Decomposition& d);

FreeComplex staircase(int n);
FreeComplex dual_staircase(int n);
// the catalogue complex of a piece placed at its grading
FreeComplex piece_complex(const Piece& p);

// Smallest n with G^n x a boundary, nullopt for non-torsion classes.
std::optional<int> torsion_order(const HomClass& x);
// Largest G-torsion order at one grading
int torsion_order_at(const FreeComplex& c, Grading g);
int u_G(const FreeComplex& c);
// proof that G^n x is not a boundary; nullopt when it is one
std::optional<SolverRefutation> boundary_refutation(const HomClass& x, int n);

struct ZeroLambda {
    std::optional<int> k;                    // smallest k with G^k id nullhomotopic
    ChainMap h;                              // h d + d h = G^k id
    std::optional<SolverRefutation> below;   // proof that k - 1 fails
};
// kmax < 0 selects (q_max - q_min) / 2 + 1
ZeroLambda lambda_zero_upper(const FreeComplex& c, int kmax = -1);

struct LambdaCertificate {
    int k = 0;
    FreeComplex complex, unknot;
    ChainMap f, g, h, h_prime;  // g f - G^k = h d + d h,  f g - G^k = h' d' + d' h'
    bool verify() const;
};
nlohmann::json to_json(const LambdaCertificate& c);

struct LambdaBounds {
    int lower = 0;
    std::optional<int> upper;
    bool pawn_found = false;  // otherwise a staircase carries the unknot, if anything
    std::optional<LambdaCertificate> certificate;
    int u_g = 0, u_g_mirror = 0;
    bool exact() const { return upper && *upper == lower; }
};
LambdaBounds lambda_bounds(const FreeComplex& c);
nlohmann::json to_json(const LambdaBounds& b);

struct IdentityReport {
    std::string name;
    std::string params;
    bool invariants_agree = false;
    bool witness_found = false;
    std::string detail;
    bool ok() const { return invariants_agree; }
};
IdentityReport verify_s1_tensor_sn(int n);
IdentityReport verify_knight_tensor_staircase(const GMonomial& k, int n, bool dual_side = false);
IdentityReport verify_knight_tensor_knight(const GMonomial& z, int a, int b);
IdentityReport verify_s1_tensor_dual_s1();
// "S1_tensor_Sn", "knight_tensor_staircase", "knight_tensor_knight",
// "S1_tensor_dualS1" or "all"
std::vector<IdentityReport> verify_identity(const std::string& name);
nlohmann::json to_json(const IdentityReport& r);

}  // namespace zgkh
