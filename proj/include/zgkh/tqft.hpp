#pragma once

// Knot diagrams to reduced Z[G] complexes via the cube of resolutions and the
// reduced Frobenius algebra Z[G][X]/(X^2 + GX) / (X).

#include "zgkh/chain.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace zgkh {

// Crossings are normalized so that slot 0 is the incoming under strand and
// slot 2 the outgoing one; slots run counterclockwise.  Edge labels are
// 0 .. 2n-1 in traversal order starting at slot 0 of the first crossing.
struct PDCode {
    std::vector<std::array<int, 4>> crossings;
    std::vector<int> signs;     // +1 / -1 per crossing
    std::vector<int> original;  // original label of each normalized edge
    int n_plus = 0, n_minus = 0;

    int size() const { return static_cast<int>(crossings.size()); }
    int edges() const { return 2 * size(); }
    // normalized edge for an original label, -1 if absent
    int edge_of(int original_label) const;
    std::string to_string() const;  // X[a,b,c,d] ... with original labels
};

// Accepts "X[1,5,2,4] X[3,1,4,6] ...", "PD[X[...], ...]", "[[1,5,2,4], ...]"
// and "" or "[]" for the crossingless unknot.
PDCode parse_pd(const std::string& text);
PDCode pd_from_tuples(const std::vector<std::array<int, 4>>& tuples);
// "[1,1,1]", "1 1 1" or "1,-2,1,-2"; generator i > 0 is a positive sigma_i.
std::vector<int> parse_braid_word(const std::string& text);
PDCode parse_braid(const std::vector<int>& word);

struct BasePoint {
    int edge = 0;  // normalized edge label
};
// `original_label` < 0 selects the lowest original label
BasePoint make_basepoint(const PDCode& pd, int original_label = -1);

struct ResolutionState {
    std::uint64_t vertex = 0;
    std::vector<int> circle_of_edge;
    int circles = 0;
    int marked = 0;
};
ResolutionState resolve(const PDCode& pd, std::uint64_t vertex, BasePoint bp = {});

struct CubeOptions {
    std::size_t cap = 2000000;  // live generator limit
};
FreeComplex build_reduced_complex(const PDCode& pd, BasePoint bp = {}, CubeOptions opt = {});

// Integer complex obtained by replacing each Z[G]{m} by Z{m-1} (+) Z{m+1}.  All
// entries of the result have power 0; read it with integer_homology.
FreeComplex unreduced_from_reduced(const FreeComplex& c);

// Homology of the G = 0 specialization, one group per (i, q).
std::map<Grading, HomologyGroup> integer_homology(const FreeComplex& c);

struct FieldPiece {
    Grading at;
    int k = -1;  // -1 for a pawn, otherwise a knight G^k starting at `at`
    auto operator<=>(const FieldPiece&) const = default;
};

struct SpecializedHomology {
    CoefficientSpec spec;
    std::map<Grading, HomologyGroup> groups;  // IntegersGZero
    std::map<int, int> dims;                  // FieldGOne, by homological degree
    std::vector<FieldPiece> pieces;           // FieldPGraded, sorted

    int total_dimension() const;
    // the same table after a global (i, q) shift
    SpecializedHomology shifted(int di, int dq) const;
    bool operator==(const SpecializedHomology& o) const;
};
SpecializedHomology specialized_homology(const FreeComplex& c, const CoefficientSpec& spec);
nlohmann::json to_json(const SpecializedHomology& h);

// Over F[G] with F = F_p (p prime) or Q (p = 0): the canonical pawn and knight
// decomposition of a graded complex.
std::vector<FieldPiece> field_decomposition(const FreeComplex& c, int p);
int s_invariant(const FreeComplex& c, int p);

// The closed genus-g surface under the TQFT: 0 for even g, 2 G^{g-1} for odd g.
GPolynomial closed_surface_value(int genus);

}  // namespace zgkh
