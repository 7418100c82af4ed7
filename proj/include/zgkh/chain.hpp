#pragma once

// Graded chain complexes of free shifted Z[G]-modules.
//
// A generator with grading (i, q) stands for a copy of Z[G]{q} in homological
// degree i.  An entry c*G^k from generator s to generator t requires
// t.i = s.i + 1 and t.q = s.q + 2k.

#include "zgkh/intlin.hpp"
#include "zgkh/zring.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace zgkh {

struct Grading {
    int i = 0;
    int q = 0;
    auto operator<=>(const Grading&) const = default;
};

using EntryKey = std::pair<int, int>;  // (source, target)

class FreeComplex {
public:
    std::vector<Grading> gens;
    std::map<EntryKey, GMonomial> entries;

    int size() const { return static_cast<int>(gens.size()); }
    bool empty() const { return gens.empty(); }
    int add_gen(Grading g) {
        gens.push_back(g);
        return size() - 1;
    }
    void set(int s, int t, const GMonomial& v);
    void add(int s, int t, const GMonomial& v);
    GMonomial get(int s, int t) const;

    bool operator==(const FreeComplex& o) const { return gens == o.gens && entries == o.entries; }
};

FreeComplex pawn(Grading at = {0, 0});
// z-knight: a generator at `at` mapping by z to one at (at.i + 1, at.q + 2*power(z))
FreeComplex knight(const GMonomial& z, Grading at = {0, 0});
FreeComplex shifted(const FreeComplex& c, int di, int dq);

struct Violation {
    enum class Kind { None, BadIndex, HomologicalStep, Homogeneity, DSquared };
    Kind kind = Kind::None;
    int source = -1, target = -1;
    std::string message;
    bool ok() const { return kind == Kind::None; }
};
Violation validate(const FreeComplex& c);
// throws an invariant error if validate fails
void require_valid(const FreeComplex& c, const char* where);

nlohmann::json to_json(const FreeComplex& c);
FreeComplex complex_from_json(const nlohmann::json& j);
std::string render(const FreeComplex& c);

// Incremental Gaussian elimination of unit entries.
class Reducer {
public:
    int add_gen(Grading g);
    void add_entry(int s, int t, const GMonomial& v);
    // eliminate every unit entry from degree i to degree i + 1
    void eliminate_degree(int i);
    void eliminate_all();
    std::size_t live() const { return live_; }
    bool alive(int g) const { return alive_[g]; }
    const Grading& grading(int g) const { return gens_[g]; }
    FreeComplex extract() const;

private:
    bool try_pivot(int x);
    void eliminate(int x, int y, const GMonomial& e);
    void remove(int g);

    std::vector<Grading> gens_;
    std::vector<char> alive_;
    std::vector<std::unordered_map<int, GMonomial>> out_, in_;
    std::size_t live_ = 0;
};

FreeComplex gaussian_eliminate(const FreeComplex& c);
FreeComplex direct_sum(const FreeComplex& a, const FreeComplex& b);
// generator (x, y) of the product has index x * b.size() + y
FreeComplex tensor(const FreeComplex& a, const FreeComplex& b);
FreeComplex dual(const FreeComplex& c);

// Sparse matrices between free complexes, with polynomial entries so that
// ungraded maps (sums of several homogeneous parts) are representable.
struct ChainMap {
    int src_size = 0, tgt_size = 0;
    std::map<EntryKey, GPolynomial> e;  // (source generator, target generator)

    void add(int s, int t, const GPolynomial& v);
    GPolynomial get(int s, int t) const;
    bool operator==(const ChainMap& o) const {
        return src_size == o.src_size && tgt_size == o.tgt_size && e == o.e;
    }
};

ChainMap differential_map(const FreeComplex& c);
ChainMap scalar_map(int n, const GPolynomial& z);
ChainMap compose(const ChainMap& g, const ChainMap& f);  // g after f
ChainMap operator+(const ChainMap& a, const ChainMap& b);
ChainMap operator-(const ChainMap& a, const ChainMap& b);
ChainMap operator*(const GPolynomial& z, const ChainMap& a);
bool is_chain_map(const FreeComplex& src, const FreeComplex& dst, const ChainMap& f);
// h d + d h on a single complex
ChainMap homotopy_boundary(const FreeComplex& c, const ChainMap& h);
// h' d_src + d_dst h' for maps between two complexes
ChainMap homotopy_boundary(const FreeComplex& src, const FreeComplex& dst, const ChainMap& h);
nlohmann::json to_json(const ChainMap& m);

// Graded piece C_i^q: pairs (generator, m) with G^m * generator of degree q.
std::vector<std::pair<int, int>> graded_piece(const FreeComplex& c, int i, int q);
// The integer matrix of d : C_i^q -> C_{i+1}^q.
IntMat graded_block(const FreeComplex& c, int i, int q);

struct HomologyGroup {
    int free_rank = 0;
    std::vector<Int> torsion;  // invariant factors > 1
    bool g_action_zero = true; // G * H_{i,q} -> H_{i,q-2} vanishes
    bool is_zero() const { return free_rank == 0 && torsion.empty(); }
};
HomologyGroup homology_at(const FreeComplex& c, Grading g);

struct HomClass {
    std::shared_ptr<const FreeComplex> ambient;
    Grading grading;
    std::vector<Int> coords;  // over graded_piece(ambient, i, q)
};

// Lattice basis of chain maps src -> dst of quantum degree qshift.  In graded
// mode only homological offset 0 is allowed; ungraded mode allows every offset.
std::vector<ChainMap> solve_chain_map(const FreeComplex& src, const FreeComplex& dst, bool ungraded,
                                      int qshift = 0);

struct SolverRefutation {
    IntMat A;
    std::vector<Int> b;
    InfeasibilityCertificate y;
    bool verify() const { return check_certificate(A, b, y); }
};

struct NullhomotopyResult {
    bool exists = false;
    ChainMap h;
    std::optional<SolverRefutation> refutation;
};
NullhomotopyResult solve_nullhomotopy(const FreeComplex& c, const ChainMap& phi);
// generalisation to maps between two complexes: h' d_src + d_dst h' = phi
NullhomotopyResult solve_nullhomotopy(const FreeComplex& src, const FreeComplex& dst, const ChainMap& phi);

int min_degree(const FreeComplex& c);
int max_degree(const FreeComplex& c);

}  // namespace zgkh
