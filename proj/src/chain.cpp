#include "zgkh/chain.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace zgkh {

void FreeComplex::set(int s, int t, const GMonomial& v) {
    if (v.is_zero()) entries.erase({s, t});
    else entries[{s, t}] = v;
}

void FreeComplex::add(int s, int t, const GMonomial& v) {
    if (v.is_zero()) return;
    auto it = entries.find({s, t});
    if (it == entries.end()) {
        entries.emplace(EntryKey{s, t}, v);
        return;
    }
    GMonomial r = mono_add(it->second, v);
    if (r.is_zero()) entries.erase(it);
    else it->second = r;
}

GMonomial FreeComplex::get(int s, int t) const {
    auto it = entries.find({s, t});
    return it == entries.end() ? GMonomial() : it->second;
}

FreeComplex pawn(Grading at) {
    FreeComplex c;
    c.add_gen(at);
    return c;
}

FreeComplex knight(const GMonomial& z, Grading at) {
    FreeComplex c;
    c.add_gen(at);
    c.add_gen({at.i + 1, at.q + 2 * z.power});
    c.set(0, 1, z);
    return c;
}

FreeComplex shifted(const FreeComplex& c, int di, int dq) {
    FreeComplex r = c;
    for (auto& g : r.gens) g.i += di, g.q += dq;
    return r;
}

Violation validate(const FreeComplex& c) {
    Violation v;
    for (const auto& [key, m] : c.entries) {
        auto [s, t] = key;
        if (s < 0 || t < 0 || s >= c.size() || t >= c.size()) {
            v.kind = Violation::Kind::BadIndex;
            v.source = s, v.target = t;
            v.message = "entry refers to a missing generator";
            return v;
        }
        if (m.is_zero()) continue;
        if (c.gens[t].i != c.gens[s].i + 1) {
            v.kind = Violation::Kind::HomologicalStep;
            v.source = s, v.target = t;
            v.message = "entry does not raise homological degree by one";
            return v;
        }
        if (c.gens[t].q != c.gens[s].q + 2 * m.power) {
            v.kind = Violation::Kind::Homogeneity;
            v.source = s, v.target = t;
            v.message = "entry " + to_string(m) + " is not homogeneous: q " + std::to_string(c.gens[s].q) +
                        " -> " + std::to_string(c.gens[t].q);
            return v;
        }
    }
    // d^2 = 0
    std::vector<std::vector<std::pair<int, const GMonomial*>>> out(c.size());
    for (const auto& [key, m] : c.entries) out[key.first].push_back({key.second, &m});
    for (int s = 0; s < c.size(); ++s) {
        std::map<int, GMonomial> acc;
        for (auto [t, m1] : out[s])
            for (auto [u, m2] : out[t]) {
                GMonomial p = mono_mul(*m1, *m2);
                auto it = acc.find(u);
                if (it == acc.end()) acc.emplace(u, p);
                else it->second = mono_add(it->second, p);
            }
        for (const auto& [u, m] : acc)
            if (!m.is_zero()) {
                v.kind = Violation::Kind::DSquared;
                v.source = s, v.target = u;
                v.message = "d^2 has entry " + to_string(m);
                return v;
            }
    }
    return v;
}

void require_valid(const FreeComplex& c, const char* where) {
    Violation v = validate(c);
    if (!v.ok())
        throw invariant_error(std::string(where) + ": " + v.message + " (generators " + std::to_string(v.source) +
                              " -> " + std::to_string(v.target) + ")");
}

nlohmann::json to_json(const FreeComplex& c) {
    nlohmann::json gens = nlohmann::json::array(), entries = nlohmann::json::array();
    for (const auto& g : c.gens) gens.push_back({g.i, g.q});
    for (const auto& [key, m] : c.entries)
        entries.push_back({key.first, key.second, int_to_json(m.coeff), m.power});
    return {{"gens", gens}, {"entries", entries}};
}

FreeComplex complex_from_json(const nlohmann::json& j) {
    FreeComplex c;
    try {
        for (const auto& g : j.at("gens")) c.add_gen({g.at(0).get<int>(), g.at(1).get<int>()});
        for (const auto& e : j.at("entries")) {
            int s = e.at(0).get<int>(), t = e.at(1).get<int>();
            if (s < 0 || t < 0 || s >= c.size() || t >= c.size()) throw parse_error("entry index out of range");
            c.add(s, t, GMonomial(int_from_json(e.at(2)), e.at(3).get<int>()));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw parse_error(std::string("malformed complex JSON: ") + ex.what());
    }
    return c;
}

std::string render(const FreeComplex& c) {
    std::ostringstream os;
    std::vector<int> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return c.gens[a] < c.gens[b]; });
    for (int g : order) {
        os << "g" << g << ": _" << c.gens[g].i << "R{" << c.gens[g].q << "}";
        bool first = true;
        for (auto it = c.entries.lower_bound({g, -1}); it != c.entries.end() && it->first.first == g; ++it) {
            os << (first ? "  -> " : ", ") << "g" << it->first.second << " by " << to_string(GPolynomial(it->second));
            first = false;
        }
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- Reducer

int Reducer::add_gen(Grading g) {
    gens_.push_back(g);
    alive_.push_back(1);
    out_.emplace_back();
    in_.emplace_back();
    ++live_;
    return static_cast<int>(gens_.size()) - 1;
}

void Reducer::add_entry(int s, int t, const GMonomial& v) {
    if (v.is_zero()) return;
    auto it = out_[s].find(t);
    if (it == out_[s].end()) {
        out_[s].emplace(t, v);
        in_[t].emplace(s, v);
        return;
    }
    GMonomial r = mono_add(it->second, v);
    if (r.is_zero()) {
        out_[s].erase(it);
        in_[t].erase(s);
    } else {
        it->second = r;
        in_[t][s] = r;
    }
}

void Reducer::remove(int g) {
    for (const auto& [t, m] : out_[g]) in_[t].erase(g);
    for (const auto& [s, m] : in_[g]) out_[s].erase(g);
    out_[g].clear();
    in_[g].clear();
    alive_[g] = 0;
    --live_;
}

void Reducer::eliminate(int x, int y, const GMonomial& e) {
    // x -> y by the unit e; every other path x' -> y -> ... picks up -f e^{-1} d
    std::vector<std::pair<int, GMonomial>> srcs, tgts;
    for (const auto& [s, m] : in_[y])
        if (s != x) srcs.emplace_back(s, m);
    for (const auto& [t, m] : out_[x])
        if (t != y) tgts.emplace_back(t, m);
    GMonomial einv = e;  // a unit is its own inverse
    for (const auto& [s, d] : srcs)
        for (const auto& [t, f] : tgts) add_entry(s, t, -mono_mul(mono_mul(f, einv), d));
    remove(x);
    remove(y);
}

bool Reducer::try_pivot(int x) {
    int best = -1;
    GMonomial e;
    for (const auto& [t, m] : out_[x])
        if (m.is_unit() && (best < 0 || t < best)) best = t, e = m;
    if (best < 0) return false;
    eliminate(x, best, e);
    return true;
}

void Reducer::eliminate_degree(int i) {
    std::vector<int> cand;
    for (int g = 0; g < static_cast<int>(gens_.size()); ++g)
        if (alive_[g] && gens_[g].i == i) cand.push_back(g);
    std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return gens_[a].q < gens_[b].q; });
    bool progress = true;
    while (progress) {
        progress = false;
        for (int x : cand)
            if (alive_[x] && try_pivot(x)) progress = true;
    }
}

void Reducer::eliminate_all() {
    std::set<int> degrees;
    for (int g = 0; g < static_cast<int>(gens_.size()); ++g)
        if (alive_[g]) degrees.insert(gens_[g].i);
    for (int i : degrees) eliminate_degree(i);
}

FreeComplex Reducer::extract() const {
    std::vector<int> order;
    for (int g = 0; g < static_cast<int>(gens_.size()); ++g)
        if (alive_[g]) order.push_back(g);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gens_[a] < gens_[b]; });
    std::unordered_map<int, int> idx;
    FreeComplex c;
    for (int g : order) idx[g] = c.add_gen(gens_[g]);
    for (int g : order)
        for (const auto& [t, m] : out_[g]) c.set(idx[g], idx.at(t), m);
    return c;
}

FreeComplex gaussian_eliminate(const FreeComplex& c) {
    Reducer r;
    for (const auto& g : c.gens) r.add_gen(g);
    for (const auto& [key, m] : c.entries) r.add_entry(key.first, key.second, m);
    r.eliminate_all();
    return r.extract();
}

FreeComplex direct_sum(const FreeComplex& a, const FreeComplex& b) {
    FreeComplex r = a;
    int off = a.size();
    for (const auto& g : b.gens) r.add_gen(g);
    for (const auto& [key, m] : b.entries) r.set(key.first + off, key.second + off, m);
    return r;
}

FreeComplex tensor(const FreeComplex& a, const FreeComplex& b) {
    FreeComplex r;
    int nb = b.size();
    for (const auto& x : a.gens)
        for (const auto& y : b.gens) r.add_gen({x.i + y.i, x.q + y.q});
    for (const auto& [key, m] : a.entries)
        for (int y = 0; y < nb; ++y) r.add(key.first * nb + y, key.second * nb + y, m);
    for (int x = 0; x < a.size(); ++x) {
        bool neg = (a.gens[x].i % 2) != 0;
        for (const auto& [key, m] : b.entries) r.add(x * nb + key.first, x * nb + key.second, neg ? -m : m);
    }
    return r;
}

FreeComplex dual(const FreeComplex& c) {
    FreeComplex r;
    for (const auto& g : c.gens) r.add_gen({-g.i, -g.q});
    for (const auto& [key, m] : c.entries) r.set(key.second, key.first, m);
    return r;
}

int min_degree(const FreeComplex& c) {
    int m = 0;
    for (int g = 0; g < c.size(); ++g) m = g == 0 ? c.gens[g].i : std::min(m, c.gens[g].i);
    return m;
}

int max_degree(const FreeComplex& c) {
    int m = 0;
    for (int g = 0; g < c.size(); ++g) m = g == 0 ? c.gens[g].i : std::max(m, c.gens[g].i);
    return m;
}

// --------------------------------------------------------------- ChainMap

void ChainMap::add(int s, int t, const GPolynomial& v) {
    if (v.is_zero()) return;
    auto it = e.find({s, t});
    if (it == e.end()) {
        e.emplace(EntryKey{s, t}, v);
        return;
    }
    it->second += v;
    if (it->second.is_zero()) e.erase(it);
}

GPolynomial ChainMap::get(int s, int t) const {
    auto it = e.find({s, t});
    return it == e.end() ? GPolynomial() : it->second;
}

ChainMap differential_map(const FreeComplex& c) {
    ChainMap m{c.size(), c.size(), {}};
    for (const auto& [key, v] : c.entries) m.add(key.first, key.second, GPolynomial(v));
    return m;
}

ChainMap scalar_map(int n, const GPolynomial& z) {
    ChainMap m{n, n, {}};
    for (int g = 0; g < n; ++g) m.add(g, g, z);
    return m;
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
    if (f.tgt_size != g.src_size) throw invariant_error("composing maps with mismatched shapes");
    std::vector<std::vector<std::pair<int, const GPolynomial*>>> gout(g.src_size);
    for (const auto& [key, v] : g.e) gout[key.first].push_back({key.second, &v});
    ChainMap r{f.src_size, g.tgt_size, {}};
    for (const auto& [key, v] : f.e)
        for (auto [u, w] : gout[key.second]) r.add(key.first, u, (*w) * v);
    return r;
}

ChainMap operator+(const ChainMap& a, const ChainMap& b) {
    if (a.src_size != b.src_size || a.tgt_size != b.tgt_size) throw invariant_error("adding maps of different shapes");
    ChainMap r = a;
    for (const auto& [key, v] : b.e) r.add(key.first, key.second, v);
    return r;
}

ChainMap operator-(const ChainMap& a, const ChainMap& b) { return a + (GPolynomial(Int(-1)) * b); }

ChainMap operator*(const GPolynomial& z, const ChainMap& a) {
    ChainMap r{a.src_size, a.tgt_size, {}};
    for (const auto& [key, v] : a.e) r.add(key.first, key.second, z * v);
    return r;
}

bool is_chain_map(const FreeComplex& src, const FreeComplex& dst, const ChainMap& f) {
    return compose(differential_map(dst), f) == compose(f, differential_map(src));
}

ChainMap homotopy_boundary(const FreeComplex& src, const FreeComplex& dst, const ChainMap& h) {
    return compose(h, differential_map(src)) + compose(differential_map(dst), h);
}

ChainMap homotopy_boundary(const FreeComplex& c, const ChainMap& h) { return homotopy_boundary(c, c, h); }

nlohmann::json to_json(const ChainMap& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, v] : m.e) {
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& c : v.coeffs()) coeffs.push_back(int_to_json(c));
        entries.push_back({key.first, key.second, coeffs});
    }
    return {{"src", m.src_size}, {"tgt", m.tgt_size}, {"entries", entries}};
}

// --------------------------------------------------------------- homology

std::vector<std::pair<int, int>> graded_piece(const FreeComplex& c, int i, int q) {
    std::vector<std::pair<int, int>> r;
    for (int g = 0; g < c.size(); ++g) {
        const auto& gr = c.gens[g];
        if (gr.i == i && gr.q >= q && (gr.q - q) % 2 == 0) r.emplace_back(g, (gr.q - q) / 2);
    }
    return r;
}

IntMat graded_block(const FreeComplex& c, int i, int q) {
    auto cols = graded_piece(c, i, q);
    auto rows = graded_piece(c, i + 1, q);
    std::unordered_map<int, int> row_of;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) row_of[rows[r].first] = r;
    IntMat m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        int s = cols[j].first;
        for (auto it = c.entries.lower_bound({s, -1}); it != c.entries.end() && it->first.first == s; ++it) {
            auto r = row_of.find(it->first.second);
            if (r != row_of.end()) m.at(r->second, j) = it->second.coeff;
        }
    }
    return m;
}

HomologyGroup homology_at(const FreeComplex& c, Grading g) {
    HomologyGroup h;
    IntMat in = graded_block(c, g.i - 1, g.q);
    IntMat out = graded_block(c, g.i, g.q);
    int dim = static_cast<int>(graded_piece(c, g.i, g.q).size());
    if (dim == 0) return h;
    int rin = in.cols == 0 ? 0 : rank_rational(in);
    int rout = out.rows == 0 ? 0 : rank_rational(out);
    h.free_rank = dim - rin - rout;
    if (in.cols > 0)
        for (const auto& f : smith_invariants(in))
            if (f > 1) h.torsion.push_back(f);
    // G-action into (i, q - 2)
    IntMat ker = out.rows == 0 ? IntMat::identity(dim) : kernel_basis(out);
    auto low = graded_piece(c, g.i, g.q - 2);
    std::unordered_map<int, int> low_of;
    for (int r = 0; r < static_cast<int>(low.size()); ++r) low_of[low[r].first] = r;
    auto here = graded_piece(c, g.i, g.q);
    IntMat in_low = graded_block(c, g.i - 1, g.q - 2);
    ColumnHermite hh = column_hermite(in_low);
    for (int k = 0; k < ker.cols; ++k) {
        std::vector<Int> v(low.size(), Int(0));
        for (int r = 0; r < dim; ++r) v[low_of.at(here[r].first)] = ker.at(r, k);
        bool zero = std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
        if (zero) continue;
        if (in_low.cols == 0 || !solve_integer(hh, v)) {
            h.g_action_zero = false;
            break;
        }
    }
    return h;
}

// ---------------------------------------------------------------- solvers

namespace {

struct Adjacency {
    std::vector<std::vector<std::pair<int, Int>>> out, in;  // coefficient only; powers follow from gradings
    explicit Adjacency(const FreeComplex& c) : out(c.size()), in(c.size()) {
        for (const auto& [key, m] : c.entries) {
            out[key.first].push_back({key.second, m.coeff});
            in[key.second].push_back({key.first, m.coeff});
        }
    }
};

// Unknown monomial entries u(s -> t) = x * G^m of a map src -> dst with
// homological offset `off` and quantum degree `delta`.
struct Unknowns {
    std::vector<EntryKey> pairs;
    std::vector<int> powers;
    std::map<EntryKey, int> index;
};

Unknowns make_unknowns(const FreeComplex& src, const FreeComplex& dst, const std::set<int>& offsets, int delta) {
    Unknowns u;
    for (int s = 0; s < src.size(); ++s)
        for (int t = 0; t < dst.size(); ++t) {
            if (!offsets.count(dst.gens[t].i - src.gens[s].i)) continue;
            int diff = dst.gens[t].q - src.gens[s].q - delta;
            if (diff < 0 || diff % 2 != 0) continue;
            u.index[{s, t}] = static_cast<int>(u.pairs.size());
            u.pairs.push_back({s, t});
            u.powers.push_back(diff / 2);
        }
    return u;
}

// Sparse equations: row key (s, t') -> {unknown -> coefficient}.
struct System {
    std::map<EntryKey, std::map<int, Int>> rows;
    std::map<EntryKey, Int> rhs;
};

// rows of  sign_d * (d_dst o u) + sign_u * (u o d_src)
System assemble(const FreeComplex& src, const FreeComplex& dst, const Unknowns& u, int sign_left, int sign_right) {
    Adjacency as(src), ad(dst);
    System sys;
    for (int v = 0; v < static_cast<int>(u.pairs.size()); ++v) {
        auto [s, t] = u.pairs[v];
        for (const auto& [t2, c] : ad.out[t]) sys.rows[{s, t2}][v] += sign_left * c;
        for (const auto& [s0, c] : as.in[s]) sys.rows[{s0, t}][v] += sign_right * c;
    }
    return sys;
}

struct Component {
    std::vector<int> vars;
    std::vector<EntryKey> rows;
};

std::vector<Component> components(const System& sys, int nvars) {
    std::vector<int> parent(nvars);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& [key, row] : sys.rows) {
        int first = -1;
        for (const auto& [v, c] : row) {
            if (c == 0) continue;
            if (first < 0) first = v;
            else parent[find(v)] = find(first);
        }
    }
    std::map<int, Component> comps;
    for (int v = 0; v < nvars; ++v) comps[find(v)].vars.push_back(v);
    std::vector<EntryKey> orphan_rows;
    for (const auto& [key, row] : sys.rows) {
        int first = -1;
        for (const auto& [v, c] : row)
            if (c != 0) { first = v; break; }
        if (first < 0) orphan_rows.push_back(key);
        else comps[find(first)].rows.push_back(key);
    }
    for (const auto& [key, val] : sys.rhs)
        if (!sys.rows.count(key)) orphan_rows.push_back(key);
    std::vector<Component> r;
    for (auto& [root, comp] : comps) r.push_back(std::move(comp));
    if (!orphan_rows.empty()) r.push_back({{}, orphan_rows});
    return r;
}

IntMat dense(const System& sys, const Component& comp, std::vector<Int>* b) {
    std::unordered_map<int, int> col;
    for (int k = 0; k < static_cast<int>(comp.vars.size()); ++k) col[comp.vars[k]] = k;
    IntMat A(static_cast<int>(comp.rows.size()), static_cast<int>(comp.vars.size()));
    if (b) b->assign(comp.rows.size(), Int(0));
    for (int r = 0; r < static_cast<int>(comp.rows.size()); ++r) {
        auto it = sys.rows.find(comp.rows[r]);
        if (it != sys.rows.end())
            for (const auto& [v, c] : it->second) A.at(r, col.at(v)) = c;
        if (b) {
            auto jt = sys.rhs.find(comp.rows[r]);
            if (jt != sys.rhs.end()) (*b)[r] = jt->second;
        }
    }
    return A;
}

std::set<int> all_offsets(const FreeComplex& src, const FreeComplex& dst) {
    std::set<int> r;
    for (const auto& a : src.gens)
        for (const auto& b : dst.gens) r.insert(b.i - a.i);
    return r;
}

}  // namespace

std::vector<ChainMap> solve_chain_map(const FreeComplex& src, const FreeComplex& dst, bool ungraded, int qshift) {
    std::set<int> offs = ungraded ? all_offsets(src, dst) : std::set<int>{0};
    Unknowns u = make_unknowns(src, dst, offs, qshift);
    System sys = assemble(src, dst, u, 1, -1);
    std::vector<ChainMap> basis;
    for (const auto& comp : components(sys, static_cast<int>(u.pairs.size()))) {
        if (comp.vars.empty()) continue;
        IntMat A = dense(sys, comp, nullptr);
        IntMat K = A.rows == 0 ? IntMat::identity(static_cast<int>(comp.vars.size())) : kernel_basis(A);
        for (int k = 0; k < K.cols; ++k) {
            ChainMap f{src.size(), dst.size(), {}};
            for (int r = 0; r < K.rows; ++r) {
                if (K.at(r, k) == 0) continue;
                int v = comp.vars[r];
                f.add(u.pairs[v].first, u.pairs[v].second, GPolynomial(GMonomial(K.at(r, k), u.powers[v])));
            }
            basis.push_back(std::move(f));
        }
    }
    return basis;
}

NullhomotopyResult solve_nullhomotopy(const FreeComplex& src, const FreeComplex& dst, const ChainMap& phi) {
    // split phi into parts homogeneous in (homological offset, quantum degree)
    std::map<std::pair<int, int>, std::map<EntryKey, Int>> parts;
    for (const auto& [key, v] : phi.e) {
        auto [s, t] = key;
        for (int k = 0; k <= v.degree_in_G(); ++k) {
            if (v.coeff(k) == 0) continue;
            int off = dst.gens[t].i - src.gens[s].i;
            int delta = dst.gens[t].q - src.gens[s].q - 2 * k;
            parts[{off, delta}][key] = v.coeff(k);
        }
    }
    NullhomotopyResult res;
    res.exists = true;
    res.h = ChainMap{src.size(), dst.size(), {}};
    for (const auto& [od, entries] : parts) {
        auto [off, delta] = od;
        Unknowns u = make_unknowns(src, dst, {off - 1}, delta);
        System sys = assemble(src, dst, u, 1, 1);
        for (const auto& [key, c] : entries) {
            sys.rhs[key] = c;
            sys.rows[key];  // make sure the row exists
        }
        for (const auto& comp : components(sys, static_cast<int>(u.pairs.size()))) {
            std::vector<Int> b;
            IntMat A = dense(sys, comp, &b);
            bool trivial_rhs = std::all_of(b.begin(), b.end(), [](const Int& x) { return x == 0; });
            if (trivial_rhs) continue;
            std::optional<std::vector<Int>> x;
            if (A.cols > 0) x = solve_integer(A, b);
            if (!x) {
                res.exists = false;
                res.h = ChainMap{src.size(), dst.size(), {}};
                SolverRefutation ref{A, b, {}};
                auto cert = infeasibility_certificate(A, b);
                if (!cert) throw invariant_error("solver inconsistency: no solution and no certificate");
                ref.y = *cert;
                res.refutation = std::move(ref);
                return res;
            }
            for (int k = 0; k < static_cast<int>(comp.vars.size()); ++k) {
                if ((*x)[k] == 0) continue;
                int v = comp.vars[k];
                res.h.add(u.pairs[v].first, u.pairs[v].second, GPolynomial(GMonomial((*x)[k], u.powers[v])));
            }
        }
    }
    return res;
}

NullhomotopyResult solve_nullhomotopy(const FreeComplex& c, const ChainMap& phi) {
    return solve_nullhomotopy(c, c, phi);
}

}  // namespace zgkh
