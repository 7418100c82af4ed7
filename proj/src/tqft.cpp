#include "zgkh/tqft.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace zgkh {

int PDCode::edge_of(int original_label) const {
    for (int e = 0; e < static_cast<int>(original.size()); ++e)
        if (original[e] == original_label) return e;
    return -1;
}

std::string PDCode::to_string() const {
    std::ostringstream os;
    for (std::size_t c = 0; c < crossings.size(); ++c) {
        if (c) os << " ";
        const auto& x = crossings[c];
        os << "X[" << original[x[0]] << "," << original[x[1]] << "," << original[x[2]] << "," << original[x[3]] << "]";
    }
    return os.str();
}

// ------------------------------------------------------------------ parsing

PDCode parse_pd(const std::string& text) {
    std::vector<std::array<int, 4>> tuples;
    struct Group {
        std::vector<int> ints;
        bool has_children = false;
    };
    std::vector<Group> stack;
    std::size_t k = 0;
    while (k < text.size()) {
        char ch = text[k];
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
            ++k;
        } else if (ch == 'X' || ch == 'P' || ch == 'D') {
            ++k;
        } else if (ch == '[' || ch == '(' || ch == '{') {
            if (!stack.empty()) stack.back().has_children = true;
            stack.emplace_back();
            ++k;
        } else if (ch == ']' || ch == ')' || ch == '}') {
            if (stack.empty()) throw parse_error("unbalanced bracket in PD code");
            Group g = std::move(stack.back());
            stack.pop_back();
            if (g.has_children && !g.ints.empty()) throw parse_error("PD code mixes labels and crossings");
            if (!g.has_children && !g.ints.empty()) {
                if (g.ints.size() != 4) throw parse_error("a crossing needs exactly four edge labels");
                tuples.push_back({g.ints[0], g.ints[1], g.ints[2], g.ints[3]});
            }
            ++k;
        } else if (ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t used = 0;
            long v = 0;
            try {
                v = std::stol(text.substr(k), &used);
            } catch (const std::exception&) {
                throw parse_error("bad edge label in PD code");
            }
            if (stack.empty()) throw parse_error("edge label outside a crossing");
            stack.back().ints.push_back(static_cast<int>(v));
            k += used;
        } else {
            throw parse_error(std::string("unexpected character '") + ch + "' in PD code");
        }
    }
    if (!stack.empty()) throw parse_error("unbalanced bracket in PD code");
    return pd_from_tuples(tuples);
}

PDCode pd_from_tuples(const std::vector<std::array<int, 4>>& tuples) {
    PDCode pd;
    int n = static_cast<int>(tuples.size());
    if (n == 0) return pd;
    std::map<int, std::vector<std::pair<int, int>>> occ;
    for (int c = 0; c < n; ++c)
        for (int s = 0; s < 4; ++s) occ[tuples[c][s]].push_back({c, s});
    for (const auto& [label, where] : occ)
        if (where.size() != 2)
            throw parse_error("edge label " + std::to_string(label) + " occurs " + std::to_string(where.size()) +
                              " times");
    if (static_cast<int>(occ.size()) != 2 * n) throw parse_error("PD code has the wrong number of edges");

    // trace the knot, entering crossing 0 at slot 0
    std::vector<std::array<char, 4>> entered(n, {0, 0, 0, 0});
    std::vector<int> exit_labels;
    std::pair<int, int> at{0, 0};
    while (true) {
        auto [c, s] = at;
        if (entered[c][s]) throw parse_error("PD code is not a consistent diagram");
        entered[c][s] = 1;
        int out = (s + 2) % 4;
        int label = tuples[c][out];
        exit_labels.push_back(label);
        const auto& w = occ[label];
        std::pair<int, int> next = w[0] == std::make_pair(c, out) ? w[1] : w[0];
        if (next == std::make_pair(0, 0)) break;
        at = next;
        if (static_cast<int>(exit_labels.size()) > 2 * n) throw parse_error("PD code is not a consistent diagram");
    }
    if (static_cast<int>(exit_labels.size()) != 2 * n)
        throw parse_error("diagram has more than one component; only knots are supported");

    std::map<int, int> relabel;
    int m = 2 * n;
    for (int k = 0; k < m; ++k) relabel[exit_labels[k]] = (k + 1) % m;
    pd.original.assign(m, 0);
    for (const auto& [orig, e] : relabel) pd.original[e] = orig;

    for (int c = 0; c < n; ++c) {
        std::array<int, 4> x = tuples[c];
        int under_in = entered[c][0] ? 0 : 2;
        int over_in = entered[c][1] ? 1 : 3;
        if (entered[c][0] == entered[c][2] || entered[c][1] == entered[c][3])
            throw parse_error("crossing " + std::to_string(c) + " is not traversed consistently");
        if (under_in == 2) {
            x = {x[2], x[3], x[0], x[1]};
            over_in = (over_in + 2) % 4;
        }
        for (auto& v : x) v = relabel.at(v);
        pd.crossings.push_back(x);
        int sign = over_in == 3 ? 1 : -1;
        pd.signs.push_back(sign);
        (sign > 0 ? pd.n_plus : pd.n_minus)++;
    }
    return pd;
}

std::vector<int> parse_braid_word(const std::string& text) {
    std::vector<int> word;
    std::size_t k = 0;
    while (k < text.size()) {
        char ch = text[k];
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == '[' || ch == ']') {
            ++k;
            continue;
        }
        if (ch != '-' && ch != '+' && !std::isdigit(static_cast<unsigned char>(ch)))
            throw parse_error(std::string("unexpected character '") + ch + "' in braid word");
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(text.substr(k), &used);
        } catch (const std::exception&) {
            throw parse_error("bad braid generator");
        }
        if (v == 0) throw parse_error("braid generators are nonzero");
        word.push_back(static_cast<int>(v));
        k += used;
    }
    return word;
}

PDCode parse_braid(const std::vector<int>& word) {
    if (word.empty()) return PDCode{};
    int strands = 0;
    for (int g : word) strands = std::max(strands, std::abs(g) + 1);
    int next = 1;
    std::vector<int> top(strands + 1), cur(strands + 1);
    for (int p = 1; p <= strands; ++p) top[p] = cur[p] = next++;
    std::vector<std::array<int, 4>> tuples;
    for (int g : word) {
        int i = std::abs(g);
        int a_in = cur[i], b_in = cur[i + 1];
        int a_out = next++, b_out = next++;
        if (g > 0) tuples.push_back({b_in, a_out, b_out, a_in});
        else tuples.push_back({a_in, b_in, a_out, b_out});
        cur[i + 1] = a_out;
        cur[i] = b_out;
    }
    for (int p = 1; p <= strands; ++p) {
        if (cur[p] == top[p]) throw parse_error("braid closure has more than one component");
        for (auto& t : tuples)
            for (auto& v : t)
                if (v == cur[p]) v = top[p];
    }
    return pd_from_tuples(tuples);
}

BasePoint make_basepoint(const PDCode& pd, int original_label) {
    if (pd.size() == 0) return {0};
    if (original_label < 0) {
        auto it = std::min_element(pd.original.begin(), pd.original.end());
        return {static_cast<int>(it - pd.original.begin())};
    }
    int e = pd.edge_of(original_label);
    if (e < 0) throw parse_error("base point " + std::to_string(original_label) + " is not an edge label");
    return {e};
}

// --------------------------------------------------------------- the cube

ResolutionState resolve(const PDCode& pd, std::uint64_t vertex, BasePoint bp) {
    ResolutionState st;
    st.vertex = vertex;
    int m = pd.edges();
    if (m == 0) {
        st.circles = 1;
        return st;
    }
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int x, int y) { parent[find(x)] = find(y); };
    for (int c = 0; c < pd.size(); ++c) {
        const auto& x = pd.crossings[c];
        if ((vertex >> c) & 1) unite(x[0], x[3]), unite(x[1], x[2]);
        else unite(x[0], x[1]), unite(x[2], x[3]);
    }
    st.circle_of_edge.assign(m, -1);
    std::unordered_map<int, int> id;
    for (int e = 0; e < m; ++e) {
        int r = find(e);
        auto it = id.find(r);
        if (it == id.end()) it = id.emplace(r, st.circles++).first;
        st.circle_of_edge[e] = it->second;
    }
    st.marked = st.circle_of_edge[bp.edge];
    return st;
}

namespace {

struct Vertex {
    ResolutionState st;
    std::vector<int> rep;  // one edge per circle
    std::vector<int> ids;  // reducer id per label mask
    int unmarked_bit(int circle) const { return circle < st.marked ? circle : circle - 1; }
};

Vertex make_vertex(const PDCode& pd, std::uint64_t v, BasePoint bp) {
    Vertex x;
    x.st = resolve(pd, v, bp);
    x.rep.assign(x.st.circles, -1);
    for (int e = 0; e < pd.edges(); ++e)
        if (x.rep[x.st.circle_of_edge[e]] < 0) x.rep[x.st.circle_of_edge[e]] = e;
    return x;
}

}  // namespace

FreeComplex build_reduced_complex(const PDCode& pd, BasePoint bp, CubeOptions opt) {
    int n = pd.size();
    if (n == 0) return pawn({0, 0});
    if (n > 40) throw cap_error("diagram has too many crossings for the cube");
    if (bp.edge < 0 || bp.edge >= pd.edges()) throw precondition_error("base point is not an edge");

    std::vector<std::vector<std::uint64_t>> columns(n + 1);
    for (std::uint64_t v = 0; v < (std::uint64_t(1) << n); ++v) columns[std::popcount(v)].push_back(v);

    Reducer red;
    auto grading = [&](int r, int circles, unsigned mask) {
        int nu = circles - 1;
        int q = nu - 2 * std::popcount(mask) + r + pd.n_plus - 2 * pd.n_minus;
        return Grading{r - pd.n_minus, q};
    };
    auto materialize = [&](int r) {
        std::vector<Vertex> col;
        col.reserve(columns[r].size());
        for (std::uint64_t v : columns[r]) {
            Vertex x = make_vertex(pd, v, bp);
            unsigned count = 1u << (x.st.circles - 1);
            x.ids.resize(count);
            for (unsigned mask = 0; mask < count; ++mask) x.ids[mask] = red.add_gen(grading(r, x.st.circles, mask));
            col.push_back(std::move(x));
            if (red.live() > opt.cap)
                throw cap_error("cube exceeds the generator cap of " + std::to_string(opt.cap));
        }
        return col;
    };

    std::vector<Vertex> cur = materialize(0);
    for (int r = 0; r < n; ++r) {
        std::vector<Vertex> nxt = materialize(r + 1);
        std::unordered_map<std::uint64_t, int> index;
        for (int k = 0; k < static_cast<int>(nxt.size()); ++k) index[nxt[k].st.vertex] = k;

        for (const Vertex& src : cur) {
            std::uint64_t v = src.st.vertex;
            for (int c = 0; c < n; ++c) {
                if ((v >> c) & 1) continue;
                const Vertex& dst = nxt[index.at(v | (std::uint64_t(1) << c))];
                int sign = std::popcount(v & ((std::uint64_t(1) << c) - 1)) % 2 ? -1 : 1;
                const auto& x = pd.crossings[c];
                int ca = src.st.circle_of_edge[x[0]], cc = src.st.circle_of_edge[x[2]];
                bool merge = ca != cc;

                // image circle in dst of every src circle not touched by the crossing
                std::vector<int> image(src.st.circles, -1);
                for (int k = 0; k < src.st.circles; ++k) image[k] = dst.st.circle_of_edge[src.rep[k]];

                for (unsigned mask = 0; mask < src.ids.size(); ++mask) {
                    int sid = src.ids[mask];
                    if (!red.alive(sid)) continue;
                    auto label = [&](int circle) {  // 1 for X
                        return circle == src.st.marked ? 0 : int((mask >> src.unmarked_bit(circle)) & 1);
                    };
                    unsigned base = 0;
                    for (int k = 0; k < src.st.circles; ++k) {
                        if (k == ca || k == cc || k == src.st.marked) continue;
                        if (label(k)) base |= 1u << dst.unmarked_bit(image[k]);
                    }
                    std::vector<std::pair<unsigned, int>> terms;  // (dst mask, coefficient)
                    if (merge) {
                        int C = dst.st.circle_of_edge[x[0]];
                        if (ca == src.st.marked || cc == src.st.marked) {
                            int other = ca == src.st.marked ? cc : ca;
                            if (!label(other)) terms.push_back({base, 1});
                        } else {
                            int la = label(ca), lb = label(cc);
                            unsigned bit = 1u << dst.unmarked_bit(C);
                            if (!la && !lb) terms.push_back({base, 1});
                            else if (la && lb) terms.push_back({base | bit, -1});
                            else terms.push_back({base | bit, 1});
                        }
                    } else {
                        int A1 = dst.st.circle_of_edge[x[0]], A2 = dst.st.circle_of_edge[x[1]];
                        if (ca == src.st.marked) {
                            int U = A1 == dst.st.marked ? A2 : A1;
                            unsigned bit = 1u << dst.unmarked_bit(U);
                            terms.push_back({base | bit, 1});
                            terms.push_back({base, 1});
                        } else {
                            unsigned b1 = 1u << dst.unmarked_bit(A1), b2 = 1u << dst.unmarked_bit(A2);
                            if (label(ca)) {
                                terms.push_back({base | b1 | b2, 1});
                            } else {
                                terms.push_back({base | b2, 1});
                                terms.push_back({base | b1, 1});
                                terms.push_back({base, 1});
                            }
                        }
                    }
                    const Grading& gs = red.grading(sid);
                    for (auto [tmask, coeff] : terms) {
                        int tid = dst.ids[tmask];
                        const Grading& gt = red.grading(tid);
                        int diff = gt.q - gs.q;
                        if (diff < 0 || diff % 2) throw invariant_error("cube map is not homogeneous");
                        red.add_entry(sid, tid, GMonomial(Int(sign * coeff), diff / 2));
                    }
                }
            }
        }
        red.eliminate_degree(r - pd.n_minus);
        cur = std::move(nxt);
    }
    FreeComplex out = red.extract();
    require_valid(out, "build_reduced_complex");
    return out;
}

// ---------------------------------------------------------- specializations

FreeComplex unreduced_from_reduced(const FreeComplex& c) {
    FreeComplex r;
    for (const auto& g : c.gens) {
        r.add_gen({g.i, g.q - 1});
        r.add_gen({g.i, g.q + 1});
    }
    for (const auto& [key, m] : c.entries) {
        auto [s, t] = key;
        if (m.power == 0) {
            r.add(2 * s, 2 * t, GMonomial(m.coeff));
            r.add(2 * s + 1, 2 * t + 1, GMonomial(m.coeff));
        } else if (m.power == 1) {
            r.add(2 * s + 1, 2 * t, GMonomial(2 * m.coeff));
        }
    }
    return r;
}

std::map<Grading, HomologyGroup> integer_homology(const FreeComplex& c) {
    std::map<Grading, std::vector<int>> at;
    for (int g = 0; g < c.size(); ++g) at[c.gens[g]].push_back(g);
    auto block = [&](Grading from) {
        Grading to{from.i + 1, from.q};
        auto fi = at.find(from), ti = at.find(to);
        int cols = fi == at.end() ? 0 : static_cast<int>(fi->second.size());
        int rows = ti == at.end() ? 0 : static_cast<int>(ti->second.size());
        IntMat m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int r = 0; r < rows; ++r) {
                GMonomial e = c.get(fi->second[j], ti->second[r]);
                if (!e.is_zero() && e.power == 0) m.at(r, j) = e.coeff;
            }
        return m;
    };
    std::map<Grading, HomologyGroup> out;
    for (const auto& [g, ids] : at) {
        IntMat in = block({g.i - 1, g.q}), o = block(g);
        HomologyGroup h;
        int rin = in.rows && in.cols ? rank_rational(in) : 0;
        int rout = o.rows && o.cols ? rank_rational(o) : 0;
        h.free_rank = static_cast<int>(ids.size()) - rin - rout;
        if (in.rows && in.cols)
            for (const auto& f : smith_invariants(in))
                if (f > 1) h.torsion.push_back(f);
        if (!h.is_zero()) out[g] = h;
    }
    return out;
}

namespace {

// Elements of F_p (p > 0, integers in [0, p)) or Q (p = 0).
struct Field {
    int p = 0;
    Rat norm(const Rat& x) const {
        if (p == 0) return x;
        return Rat(mod_floor(boost::multiprecision::numerator(x), p));
    }
    Rat inv(const Rat& x) const {
        if (p == 0) return 1 / x;
        Int a = boost::multiprecision::numerator(x), r = 1, e = p - 2;
        a = mod_floor(a, p);
        while (e > 0) {
            if (e % 2 == 1) r = r * a % p;
            a = a * a % p;
            e /= 2;
        }
        return Rat(r);
    }
};

struct FEntry {
    Rat v;
    int k = 0;
};

class FieldReducer {
public:
    FieldReducer(const FreeComplex& c, int p) : f_{p}, gens_(c.gens), alive_(c.size(), 1), out_(c.size()), in_(c.size()) {
        for (const auto& [key, m] : c.entries) add(key.first, key.second, {Rat(m.coeff), m.power});
    }

    std::vector<FieldPiece> run() {
        eliminate_units();
        std::vector<FieldPiece> pieces;
        while (true) {
            int bx = -1, by = -1;
            int bk = 0;
            for (int x = 0; x < static_cast<int>(gens_.size()); ++x) {
                if (!alive_[x]) continue;
                for (const auto& [y, e] : out_[x])
                    if (bx < 0 || e.k < bk || (e.k == bk && std::make_pair(x, y) < std::make_pair(bx, by)))
                        bx = x, by = y, bk = e.k;
            }
            if (bx < 0) break;
            split_knight(bx, by);
            pieces.push_back({gens_[bx], bk});
            remove(bx);
            remove(by);
        }
        for (int g = 0; g < static_cast<int>(gens_.size()); ++g)
            if (alive_[g]) pieces.push_back({gens_[g], -1});
        std::sort(pieces.begin(), pieces.end());
        return pieces;
    }

private:
    void add(int s, int t, FEntry e) {
        e.v = f_.norm(e.v);
        if (e.v == 0) return;
        auto it = out_[s].find(t);
        if (it == out_[s].end()) {
            out_[s].emplace(t, e);
            in_[t].emplace(s, e);
            return;
        }
        if (it->second.k != e.k) throw invariant_error("field complex entry is not homogeneous");
        Rat v = f_.norm(it->second.v + e.v);
        if (v == 0) {
            out_[s].erase(it);
            in_[t].erase(s);
        } else {
            it->second.v = v;
            in_[t][s].v = v;
        }
    }

    void remove(int g) {
        for (const auto& [t, e] : out_[g]) in_[t].erase(g);
        for (const auto& [s, e] : in_[g]) out_[s].erase(g);
        out_[g].clear();
        in_[g].clear();
        alive_[g] = 0;
    }

    void eliminate_units() {
        bool progress = true;
        while (progress) {
            progress = false;
            for (int x = 0; x < static_cast<int>(gens_.size()); ++x) {
                if (!alive_[x]) continue;
                int y = -1;
                for (const auto& [t, e] : out_[x])
                    if (e.k == 0 && (y < 0 || t < y)) y = t;
                if (y < 0) continue;
                Rat einv = f_.inv(out_[x][y].v);
                std::vector<std::pair<int, FEntry>> srcs, tgts;
                for (const auto& [s, e] : in_[y])
                    if (s != x) srcs.emplace_back(s, e);
                for (const auto& [t, e] : out_[x])
                    if (t != y) tgts.emplace_back(t, e);
                for (const auto& [s, d] : srcs)
                    for (const auto& [t, fz] : tgts) add(s, t, {-fz.v * einv * d.v, fz.k + d.k});
                remove(x);
                remove(y);
                progress = true;
            }
        }
    }

    // make x -> y the only entry out of x and into y; valid because the entry
    // has minimal power among all entries
    void split_knight(int x, int y) {
        FEntry a = out_[x].at(y);
        Rat ainv = f_.inv(a.v);
        std::vector<std::pair<int, FEntry>> tgts, srcs;
        for (const auto& [z, e] : out_[x])
            if (z != y) tgts.emplace_back(z, e);
        for (const auto& [s, e] : in_[y])
            if (s != x) srcs.emplace_back(s, e);
        for (const auto& [z, fz] : tgts) {
            // row z -= lambda row y
            Rat lambda = fz.v * ainv;
            int lk = fz.k - a.k;
            std::vector<std::pair<int, FEntry>> row(in_[y].begin(), in_[y].end());
            for (const auto& [s, d] : row) add(s, z, {-lambda * d.v, lk + d.k});
        }
        for (const auto& [s, d] : srcs) {
            auto it = out_[s].find(y);
            if (it != out_[s].end()) {
                out_[s].erase(it);
                in_[y].erase(s);
            }
        }
    }

    Field f_;
    std::vector<Grading> gens_;
    std::vector<char> alive_;
    std::vector<std::map<int, FEntry>> out_, in_;
};

}  // namespace

std::vector<FieldPiece> field_decomposition(const FreeComplex& c, int p) {
    if (p != 0 && !is_prime(p)) throw precondition_error("field characteristic must be 0 or a prime");
    return FieldReducer(c, p).run();
}

int s_invariant(const FreeComplex& c, int p) {
    int pawns = 0, q = 0;
    for (const auto& piece : field_decomposition(c, p))
        if (piece.k < 0) ++pawns, q = piece.at.q;
    if (pawns != 1) throw invariant_error("expected exactly one pawn over F[G], found " + std::to_string(pawns));
    return q;
}

SpecializedHomology specialized_homology(const FreeComplex& c, const CoefficientSpec& spec) {
    SpecializedHomology h;
    h.spec = spec;
    switch (spec.mode) {
    case CoefficientSpec::Mode::IntegersGZero:
        h.groups = integer_homology(c);
        break;
    case CoefficientSpec::Mode::FieldGOne: {
        if (spec.p != 0 && !is_prime(spec.p)) throw precondition_error("field characteristic must be 0 or a prime");
        std::map<int, std::vector<int>> deg;
        for (int g = 0; g < c.size(); ++g) deg[c.gens[g].i].push_back(g);
        std::map<int, int> rank;
        for (const auto& [i, ids] : deg) {
            auto nx = deg.find(i + 1);
            if (nx == deg.end()) continue;
            std::unordered_map<int, int> row;
            for (int r = 0; r < static_cast<int>(nx->second.size()); ++r) row[nx->second[r]] = r;
            IntMat m(static_cast<int>(nx->second.size()), static_cast<int>(ids.size()));
            for (int j = 0; j < static_cast<int>(ids.size()); ++j)
                for (auto it = c.entries.lower_bound({ids[j], -1}); it != c.entries.end() && it->first.first == ids[j];
                     ++it)
                    m.at(row.at(it->first.second), j) = it->second.coeff;
            rank[i] = rank_mod_p(m, spec.p);
        }
        for (const auto& [i, ids] : deg) {
            int d = static_cast<int>(ids.size()) - (rank.count(i) ? rank[i] : 0) - (rank.count(i - 1) ? rank[i - 1] : 0);
            if (d) h.dims[i] = d;
        }
        break;
    }
    case CoefficientSpec::Mode::FieldPGraded:
        h.pieces = field_decomposition(c, spec.p);
        break;
    }
    return h;
}

int SpecializedHomology::total_dimension() const {
    int t = 0;
    for (const auto& [g, grp] : groups) t += grp.free_rank;
    for (const auto& [i, d] : dims) t += d;
    for (const auto& p : pieces)
        if (p.k < 0) ++t;
    return t;
}

SpecializedHomology SpecializedHomology::shifted(int di, int dq) const {
    SpecializedHomology r;
    r.spec = spec;
    for (const auto& [g, grp] : groups) r.groups[{g.i + di, g.q + dq}] = grp;
    for (const auto& [i, d] : dims) r.dims[i + di] = d;
    for (auto p : pieces) {
        p.at.i += di;
        p.at.q += dq;
        r.pieces.push_back(p);
    }
    std::sort(r.pieces.begin(), r.pieces.end());
    return r;
}

bool SpecializedHomology::operator==(const SpecializedHomology& o) const {
    if (spec.mode != o.spec.mode || spec.p != o.spec.p || dims != o.dims || pieces != o.pieces) return false;
    if (groups.size() != o.groups.size()) return false;
    for (const auto& [g, grp] : groups) {
        auto it = o.groups.find(g);
        if (it == o.groups.end() || it->second.free_rank != grp.free_rank || it->second.torsion != grp.torsion)
            return false;
    }
    return true;
}

nlohmann::json to_json(const SpecializedHomology& h) {
    nlohmann::json j;
    j["coefficients"] = to_string(h.spec);
    switch (h.spec.mode) {
    case CoefficientSpec::Mode::IntegersGZero: {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& [g, grp] : h.groups) {
            nlohmann::json tor = nlohmann::json::array();
            for (const auto& x : grp.torsion) tor.push_back(int_to_json(x));
            t.push_back({{"i", g.i}, {"q", g.q}, {"rank", grp.free_rank}, {"torsion", tor}});
        }
        j["table"] = t;
        break;
    }
    case CoefficientSpec::Mode::FieldGOne: {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& [i, d] : h.dims) t.push_back({{"i", i}, {"dim", d}});
        j["table"] = t;
        j["total"] = h.total_dimension();
        break;
    }
    case CoefficientSpec::Mode::FieldPGraded: {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& p : h.pieces) {
            if (p.k < 0) t.push_back({{"kind", "pawn"}, {"at", {p.at.i, p.at.q}}});
            else t.push_back({{"kind", "knight"}, {"k", p.k}, {"at", {p.at.i, p.at.q}}});
        }
        j["pieces"] = t;
        break;
    }
    }
    return j;
}

GPolynomial closed_surface_value(int genus) {
    if (genus < 0) throw precondition_error("genus must be non-negative");
    // a + b X in Z[G][X]/(X^2 + GX); a handle is m o Delta
    GPolynomial a(Int(1)), b;
    const GPolynomial G = GPolynomial::G();
    for (int k = 0; k < genus; ++k) {
        // m Delta(1) = 2X + G, m Delta(X) = -G X
        GPolynomial na = a * G;
        GPolynomial nb = a * GPolynomial(Int(2)) - b * G;
        a = na;
        b = nb;
    }
    return b;  // counit: e(1) = 0, e(X) = 1
}

}  // namespace zgkh
