#include "zgkh/intlin.hpp"

#include <algorithm>
#include <numeric>

namespace zgkh {

namespace {

Int iabs(const Int& x) { return x < 0 ? Int(-x) : x; }

void col_axpy(IntMat& m, int dst, int src, const Int& f) {
    if (f == 0) return;
    for (int i = 0; i < m.rows; ++i)
        if (m.at(i, src) != 0) m.at(i, dst) += f * m.at(i, src);
}

void col_swap(IntMat& m, int x, int y) {
    if (x == y) return;
    for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, x), m.at(i, y));
}

void row_axpy(IntMat& m, int dst, int src, const Int& f) {
    if (f == 0) return;
    for (int j = 0; j < m.cols; ++j)
        if (m.at(src, j) != 0) m.at(dst, j) += f * m.at(src, j);
}

void row_swap(IntMat& m, int x, int y) {
    if (x == y) return;
    for (int j = 0; j < m.cols; ++j) std::swap(m.at(x, j), m.at(y, j));
}

}  // namespace

IntMat IntMat::identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

std::vector<Int> IntMat::column(int j) const {
    std::vector<Int> v(rows);
    for (int i = 0; i < rows; ++i) v[i] = at(i, j);
    return v;
}

IntMat operator*(const IntMat& x, const IntMat& y) {
    if (x.cols != y.rows) throw invariant_error("matrix shape mismatch");
    IntMat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Int& v = x.at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < y.cols; ++j)
                if (y.at(k, j) != 0) r.at(i, j) += v * y.at(k, j);
        }
    return r;
}

std::vector<Int> operator*(const IntMat& x, const std::vector<Int>& v) {
    if (x.cols != static_cast<int>(v.size())) throw invariant_error("matrix shape mismatch");
    std::vector<Int> r(x.rows, Int(0));
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k)
            if (x.at(i, k) != 0 && v[k] != 0) r[i] += x.at(i, k) * v[k];
    return r;
}

ColumnHermite column_hermite(const IntMat& A) {
    ColumnHermite h;
    h.H = A;
    h.U = IntMat::identity(A.cols);
    int pc = 0;
    for (int r = 0; r < A.rows && pc < A.cols; ++r) {
        while (true) {
            int best = -1;
            for (int j = pc; j < A.cols; ++j) {
                const Int& v = h.H.at(r, j);
                if (v == 0) continue;
                if (best < 0 || iabs(v) < iabs(h.H.at(r, best))) best = j;
            }
            if (best < 0) break;
            col_swap(h.H, pc, best);
            col_swap(h.U, pc, best);
            bool clean = true;
            for (int j = pc + 1; j < A.cols; ++j) {
                if (h.H.at(r, j) == 0) continue;
                Int q = h.H.at(r, j) / h.H.at(r, pc);
                col_axpy(h.H, j, pc, -q);
                col_axpy(h.U, j, pc, -q);
                if (h.H.at(r, j) != 0) clean = false;
            }
            if (clean) {
                h.pivot_row.push_back(r);
                ++pc;
                break;
            }
        }
    }
    h.rank = pc;
    return h;
}

IntMat kernel_basis(const IntMat& A) {
    ColumnHermite h = column_hermite(A);
    IntMat k(A.cols, A.cols - h.rank);
    for (int j = h.rank; j < A.cols; ++j)
        for (int i = 0; i < A.cols; ++i) k.at(i, j - h.rank) = h.U.at(i, j);
    return k;
}

std::optional<std::vector<Int>> solve_integer(const ColumnHermite& h, const std::vector<Int>& b) {
    const IntMat& H = h.H;
    if (static_cast<int>(b.size()) != H.rows) throw invariant_error("rhs shape mismatch");
    std::vector<Int> y(H.cols, Int(0));
    for (int j = 0; j < h.rank; ++j) {
        int r = h.pivot_row[j];
        Int res = b[r];
        for (int l = 0; l < j; ++l)
            if (H.at(r, l) != 0) res -= H.at(r, l) * y[l];
        if (res % H.at(r, j) != 0) return std::nullopt;
        y[j] = res / H.at(r, j);
    }
    for (int r = 0; r < H.rows; ++r) {
        Int s = 0;
        for (int l = 0; l < h.rank; ++l)
            if (H.at(r, l) != 0) s += H.at(r, l) * y[l];
        if (s != b[r]) return std::nullopt;
    }
    return h.U * y;
}

std::optional<std::vector<Int>> solve_integer(const IntMat& A, const std::vector<Int>& b) {
    return solve_integer(column_hermite(A), b);
}

int rank_rational(const IntMat& A) {
    // fraction-free Bareiss elimination
    IntMat m = A;
    int rank = 0;
    Int prev = 1;
    for (int c = 0; c < m.cols && rank < m.rows; ++c) {
        int piv = -1;
        for (int r = rank; r < m.rows; ++r)
            if (m.at(r, c) != 0) { piv = r; break; }
        if (piv < 0) continue;
        row_swap(m, rank, piv);
        for (int r = rank + 1; r < m.rows; ++r) {
            for (int j = c + 1; j < m.cols; ++j)
                m.at(r, j) = (m.at(rank, c) * m.at(r, j) - m.at(r, c) * m.at(rank, j)) / prev;
            m.at(r, c) = 0;
        }
        prev = m.at(rank, c);
        ++rank;
    }
    return rank;
}

int rank_mod_p(const IntMat& A, int p) {
    if (p == 0) return rank_rational(A);
    std::vector<std::int64_t> m(A.a.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = static_cast<std::int64_t>(mod_floor(A.a[k], p));
    auto at = [&](int i, int j) -> std::int64_t& { return m[static_cast<std::size_t>(i) * A.cols + j]; };
    auto inv = [&](std::int64_t x) {
        std::int64_t r = 1, e = p - 2, b = x % p;
        while (e > 0) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return r;
    };
    int rank = 0;
    for (int c = 0; c < A.cols && rank < A.rows; ++c) {
        int piv = -1;
        for (int r = rank; r < A.rows; ++r)
            if (at(r, c) != 0) { piv = r; break; }
        if (piv < 0) continue;
        for (int j = 0; j < A.cols; ++j) std::swap(at(rank, j), at(piv, j));
        std::int64_t iv = inv(at(rank, c));
        for (int r = rank + 1; r < A.rows; ++r) {
            if (at(r, c) == 0) continue;
            std::int64_t f = at(r, c) * iv % p;
            for (int j = c; j < A.cols; ++j) at(r, j) = ((at(r, j) - f * at(rank, j)) % p + p) % p;
        }
        ++rank;
    }
    return rank;
}

namespace {

// Smith reduction of a copy of A, optionally recording the row operations in P
// (so that P * A * Q = diag).
std::vector<Int> smith_impl(IntMat m, IntMat* P) {
    std::vector<Int> diag;
    int t = 0;
    while (t < m.rows && t < m.cols) {
        int bi = -1, bj = -1;
        for (int i = t; i < m.rows; ++i)
            for (int j = t; j < m.cols; ++j)
                if (m.at(i, j) != 0 && (bi < 0 || iabs(m.at(i, j)) < iabs(m.at(bi, bj)))) bi = i, bj = j;
        if (bi < 0) break;
        row_swap(m, t, bi);
        if (P) row_swap(*P, t, bi);
        col_swap(m, t, bj);
        while (true) {
            bool changed = false;
            for (int i = t + 1; i < m.rows; ++i) {
                if (m.at(i, t) == 0) continue;
                Int q = m.at(i, t) / m.at(t, t);
                row_axpy(m, i, t, -q);
                if (P) row_axpy(*P, i, t, -q);
                if (m.at(i, t) != 0) {
                    row_swap(m, t, i);
                    if (P) row_swap(*P, t, i);
                    changed = true;
                }
            }
            for (int j = t + 1; j < m.cols; ++j) {
                if (m.at(t, j) == 0) continue;
                Int q = m.at(t, j) / m.at(t, t);
                col_axpy(m, j, t, -q);
                if (m.at(t, j) != 0) {
                    col_swap(m, t, j);
                    changed = true;
                }
            }
            if (changed) continue;
            // divisibility of the remaining block by the pivot
            int bad = -1;
            for (int i = t + 1; i < m.rows && bad < 0; ++i)
                for (int j = t + 1; j < m.cols; ++j)
                    if (m.at(i, j) % m.at(t, t) != 0) { bad = i; break; }
            if (bad < 0) break;
            row_axpy(m, t, bad, Int(1));
            if (P) row_axpy(*P, t, bad, Int(1));
        }
        if (m.at(t, t) < 0) {
            for (int j = 0; j < m.cols; ++j) m.at(t, j) = -m.at(t, j);
            if (P)
                for (int j = 0; j < P->cols; ++j) P->at(t, j) = -P->at(t, j);
        }
        diag.push_back(m.at(t, t));
        ++t;
    }
    return diag;
}

}  // namespace

std::vector<Int> smith_invariants(const IntMat& A) { return smith_impl(A, nullptr); }

std::optional<InfeasibilityCertificate> infeasibility_certificate(const IntMat& A, const std::vector<Int>& b) {
    IntMat P = IntMat::identity(A.rows);
    std::vector<Int> diag = smith_impl(A, &P);
    std::vector<Int> pb = P * b;
    for (int i = 0; i < A.rows; ++i) {
        Int s = i < static_cast<int>(diag.size()) ? diag[i] : Int(0);
        bool bad = s == 0 ? pb[i] != 0 : pb[i] % s != 0;
        if (!bad) continue;
        InfeasibilityCertificate c;
        c.num.resize(A.rows);
        for (int j = 0; j < A.rows; ++j) c.num[j] = P.at(i, j);
        if (s == 0) {
            // y^T A = 0 while y^T b != 0; scale so that y^T b is a proper fraction
            c.den = iabs(pb[i]) + 1;
        } else {
            c.den = s;
        }
        return c;
    }
    return std::nullopt;
}

bool check_certificate(const IntMat& A, const std::vector<Int>& b, const InfeasibilityCertificate& c) {
    if (static_cast<int>(c.num.size()) != A.rows || c.den == 0) return false;
    for (int j = 0; j < A.cols; ++j) {
        Int s = 0;
        for (int i = 0; i < A.rows; ++i)
            if (c.num[i] != 0 && A.at(i, j) != 0) s += c.num[i] * A.at(i, j);
        if (s % c.den != 0) return false;
    }
    Int s = 0;
    for (int i = 0; i < A.rows; ++i) s += c.num[i] * b[i];
    return s % c.den != 0;
}

}  // namespace zgkh
