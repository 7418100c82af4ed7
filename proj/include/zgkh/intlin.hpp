#pragma once

// Dense exact integer linear algebra used by the homology and solver code.

#include "zgkh/zring.hpp"

#include <optional>
#include <vector>

namespace zgkh {

struct IntMat {
    int rows = 0, cols = 0;
    std::vector<Int> a;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Int(0)) {}
    static IntMat identity(int n);

    Int& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Int& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    std::vector<Int> column(int j) const;
};

IntMat operator*(const IntMat& x, const IntMat& y);
std::vector<Int> operator*(const IntMat& x, const std::vector<Int>& v);

// A * U = H with U unimodular and H in column echelon form: column j < rank has its
// first nonzero entry in row pivot_row[j], strictly increasing in j; columns from
// rank on are zero.
struct ColumnHermite {
    IntMat H, U;
    int rank = 0;
    std::vector<int> pivot_row;
};
ColumnHermite column_hermite(const IntMat& A);

// Columns form a Z-basis of {x : A x = 0}.
IntMat kernel_basis(const IntMat& A);

std::optional<std::vector<Int>> solve_integer(const IntMat& A, const std::vector<Int>& b);
std::optional<std::vector<Int>> solve_integer(const ColumnHermite& h, const std::vector<Int>& b);

int rank_rational(const IntMat& A);
int rank_mod_p(const IntMat& A, int p);

// Nonzero invariant factors (positive, each dividing the next).
std::vector<Int> smith_invariants(const IntMat& A);

// A rational row vector y = num / den with y^T A integral and y^T b not integral;
// its existence proves A x = b has no integer solution.
struct InfeasibilityCertificate {
    std::vector<Int> num;
    Int den = 1;
};
std::optional<InfeasibilityCertificate> infeasibility_certificate(const IntMat& A, const std::vector<Int>& b);
bool check_certificate(const IntMat& A, const std::vector<Int>& b, const InfeasibilityCertificate& c);

}  // namespace zgkh
