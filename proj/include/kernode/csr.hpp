#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "kernode/dense.hpp"

namespace kernode {

using Index = std::size_t;

// Compressed sparse row matrix, canonical form: row_ptr non-decreasing with
// row_ptr[0] == 0 and row_ptr[n_rows] == nnz, columns strictly increasing
// within each row, no stored explicit zeros.
struct CsrMatrix {
    Index n_rows = 0;
    Index n_cols = 0;
    std::vector<Index> row_ptr{0};
    std::vector<Index> col_idx;
    std::vector<double> values;

    Index nnz() const { return col_idx.size(); }
    Index row_nnz(Index i) const { return row_ptr[i + 1] - row_ptr[i]; }
};

// Builds a canonical CSR from (row, col, value) triplets: duplicates are
// summed, columns sorted, exact zeros dropped.
CsrMatrix csr_from_triplets(Index n_rows, Index n_cols,
                            std::vector<std::tuple<Index, Index, double>> triplets);

CsrMatrix csr_from_dense(const DenseMatrix& a);
DenseMatrix csr_to_dense(const CsrMatrix& a);
CsrMatrix csr_identity(Index n);
CsrMatrix csr_transpose(const CsrMatrix& a);

// Structural checks.
bool csr_is_canonical(const CsrMatrix& a);
bool csr_same_pattern(const CsrMatrix& a, const CsrMatrix& b);
bool csr_pattern_symmetric(const CsrMatrix& a);
double csr_max_abs_diff(const CsrMatrix& a, const CsrMatrix& b);

}  // namespace kernode
