#include "kernode/csr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kernode {

CsrMatrix csr_from_triplets(Index n_rows, Index n_cols,
                            std::vector<std::tuple<Index, Index, double>> triplets) {
    for (const auto& [i, j, v] : triplets) {
        if (i >= n_rows || j >= n_cols)
            throw std::out_of_range("csr_from_triplets: index out of range");
        (void)v;
    }
    std::sort(triplets.begin(), triplets.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) <
                         std::tie(std::get<0>(b), std::get<1>(b));
              });

    CsrMatrix m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.row_ptr.assign(n_rows + 1, 0);

    std::vector<Index> cols;
    std::vector<double> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());

    std::size_t k = 0;
    for (Index i = 0; i < n_rows; ++i) {
        while (k < triplets.size() && std::get<0>(triplets[k]) == i) {
            const Index j = std::get<1>(triplets[k]);
            double v = std::get<2>(triplets[k]);
            ++k;
            while (k < triplets.size() && std::get<0>(triplets[k]) == i &&
                   std::get<1>(triplets[k]) == j) {
                v += std::get<2>(triplets[k]);
                ++k;
            }
            if (v != 0.0) {
                cols.push_back(j);
                vals.push_back(v);
            }
        }
        m.row_ptr[i + 1] = cols.size();
    }
    m.col_idx = std::move(cols);
    m.values = std::move(vals);
    return m;
}

CsrMatrix csr_from_dense(const DenseMatrix& a) {
    CsrMatrix m;
    m.n_rows = a.n_rows;
    m.n_cols = a.n_cols;
    m.row_ptr.assign(a.n_rows + 1, 0);
    for (Index i = 0; i < a.n_rows; ++i) {
        for (Index j = 0; j < a.n_cols; ++j) {
            const double v = a.at(i, j);
            if (v != 0.0) {
                m.col_idx.push_back(j);
                m.values.push_back(v);
            }
        }
        m.row_ptr[i + 1] = m.col_idx.size();
    }
    return m;
}

DenseMatrix csr_to_dense(const CsrMatrix& a) {
    DenseMatrix d(a.n_rows, a.n_cols);
    for (Index i = 0; i < a.n_rows; ++i)
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            d.at(i, a.col_idx[k]) = a.values[k];
    return d;
}

CsrMatrix csr_identity(Index n) {
    CsrMatrix m;
    m.n_rows = m.n_cols = n;
    m.row_ptr.resize(n + 1);
    m.col_idx.resize(n);
    m.values.assign(n, 1.0);
    for (Index i = 0; i < n; ++i) {
        m.row_ptr[i] = i;
        m.col_idx[i] = i;
    }
    m.row_ptr[n] = n;
    return m;
}

CsrMatrix csr_transpose(const CsrMatrix& a) {
    CsrMatrix t;
    t.n_rows = a.n_cols;
    t.n_cols = a.n_rows;
    t.row_ptr.assign(a.n_cols + 1, 0);
    t.col_idx.resize(a.nnz());
    t.values.resize(a.nnz());
    for (Index k = 0; k < a.nnz(); ++k) t.row_ptr[a.col_idx[k] + 1]++;
    for (Index j = 0; j < a.n_cols; ++j) t.row_ptr[j + 1] += t.row_ptr[j];
    std::vector<Index> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (Index i = 0; i < a.n_rows; ++i) {
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const Index pos = next[a.col_idx[k]]++;
            t.col_idx[pos] = i;
            t.values[pos] = a.values[k];
        }
    }
    return t;
}

bool csr_is_canonical(const CsrMatrix& a) {
    if (a.row_ptr.size() != a.n_rows + 1) return false;
    if (a.row_ptr.front() != 0 || a.row_ptr.back() != a.nnz()) return false;
    if (a.values.size() != a.col_idx.size()) return false;
    for (Index i = 0; i < a.n_rows; ++i) {
        if (a.row_ptr[i + 1] < a.row_ptr[i]) return false;
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            if (a.col_idx[k] >= a.n_cols) return false;
            if (k > a.row_ptr[i] && a.col_idx[k] <= a.col_idx[k - 1]) return false;
            if (a.values[k] == 0.0) return false;
        }
    }
    return true;
}

bool csr_same_pattern(const CsrMatrix& a, const CsrMatrix& b) {
    return a.n_rows == b.n_rows && a.n_cols == b.n_cols &&
           a.row_ptr == b.row_ptr && a.col_idx == b.col_idx;
}

bool csr_pattern_symmetric(const CsrMatrix& a) {
    if (a.n_rows != a.n_cols) return false;
    return csr_same_pattern(a, csr_transpose(a));
}

double csr_max_abs_diff(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
        throw std::invalid_argument("csr_max_abs_diff: shape mismatch");
    return max_abs_diff(csr_to_dense(a), csr_to_dense(b));
}

}  // namespace kernode
