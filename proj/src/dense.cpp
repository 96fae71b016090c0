#include "kernode/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kernode {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols != b.n_rows)
        throw std::invalid_argument("matmul: inner dimensions do not match");
    DenseMatrix c(a.n_rows, b.n_cols);
    // i-k-j order: streams rows of b, keeps accumulation order fixed per row.
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.n_cols; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.n_cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.n_cols, a.n_rows);
    for (std::size_t i = 0; i < a.n_rows; ++i)
        for (std::size_t j = 0; j < a.n_cols; ++j) t.at(j, i) = a.at(i, j);
    return t;
}

void axpy(DenseMatrix& a, const DenseMatrix& b, double scale) {
    if (!a.same_shape(b)) throw std::invalid_argument("axpy: shape mismatch");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += scale * b.data[i];
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::fabs(v));
    return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    return m;
}

bool all_finite(const DenseMatrix& a) {
    for (double v : a.data)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace kernode
