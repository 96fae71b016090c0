#pragma once

#include <cstddef>
#include <vector>

namespace kernode {

// Row-major dense matrix of doubles. The only dense container used across
// the library; all training math is double precision.
struct DenseMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : n_rows(rows), n_cols(cols), data(rows * cols, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * n_cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * n_cols + j]; }

    double* row(std::size_t i) { return data.data() + i * n_cols; }
    const double* row(std::size_t i) const { return data.data() + i * n_cols; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const DenseMatrix& o) const {
        return n_rows == o.n_rows && n_cols == o.n_cols;
    }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    static DenseMatrix identity(std::size_t n);
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

// a += scale * b
void axpy(DenseMatrix& a, const DenseMatrix& b, double scale = 1.0);

double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
bool all_finite(const DenseMatrix& a);

}  // namespace kernode
