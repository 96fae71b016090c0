#include "kernode/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kernode/rng.hpp"

namespace kernode {

BaseKernel BaseKernel::rbf(double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("BaseKernel::rbf: gamma must be > 0");
    return {KernelKind::kRbf, gamma};
}

double kernel_eval(const BaseKernel& k, std::span<const double> zi,
                   std::span<const double> zj) {
    if (zi.size() != zj.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    if (k.kind == KernelKind::kDot) {
        double s = 0.0;
        for (std::size_t d = 0; d < zi.size(); ++d) s += zi[d] * zj[d];
        return s;
    }
    double sq = 0.0;
    for (std::size_t d = 0; d < zi.size(); ++d) {
        const double diff = zi[d] - zj[d];
        sq += diff * diff;
    }
    return std::exp(-k.gamma * sq);
}

double normalized_kernel_eval(std::span<const double> zi, std::span<const double> zj,
                              double eps) {
    if (zi.size() != zj.size())
        throw std::invalid_argument("normalized_kernel_eval: dimension mismatch");
    double dot = 0.0, ni = 0.0, nj = 0.0;
    for (std::size_t d = 0; d < zi.size(); ++d) {
        dot += zi[d] * zj[d];
        ni += zi[d] * zi[d];
        nj += zj[d] * zj[d];
    }
    ni = std::sqrt(ni);
    nj = std::sqrt(nj);
    if (ni < eps || nj < eps)
        throw std::domain_error("normalized_kernel_eval: near-zero vector");
    return dot / (ni * nj);
}

DenseMatrix gram_matrix(const DenseMatrix& z, const BaseKernel& k) {
    const Index n = z.n_rows;
    DenseMatrix g(n, n);
    for (Index i = 0; i < n; ++i) {
        std::span<const double> zi(z.row(i), z.n_cols);
        for (Index j = i; j < n; ++j) {
            const double v = kernel_eval(k, zi, std::span<const double>(z.row(j), z.n_cols));
            g.at(i, j) = v;
            g.at(j, i) = v;
        }
    }
    return g;
}

double median_heuristic_gamma(const DenseMatrix& z, std::size_t max_rows,
                              std::uint64_t seed) {
    const Index n = z.n_rows;
    if (n < 2) return 1.0;
    std::vector<Index> rows(n);
    for (Index i = 0; i < n; ++i) rows[i] = i;
    Rng rng(seed);
    const std::size_t m = std::min<std::size_t>(max_rows, n);
    for (std::size_t i = 0; i < m; ++i) {
        const Index pick = i + rng.next_index(n - i);
        std::swap(rows[i], rows[pick]);
    }
    std::vector<double> dists;
    dists.reserve(m * (m - 1) / 2);
    for (std::size_t a = 0; a < m; ++a) {
        const double* za = z.row(rows[a]);
        for (std::size_t b = a + 1; b < m; ++b) {
            const double* zb = z.row(rows[b]);
            double sq = 0.0;
            for (Index d = 0; d < z.n_cols; ++d) {
                const double diff = za[d] - zb[d];
                sq += diff * diff;
            }
            dists.push_back(std::sqrt(sq));
        }
    }
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    const double sigma = dists[mid];
    if (sigma <= 0.0) return 1.0;
    return 1.0 / (2.0 * sigma * sigma);
}

}  // namespace kernode
