#pragma once

#include <cstdint>
#include <span>

#include "kernode/dense.hpp"

namespace kernode {

enum class KernelKind { kDot, kRbf };

// Base kernel applied to learned embeddings. Dot product or RBF; both are
// positive semidefinite, which the composed kernel inherits.
struct BaseKernel {
    KernelKind kind = KernelKind::kDot;
    double gamma = 1.0;

    static BaseKernel dot() { return {KernelKind::kDot, 0.0}; }
    static BaseKernel rbf(double gamma);
};

double kernel_eval(const BaseKernel& k, std::span<const double> zi,
                   std::span<const double> zj);

// Cosine similarity (dot product on norm-ball embeddings), in [-1, 1].
// Near-zero vectors throw.
double normalized_kernel_eval(std::span<const double> zi, std::span<const double> zj,
                              double eps = 1e-12);

// Symmetric Gram matrix K(i,j) = k(z_i, z_j); upper triangle computed once
// and mirrored so the result equals its transpose exactly.
DenseMatrix gram_matrix(const DenseMatrix& z, const BaseKernel& k);

// Median heuristic: gamma = 1 / (2 sigma^2) with sigma the median pairwise
// distance over a seeded subsample of at most max_rows rows. Degenerate
// (zero-median) embeddings fall back to gamma = 1.
double median_heuristic_gamma(const DenseMatrix& z, std::size_t max_rows = 512,
                              std::uint64_t seed = 9);

}  // namespace kernode
