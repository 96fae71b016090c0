#pragma once

#include <cstdint>
#include <vector>

#include "kernode/csr.hpp"
#include "kernode/dense.hpp"

namespace kernode {

enum class MaskMode { kCumulative, kExact };

// Renormalized adjacency: Abar = Dt^{-1/2} (A + I) Dt^{-1/2} where Dt is the
// degree matrix of A + I. Input must be symmetric, binary, zero-diagonal.
CsrMatrix renormalized_adjacency(const CsrMatrix& adj);

// a^h by repeated sparse-sparse multiplication (Gustavson row merge),
// canonical output. h = 0 is rejected.
CsrMatrix sparse_power(const CsrMatrix& a, std::size_t h);

// Hop-indicator masks M^(1)..M^(H) from BFS shortest-path distances on the
// original graph. Cumulative: M^(h)(i,j) = 1 iff d(i,j) <= h (diagonal
// included). Exact: M^(h)(i,j) = 1 iff d(i,j) == h (no diagonal for h >= 1).
std::vector<CsrMatrix> hop_masks(const CsrMatrix& adj, std::size_t hops, MaskMode mode);

// Keeps entries of a where mask is nonzero; mask values must be 0/1.
CsrMatrix hadamard_mask(const CsrMatrix& a, const CsrMatrix& mask);

// Sparse-dense product a * x. Deterministic accumulation order (CSR order).
// Increments the aggregation counter (see below).
DenseMatrix spmm_dense(const CsrMatrix& a, const DenseMatrix& x);

// a^T * x without materializing the transpose. Backward-pass helper; not
// counted as a forward aggregation.
DenseMatrix spmm_dense_transposed(const CsrMatrix& a, const DenseMatrix& x);

// Nadaraya-Watson kernel-weighted average: row i of the result is
// sum_u k(u,i) p(u,:) / sum_u k(u,i). Dense oracle for the sparse
// aggregation path; throws if any column of k sums to zero.
DenseMatrix nadaraya_watson_dense(const DenseMatrix& k, const DenseMatrix& p);

// Counter over spmm_dense calls. The feature-map forward passes route every
// graph-operator application through spmm_dense, so this measures
// aggregations per forward; MLP-internal products do not touch it.
std::uint64_t spmm_call_count();
void reset_spmm_call_count();

// Largest-magnitude eigenvalue estimate by power iteration (symmetric input).
double spectral_radius_estimate(const CsrMatrix& a, std::size_t iters = 200,
                                std::uint64_t seed = 7);

}  // namespace kernode
