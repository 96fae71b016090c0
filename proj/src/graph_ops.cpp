#include "kernode/graph_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "kernode/rng.hpp"

namespace kernode {

namespace {

std::uint64_t g_spmm_calls = 0;

void require_square(const CsrMatrix& a, const char* who) {
    if (a.n_rows != a.n_cols)
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

void require_symmetric_binary_hollow(const CsrMatrix& adj, const char* who) {
    require_square(adj, who);
    for (Index i = 0; i < adj.n_rows; ++i)
        for (Index k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
            if (adj.col_idx[k] == i)
                throw std::invalid_argument(std::string(who) + ": nonzero diagonal in input");
            if (adj.values[k] != 1.0)
                throw std::invalid_argument(std::string(who) + ": adjacency values must be 0/1");
        }
    if (!csr_pattern_symmetric(adj))
        throw std::invalid_argument(std::string(who) + ": asymmetric adjacency pattern");
}

}  // namespace

CsrMatrix renormalized_adjacency(const CsrMatrix& adj) {
    require_symmetric_binary_hollow(adj, "renormalized_adjacency");
    const Index n = adj.n_rows;

    // Degree of A + I; binary input makes it row nnz + 1.
    std::vector<double> inv_sqrt_deg(n);
    for (Index i = 0; i < n; ++i)
        inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(adj.row_nnz(i) + 1));

    CsrMatrix abar;
    abar.n_rows = abar.n_cols = n;
    abar.row_ptr.assign(n + 1, 0);
    abar.col_idx.reserve(adj.nnz() + n);
    abar.values.reserve(adj.nnz() + n);
    for (Index i = 0; i < n; ++i) {
        bool diag_emitted = false;
        for (Index k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
            const Index j = adj.col_idx[k];
            if (!diag_emitted && j > i) {
                abar.col_idx.push_back(i);
                abar.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
                diag_emitted = true;
            }
            abar.col_idx.push_back(j);
            abar.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[j]);
        }
        if (!diag_emitted) {
            abar.col_idx.push_back(i);
            abar.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        }
        abar.row_ptr[i + 1] = abar.col_idx.size();
    }
    return abar;
}

namespace {

// One SpGEMM step: c = a * b, canonical output (Gustavson with a dense
// accumulator row reused across rows).
CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.n_cols != b.n_rows)
        throw std::invalid_argument("spgemm: inner dimensions do not match");
    CsrMatrix c;
    c.n_rows = a.n_rows;
    c.n_cols = b.n_cols;
    c.row_ptr.assign(a.n_rows + 1, 0);

    std::vector<double> acc(b.n_cols, 0.0);
    std::vector<Index> marked;
    marked.reserve(64);
    for (Index i = 0; i < a.n_rows; ++i) {
        marked.clear();
        for (Index ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
            const Index k = a.col_idx[ka];
            const double av = a.values[ka];
            for (Index kb = b.row_ptr[k]; kb < b.row_ptr[k + 1]; ++kb) {
                const Index j = b.col_idx[kb];
                if (acc[j] == 0.0) marked.push_back(j);
                acc[j] += av * b.values[kb];
            }
        }
        std::sort(marked.begin(), marked.end());
        for (Index j : marked) {
            if (acc[j] != 0.0) {
                c.col_idx.push_back(j);
                c.values.push_back(acc[j]);
            }
            acc[j] = 0.0;
        }
        c.row_ptr[i + 1] = c.col_idx.size();
    }
    return c;
}

}  // namespace

CsrMatrix sparse_power(const CsrMatrix& a, std::size_t h) {
    require_square(a, "sparse_power");
    if (h == 0) throw std::invalid_argument("sparse_power: h must be >= 1");
    CsrMatrix result = a;
    for (std::size_t step = 1; step < h; ++step) result = spgemm(result, a);
    return result;
}

std::vector<CsrMatrix> hop_masks(const CsrMatrix& adj, std::size_t hops, MaskMode mode) {
    require_symmetric_binary_hollow(adj, "hop_masks");
    const Index n = adj.n_rows;
    const Index unseen = static_cast<Index>(-1);

    // pairs_at[h][...] = (i, j) with d(i, j) == h, h in 1..hops.
    std::vector<std::vector<std::pair<Index, Index>>> pairs_at(hops + 1);
    std::vector<Index> dist(n, unseen);
    std::vector<Index> touched;
    std::deque<Index> queue;

    for (Index src = 0; src < n; ++src) {
        dist[src] = 0;
        touched.assign(1, src);
        queue.assign(1, src);
        while (!queue.empty()) {
            const Index u = queue.front();
            queue.pop_front();
            if (dist[u] >= hops) continue;
            for (Index k = adj.row_ptr[u]; k < adj.row_ptr[u + 1]; ++k) {
                const Index v = adj.col_idx[k];
                if (dist[v] == unseen) {
                    dist[v] = dist[u] + 1;
                    touched.push_back(v);
                    queue.push_back(v);
                    pairs_at[dist[v]].emplace_back(src, v);
                }
            }
        }
        for (Index v : touched) dist[v] = unseen;
    }

    std::vector<CsrMatrix> masks;
    masks.reserve(hops);
    std::vector<std::tuple<Index, Index, double>> triplets;
    for (std::size_t h = 1; h <= hops; ++h) {
        triplets.clear();
        if (mode == MaskMode::kCumulative) {
            for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
            for (std::size_t d = 1; d <= h; ++d)
                for (const auto& [i, j] : pairs_at[d]) triplets.emplace_back(i, j, 1.0);
        } else {
            for (const auto& [i, j] : pairs_at[h]) triplets.emplace_back(i, j, 1.0);
        }
        masks.push_back(csr_from_triplets(n, n, triplets));
    }
    return masks;
}

CsrMatrix hadamard_mask(const CsrMatrix& a, const CsrMatrix& mask) {
    if (a.n_rows != mask.n_rows || a.n_cols != mask.n_cols)
        throw std::invalid_argument("hadamard_mask: shape mismatch");
    for (double v : mask.values)
        if (v != 1.0)
            throw std::invalid_argument("hadamard_mask: mask values must be 0/1");

    CsrMatrix c;
    c.n_rows = a.n_rows;
    c.n_cols = a.n_cols;
    c.row_ptr.assign(a.n_rows + 1, 0);
    for (Index i = 0; i < a.n_rows; ++i) {
        Index ka = a.row_ptr[i], km = mask.row_ptr[i];
        const Index ea = a.row_ptr[i + 1], em = mask.row_ptr[i + 1];
        while (ka < ea && km < em) {
            if (a.col_idx[ka] < mask.col_idx[km]) {
                ++ka;
            } else if (a.col_idx[ka] > mask.col_idx[km]) {
                ++km;
            } else {
                c.col_idx.push_back(a.col_idx[ka]);
                c.values.push_back(a.values[ka]);
                ++ka;
                ++km;
            }
        }
        c.row_ptr[i + 1] = c.col_idx.size();
    }
    return c;
}

DenseMatrix spmm_dense(const CsrMatrix& a, const DenseMatrix& x) {
    if (a.n_cols != x.n_rows)
        throw std::invalid_argument("spmm_dense: shape mismatch");
    ++g_spmm_calls;
    DenseMatrix y(a.n_rows, x.n_cols);
    for (Index i = 0; i < a.n_rows; ++i) {
        double* yi = y.row(i);
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const double v = a.values[k];
            const double* xr = x.row(a.col_idx[k]);
            for (Index j = 0; j < x.n_cols; ++j) yi[j] += v * xr[j];
        }
    }
    return y;
}

DenseMatrix spmm_dense_transposed(const CsrMatrix& a, const DenseMatrix& x) {
    if (a.n_rows != x.n_rows)
        throw std::invalid_argument("spmm_dense_transposed: shape mismatch");
    DenseMatrix y(a.n_cols, x.n_cols);
    for (Index i = 0; i < a.n_rows; ++i) {
        const double* xi = x.row(i);
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const double v = a.values[k];
            double* yr = y.row(a.col_idx[k]);
            for (Index j = 0; j < x.n_cols; ++j) yr[j] += v * xi[j];
        }
    }
    return y;
}

DenseMatrix nadaraya_watson_dense(const DenseMatrix& k, const DenseMatrix& p) {
    if (k.n_rows != k.n_cols)
        throw std::invalid_argument("nadaraya_watson_dense: kernel matrix must be square");
    if (k.n_rows != p.n_rows)
        throw std::invalid_argument("nadaraya_watson_dense: shape mismatch");
    const Index n = k.n_rows;
    DenseMatrix out(n, p.n_cols);
    for (Index i = 0; i < n; ++i) {
        double denom = 0.0;
        for (Index u = 0; u < n; ++u) denom += k.at(u, i);
        if (denom == 0.0)
            throw std::invalid_argument("nadaraya_watson_dense: zero kernel mass for a node");
        double* oi = out.row(i);
        for (Index u = 0; u < n; ++u) {
            const double w = k.at(u, i);
            if (w == 0.0) continue;
            const double* pu = p.row(u);
            for (Index j = 0; j < p.n_cols; ++j) oi[j] += w * pu[j];
        }
        for (Index j = 0; j < p.n_cols; ++j) oi[j] /= denom;
    }
    return out;
}

std::uint64_t spmm_call_count() { return g_spmm_calls; }
void reset_spmm_call_count() { g_spmm_calls = 0; }

double spectral_radius_estimate(const CsrMatrix& a, std::size_t iters, std::uint64_t seed) {
    require_square(a, "spectral_radius_estimate");
    const Index n = a.n_rows;
    if (n == 0) return 0.0;
    Rng rng(seed);
    DenseMatrix v(n, 1);
    for (Index i = 0; i < n; ++i) v.at(i, 0) = rng.next_uniform(0.1, 1.0);
    double lambda = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        DenseMatrix w = spmm_dense(a, v);
        double norm = 0.0;
        for (double x : w.data) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (double& x : w.data) x /= norm;
        lambda = norm;
        v = std::move(w);
    }
    return lambda;
}

}  // namespace kernode
