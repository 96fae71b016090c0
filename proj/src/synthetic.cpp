#include "kernode/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "kernode/rng.hpp"

namespace kernode {

namespace {

CsrMatrix adjacency_from_edges(std::size_t n, const std::set<std::pair<Index, Index>>& edges) {
    std::vector<std::tuple<Index, Index, double>> triplets;
    triplets.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
        triplets.emplace_back(u, v, 1.0);
        triplets.emplace_back(v, u, 1.0);
    }
    return csr_from_triplets(n, n, triplets);
}

}  // namespace

GraphDataset make_random_dataset(std::size_t n_nodes, double edge_prob,
                                 std::size_t n_classes, std::size_t n_features,
                                 std::uint64_t seed) {
    Rng rng(seed);
    std::set<std::pair<Index, Index>> edges;
    for (Index i = 0; i + 1 < n_nodes; ++i) edges.emplace(i, i + 1);
    for (Index i = 0; i < n_nodes; ++i)
        for (Index j = i + 1; j < n_nodes; ++j)
            if (rng.next_double() < edge_prob) edges.emplace(i, j);

    GraphDataset ds;
    ds.name = "synthetic-random";
    ds.n_nodes = n_nodes;
    ds.n_classes = n_classes;
    ds.n_features = n_features;
    ds.adjacency = adjacency_from_edges(n_nodes, edges);
    ds.labels.resize(n_nodes);
    for (Index i = 0; i < n_nodes; ++i)
        ds.labels[i] = static_cast<int>(i < n_classes ? i : rng.next_index(n_classes));

    ds.features = DenseMatrix(n_nodes, n_features);
    for (Index i = 0; i < n_nodes; ++i) {
        const Index base = ds.labels[i] % n_features;
        for (Index j = 0; j < n_features; ++j)
            ds.features.at(i, j) = rng.next_uniform(0.0, 0.5) + (j == base ? 1.0 : 0.0);
    }
    return ds;
}

GraphDataset make_two_cluster_dataset(std::size_t nodes_per_cluster, double intra_prob,
                                      std::size_t n_inter_edges, std::size_t n_features,
                                      double feature_noise, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = 2 * nodes_per_cluster;
    std::set<std::pair<Index, Index>> edges;
    for (std::size_t c = 0; c < 2; ++c) {
        const Index off = c * nodes_per_cluster;
        // ring inside each cluster keeps it connected at any intra_prob
        for (Index i = 0; i + 1 < nodes_per_cluster; ++i) edges.emplace(off + i, off + i + 1);
        for (Index i = 0; i < nodes_per_cluster; ++i)
            for (Index j = i + 1; j < nodes_per_cluster; ++j)
                if (rng.next_double() < intra_prob) edges.emplace(off + i, off + j);
    }
    for (std::size_t e = 0; e < n_inter_edges; ++e) {
        const Index u = rng.next_index(nodes_per_cluster);
        const Index v = nodes_per_cluster + rng.next_index(nodes_per_cluster);
        edges.emplace(u, v);
    }

    GraphDataset ds;
    ds.name = "synthetic-two-cluster";
    ds.n_nodes = n;
    ds.n_classes = 2;
    ds.n_features = n_features;
    ds.adjacency = adjacency_from_edges(n, edges);
    ds.labels.resize(n);
    ds.features = DenseMatrix(n, n_features);
    for (Index i = 0; i < n; ++i) {
        const int cls = i < nodes_per_cluster ? 0 : 1;
        ds.labels[i] = cls;
        for (Index j = 0; j < n_features; ++j) {
            const bool on = (cls == 0) ? (j < n_features / 2) : (j >= n_features / 2);
            ds.features.at(i, j) = (on ? 1.0 : 0.0) + rng.next_uniform(0.0, feature_noise);
        }
    }
    return ds;
}

GraphDataset make_gradcheck_toy() {
    GraphDataset ds = make_random_dataset(10, 0.35, 3, 6, 20240901);
    ds.name = "gradcheck-toy";
    return ds;
}

}  // namespace kernode
