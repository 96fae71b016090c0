#pragma once

#include <cstdint>

#include "kernode/dataset.hpp"

namespace kernode {

// Seeded Erdos-Renyi graph dataset with class-conditional Gaussian-ish
// features. Ensures connectivity by chaining i -> i+1 and at least one node
// per class. Used by property tests and the gradient-check toys.
GraphDataset make_random_dataset(std::size_t n_nodes, double edge_prob,
                                 std::size_t n_classes, std::size_t n_features,
                                 std::uint64_t seed);

// Two dense same-class clusters joined by a few cross edges, with features
// separable after one hop of smoothing.
GraphDataset make_two_cluster_dataset(std::size_t nodes_per_cluster, double intra_prob,
                                      std::size_t n_inter_edges, std::size_t n_features,
                                      double feature_noise, std::uint64_t seed);

// The bundled 10-node, 3-class, 6-feature toy used by `kernode gradcheck`.
GraphDataset make_gradcheck_toy();

}  // namespace kernode
