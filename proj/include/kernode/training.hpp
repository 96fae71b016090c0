#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kernode/classify.hpp"
#include "kernode/dataset.hpp"
#include "kernode/kernel.hpp"
#include "kernode/model.hpp"
#include "kernode/rng.hpp"
#include "kernode/tensor_grad.hpp"

namespace kernode {

// Anchor/positive share a class; negative differs. All drawn from the train split.
struct Triplet {
    Index anchor, positive, negative;
};

// Published method variants plus the appendix link-prediction task.
//   K1: dot kernel, g_theta, triplet loss, nearest centroid
//   K2: RBF kernel, g_theta, triplet loss, nearest centroid
//   K3: dot kernel, g_theta, triplet + softmax loss, softmax classifier
//   N1: g_theta, softmax loss only, softmax classifier
//   K1Star: dot kernel, GCN feature map, triplet loss, nearest centroid
enum class Variant { kK1, kK2, kK3, kN1, kK1Star, kLinkPred };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct TrainConfig {
    Variant variant = Variant::kK3;
    std::size_t hops = 2;
    std::vector<std::size_t> layer_dims;  // empty -> published defaults for the variant
    MaskMode mask_mode = MaskMode::kCumulative;
    double alpha = 0.1;
    double lr = 0.01;
    std::size_t epochs = 0;  // 0 -> published defaults (variant and dataset dependent)
    std::size_t triplets_per_epoch = 10000;
    std::uint64_t seed = 0;
    double loss_weight_lambda = 1.0;  // K3: L = L_Y + lambda * L_K
    bool normalize_features = true;
    double rbf_gamma = 0.0;  // 0 -> median heuristic recomputed each epoch
    bool gcn_bias = false;
    double fixed_c = 0.0;  // > 0 -> freeze hop weights at c^h (ablation)

    void validate() const;
};

// Fills layer_dims/epochs from the published per-variant defaults when unset
// and checks variant consistency (softmax variants need a C-dim output).
TrainConfig resolve_defaults(TrainConfig cfg, const std::string& dataset_name,
                             std::size_t n_classes);

int label_similarity(int y_i, int y_j);         // 1 if equal else -1
double triplet_loss(double k_ij, double k_ik, double alpha);

std::vector<Triplet> sample_triplets(const std::vector<int>& labels,
                                     std::span<const Index> train_idx, std::size_t n,
                                     Rng& rng);

struct KernelLossResult {
    double loss = 0.0;
    DenseMatrix dz;
    std::size_t active_triplets = 0;
};

// Mean hinge loss over triplets of base-kernel similarities on z, with the
// gradient w.r.t. z. The caller normalizes z first for the dot kernel.
KernelLossResult kernel_triplet_loss(const DenseMatrix& z,
                                     const std::vector<Triplet>& triplets,
                                     const BaseKernel& kernel, double alpha);

struct LinkPredLossResult {
    double loss = 0.0;
    DenseMatrix dz;
};

// Mean binary cross entropy of sigmoid(<z_i, z_j>) over positive edges
// (target 1) and sampled negatives (target 0).
LinkPredLossResult linkpred_loss(const DenseMatrix& z,
                                 std::span<const std::pair<Index, Index>> pos_edges,
                                 std::span<const std::pair<Index, Index>> neg_edges);

struct EdgeSplit {
    std::vector<std::pair<Index, Index>> train_edges, val_edges, test_edges;
    std::vector<std::pair<Index, Index>> val_neg, test_neg;
    CsrMatrix train_adjacency;  // input graph with val/test edges removed
};

EdgeSplit make_edge_split(const CsrMatrix& adj, double val_frac, double test_frac,
                          std::uint64_t seed);

struct EpochMetrics {
    std::size_t epoch = 0;
    double loss_k = 0.0;
    double loss_y = 0.0;
    double val_acc = 0.0;   // AUC for link prediction
    double test_acc = 0.0;  // AUC for link prediction
};

struct TrainResult {
    FeatureMapConfig fm_cfg;
    ModelParams best_params;
    std::vector<EpochMetrics> history;
    std::size_t best_epoch = 0;
    double best_val_acc = -1.0;
    double test_acc_at_best = 0.0;
};

// Full-batch training of one classification variant; returns the parameters
// with the best validation accuracy.
TrainResult train(const GraphDataset& ds, const SplitSpec& split, const TrainConfig& cfg);

struct LinkPredResult {
    FeatureMapConfig fm_cfg;
    ModelParams best_params;
    std::vector<EpochMetrics> history;
    std::size_t best_epoch = 0;
    double best_val_auc = -1.0;
    double test_auc = 0.0;
    double test_ap = 0.0;
};

LinkPredResult train_link_prediction(const GraphDataset& ds, const TrainConfig& cfg);

// Deterministic full-loss closure over the bundled toy graph for gradient
// verification: triplets and the RBF bandwidth are frozen so repeated
// evaluations see the exact same loss surface.
FiniteDiffReport gradcheck_variant(Variant v, double corrupt_scale = 1.0,
                                   std::uint64_t seed = 3, double fd_step = 1e-5,
                                   std::size_t coords_per_param = 50);

// Computes embeddings (and logits) for fixed parameters; shared by
// evaluation, the CLI export path and tests.
DenseMatrix compute_embeddings(const GraphDataset& ds, const TrainConfig& cfg,
                               const FeatureMapConfig& fm_cfg, ModelParams& params);

}  // namespace kernode
