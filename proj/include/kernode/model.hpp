#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kernode/csr.hpp"
#include "kernode/dense.hpp"
#include "kernode/graph_ops.hpp"
#include "kernode/tensor_grad.hpp"

namespace kernode {

enum class FeatureMapVariant { kGtheta, kGthetaFixed, kGcn };

struct FeatureMapConfig {
    FeatureMapVariant variant = FeatureMapVariant::kGtheta;
    std::size_t hops = 2;
    std::vector<std::size_t> layer_dims;  // MLP output dims, last = embedding dim
    MaskMode mask_mode = MaskMode::kCumulative;
    double fixed_c = 1.0;       // hop weight base for kGthetaFixed, in (0, 1]
    bool normalize_output = false;
    bool gcn_bias = false;      // the GCN aggregation rule has no bias by default

    void validate() const;
};

// Hop-restricted powers of the renormalized adjacency, built once before
// training: P_h = Abar^h masked to the h-hop indicator. The union pattern and
// per-hop scatter maps let each forward pass assemble sum_h w_h P_h as one
// CSR, so aggregation costs a single sparse-dense multiply.
struct HopOperators {
    std::size_t hops = 0;
    MaskMode mask_mode = MaskMode::kCumulative;
    std::vector<CsrMatrix> masked_powers;
    CsrMatrix union_pattern;
    std::vector<std::vector<Index>> scatter;  // per hop: union value slot per P_h entry

    Index n_nodes() const { return union_pattern.n_rows; }
};

HopOperators build_hop_operators(const CsrMatrix& abar, std::size_t hops, MaskMode mode);

// Learnable state: hop weights omega (1 x H) and MLP layers. For the GCN
// variant omega is unused; for the fixed-c variant it is frozen at c^h.
struct MlpLayer {
    ParamTensor w;
    ParamTensor b;
};

struct ModelParams {
    ParamTensor omega;
    std::vector<MlpLayer> mlp;

    std::vector<ParamTensor*> trainable(const FeatureMapConfig& cfg);
    std::vector<const ParamTensor*> all() const;
};

ModelParams init_params(const FeatureMapConfig& cfg, std::size_t in_dim, std::uint64_t seed);

// g_theta (hop-weighted single-step aggregation of the MLP output) and the
// recursive GCN alternative behind one interface. forward caches
// activations; backward accumulates parameter gradients.
class FeatureMapModel {
  public:
    FeatureMapModel(const FeatureMapConfig& cfg, const HopOperators* ops, const CsrMatrix* abar);

    DenseMatrix forward(const CsrMatrix& x, ModelParams& params);
    void backward(const DenseMatrix& upstream, ModelParams& params);

    const FeatureMapConfig& config() const { return cfg_; }

  private:
    DenseMatrix forward_gtheta(const CsrMatrix& x, ModelParams& params);
    void backward_gtheta(const DenseMatrix& upstream, ModelParams& params);
    DenseMatrix forward_gcn(const CsrMatrix& x, ModelParams& params);
    void backward_gcn(const DenseMatrix& upstream, ModelParams& params);

    double hop_weight(const ModelParams& params, std::size_t h) const;

    FeatureMapConfig cfg_;
    const HopOperators* ops_ = nullptr;
    const CsrMatrix* abar_ = nullptr;

    // cached forward state
    SparseAffineOp input_affine_;
    std::vector<AffineOp> hidden_affines_;
    std::vector<ReluOp> relus_;
    DenseMatrix mlp_out_;
    CsrMatrix combined_;
    std::vector<DenseMatrix> gcn_pre_spmm_;  // per layer: X W (input to the aggregation)
    bool ran_forward_ = false;
};

// Versioned JSON checkpoint of all parameter tensors; doubles round-trip
// bit-exactly through nlohmann's shortest-representation formatting.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const FeatureMapConfig& cfg, const std::string& note = "");
struct Checkpoint {
    ModelParams params;
    FeatureMapConfig cfg;
    std::string note;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace kernode
