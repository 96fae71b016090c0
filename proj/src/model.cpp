#include "kernode/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "kernode/rng.hpp"

namespace kernode {

void FeatureMapConfig::validate() const {
    if (hops < 1) throw std::invalid_argument("FeatureMapConfig: hops must be >= 1");
    if (layer_dims.empty()) throw std::invalid_argument("FeatureMapConfig: layer_dims empty");
    if (variant == FeatureMapVariant::kGthetaFixed && (fixed_c <= 0.0 || fixed_c > 1.0))
        throw std::invalid_argument("FeatureMapConfig: fixed_c must be in (0, 1]");
}

HopOperators build_hop_operators(const CsrMatrix& abar, std::size_t hops, MaskMode mode) {
    if (abar.n_rows != abar.n_cols)
        throw std::invalid_argument("build_hop_operators: abar must be square");

    // Recover the binary adjacency (Abar pattern minus the diagonal) for BFS;
    // self-loops do not alter shortest-path distances.
    std::vector<std::tuple<Index, Index, double>> adj_triplets;
    adj_triplets.reserve(abar.nnz());
    for (Index i = 0; i < abar.n_rows; ++i)
        for (Index k = abar.row_ptr[i]; k < abar.row_ptr[i + 1]; ++k)
            if (abar.col_idx[k] != i) adj_triplets.emplace_back(i, abar.col_idx[k], 1.0);
    const CsrMatrix adj = csr_from_triplets(abar.n_rows, abar.n_cols, adj_triplets);

    HopOperators ops;
    ops.hops = hops;
    ops.mask_mode = mode;
    const std::vector<CsrMatrix> masks = hop_masks(adj, hops, mode);
    CsrMatrix power = abar;
    for (std::size_t h = 1; h <= hops; ++h) {
        if (h > 1) power = sparse_power(abar, h);
        ops.masked_powers.push_back(hadamard_mask(power, masks[h - 1]));
    }

    // Union pattern across hops plus per-hop scatter maps into its value slots.
    std::vector<std::tuple<Index, Index, double>> union_triplets;
    for (const CsrMatrix& p : ops.masked_powers)
        for (Index i = 0; i < p.n_rows; ++i)
            for (Index k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k)
                union_triplets.emplace_back(i, p.col_idx[k], 1.0);
    ops.union_pattern = csr_from_triplets(abar.n_rows, abar.n_cols, union_triplets);

    ops.scatter.resize(hops);
    for (std::size_t h = 0; h < hops; ++h) {
        const CsrMatrix& p = ops.masked_powers[h];
        ops.scatter[h].resize(p.nnz());
        for (Index i = 0; i < p.n_rows; ++i) {
            const auto begin = ops.union_pattern.col_idx.begin() + ops.union_pattern.row_ptr[i];
            const auto end = ops.union_pattern.col_idx.begin() + ops.union_pattern.row_ptr[i + 1];
            for (Index k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k) {
                const auto it = std::lower_bound(begin, end, p.col_idx[k]);
                ops.scatter[h][k] =
                    ops.union_pattern.row_ptr[i] + static_cast<Index>(it - begin);
            }
        }
    }
    return ops;
}

std::vector<ParamTensor*> ModelParams::trainable(const FeatureMapConfig& cfg) {
    std::vector<ParamTensor*> out;
    if (cfg.variant == FeatureMapVariant::kGtheta) out.push_back(&omega);
    for (MlpLayer& layer : mlp) {
        out.push_back(&layer.w);
        if (cfg.variant != FeatureMapVariant::kGcn || cfg.gcn_bias) out.push_back(&layer.b);
    }
    return out;
}

std::vector<const ParamTensor*> ModelParams::all() const {
    std::vector<const ParamTensor*> out;
    out.push_back(&omega);
    for (const MlpLayer& layer : mlp) {
        out.push_back(&layer.w);
        out.push_back(&layer.b);
    }
    return out;
}

ModelParams init_params(const FeatureMapConfig& cfg, std::size_t in_dim, std::uint64_t seed) {
    cfg.validate();
    ModelParams params;
    params.omega = ParamTensor(DenseMatrix(1, cfg.hops, 1.0), "omega");
    Rng rng(seed);
    std::size_t fan_in = in_dim;
    for (std::size_t l = 0; l < cfg.layer_dims.size(); ++l) {
        const std::size_t fan_out = cfg.layer_dims[l];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        DenseMatrix w(fan_in, fan_out);
        for (double& v : w.data) v = rng.next_uniform(-limit, limit);
        MlpLayer layer;
        layer.w = ParamTensor(std::move(w), "w" + std::to_string(l));
        layer.b = ParamTensor(DenseMatrix(1, fan_out), "b" + std::to_string(l));
        params.mlp.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return params;
}

FeatureMapModel::FeatureMapModel(const FeatureMapConfig& cfg, const HopOperators* ops,
                                 const CsrMatrix* abar)
    : cfg_(cfg), ops_(ops), abar_(abar) {
    cfg_.validate();
    if (cfg_.variant == FeatureMapVariant::kGcn) {
        if (abar_ == nullptr)
            throw std::invalid_argument("FeatureMapModel: GCN variant needs abar");
    } else if (ops_ == nullptr) {
        throw std::invalid_argument("FeatureMapModel: g_theta variants need hop operators");
    } else if (ops_->hops != cfg_.hops) {
        throw std::invalid_argument("FeatureMapModel: hop count mismatch with operators");
    }
}

double FeatureMapModel::hop_weight(const ModelParams& params, std::size_t h) const {
    if (cfg_.variant == FeatureMapVariant::kGthetaFixed)
        return std::pow(cfg_.fixed_c, static_cast<double>(h));
    return params.omega.value.at(0, h - 1);
}

DenseMatrix FeatureMapModel::forward(const CsrMatrix& x, ModelParams& params) {
    if (params.mlp.empty() || params.mlp.front().w.value.n_rows != x.n_cols)
        throw std::invalid_argument("FeatureMapModel: input dim does not match parameters");
    return cfg_.variant == FeatureMapVariant::kGcn ? forward_gcn(x, params)
                                                   : forward_gtheta(x, params);
}

void FeatureMapModel::backward(const DenseMatrix& upstream, ModelParams& params) {
    if (!ran_forward_) throw std::logic_error("FeatureMapModel: backward before forward");
    if (cfg_.variant == FeatureMapVariant::kGcn)
        backward_gcn(upstream, params);
    else
        backward_gtheta(upstream, params);
}

DenseMatrix FeatureMapModel::forward_gtheta(const CsrMatrix& x, ModelParams& params) {
    const std::size_t n_layers = params.mlp.size();
    hidden_affines_.assign(n_layers > 0 ? n_layers - 1 : 0, AffineOp{});
    relus_.assign(n_layers > 0 ? n_layers - 1 : 0, ReluOp{});

    DenseMatrix y = input_affine_.forward(x, params.mlp[0].w, params.mlp[0].b);
    for (std::size_t l = 1; l < n_layers; ++l) {
        y = relus_[l - 1].forward(y);
        y = hidden_affines_[l - 1].forward(y, params.mlp[l].w, params.mlp[l].b);
    }
    mlp_out_ = std::move(y);

    // Assemble the combined operator sum_h w_h P_h on the precomputed union
    // pattern, then aggregate with a single sparse-dense multiply.
    combined_ = ops_->union_pattern;
    std::fill(combined_.values.begin(), combined_.values.end(), 0.0);
    for (std::size_t h = 1; h <= cfg_.hops; ++h) {
        const double w = hop_weight(params, h);
        const CsrMatrix& p = ops_->masked_powers[h - 1];
        const std::vector<Index>& sc = ops_->scatter[h - 1];
        for (Index k = 0; k < p.nnz(); ++k) combined_.values[sc[k]] += w * p.values[k];
    }
    ran_forward_ = true;
    return spmm_dense(combined_, mlp_out_);
}

void FeatureMapModel::backward_gtheta(const DenseMatrix& upstream, ModelParams& params) {
    // d(mlp_out) = S^T * upstream
    DenseMatrix d_mlp = spmm_dense_transposed(combined_, upstream);

    if (cfg_.variant == FeatureMapVariant::kGtheta) {
        // dw_h = sum over P_h entries (i,j) of P_h(i,j) <upstream_i, mlp_out_j>
        for (std::size_t h = 1; h <= cfg_.hops; ++h) {
            const CsrMatrix& p = ops_->masked_powers[h - 1];
            double acc = 0.0;
            for (Index i = 0; i < p.n_rows; ++i) {
                const double* gi = upstream.row(i);
                for (Index k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k) {
                    const double* yj = mlp_out_.row(p.col_idx[k]);
                    double dot = 0.0;
                    for (Index c = 0; c < mlp_out_.n_cols; ++c) dot += gi[c] * yj[c];
                    acc += p.values[k] * dot;
                }
            }
            params.omega.grad.at(0, h - 1) += acc;
        }
    }

    for (std::size_t l = params.mlp.size(); l-- > 1;) {
        d_mlp = hidden_affines_[l - 1].backward(d_mlp);
        d_mlp = relus_[l - 1].backward(d_mlp);
    }
    input_affine_.backward(d_mlp);
}

DenseMatrix FeatureMapModel::forward_gcn(const CsrMatrix& x, ModelParams& params) {
    const std::size_t n_layers = params.mlp.size();
    hidden_affines_.assign(n_layers > 0 ? n_layers - 1 : 0, AffineOp{});
    relus_.assign(n_layers > 0 ? n_layers - 1 : 0, ReluOp{});
    gcn_pre_spmm_.clear();

    DenseMatrix y = input_affine_.forward(x, params.mlp[0].w, params.mlp[0].b);
    y = spmm_dense(*abar_, y);
    for (std::size_t l = 1; l < n_layers; ++l) {
        y = relus_[l - 1].forward(y);
        y = hidden_affines_[l - 1].forward(y, params.mlp[l].w, params.mlp[l].b);
        y = spmm_dense(*abar_, y);
    }
    ran_forward_ = true;
    return y;
}

void FeatureMapModel::backward_gcn(const DenseMatrix& upstream, ModelParams& params) {
    DenseMatrix d = spmm_dense_transposed(*abar_, upstream);
    for (std::size_t l = params.mlp.size(); l-- > 1;) {
        d = hidden_affines_[l - 1].backward(d);
        d = relus_[l - 1].backward(d);
        d = spmm_dense_transposed(*abar_, d);
    }
    input_affine_.backward(d);
}

namespace {

using nlohmann::json;

const char* variant_name(FeatureMapVariant v) {
    switch (v) {
        case FeatureMapVariant::kGtheta: return "gtheta";
        case FeatureMapVariant::kGthetaFixed: return "gtheta_fixed";
        case FeatureMapVariant::kGcn: return "gcn";
    }
    return "gtheta";
}

FeatureMapVariant variant_from_name(const std::string& s) {
    if (s == "gtheta") return FeatureMapVariant::kGtheta;
    if (s == "gtheta_fixed") return FeatureMapVariant::kGthetaFixed;
    if (s == "gcn") return FeatureMapVariant::kGcn;
    throw std::invalid_argument("unknown feature map variant '" + s + "'");
}

json param_to_json(const ParamTensor& p) {
    json j;
    j["name"] = p.name;
    j["rows"] = p.value.n_rows;
    j["cols"] = p.value.n_cols;
    j["data"] = p.value.data;
    return j;
}

ParamTensor param_from_json(const json& j) {
    DenseMatrix value(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    value.data = j.at("data").get<std::vector<double>>();
    if (value.data.size() != value.n_rows * value.n_cols)
        throw std::runtime_error("checkpoint: tensor size does not match its shape");
    return ParamTensor(std::move(value), j.at("name").get<std::string>());
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const FeatureMapConfig& cfg, const std::string& note) {
    json j;
    j["format"] = "kernode-checkpoint";
    j["version"] = 1;
    j["note"] = note;
    j["config"] = {
        {"variant", variant_name(cfg.variant)},
        {"hops", cfg.hops},
        {"layer_dims", cfg.layer_dims},
        {"mask_mode", cfg.mask_mode == MaskMode::kCumulative ? "cumulative" : "exact"},
        {"fixed_c", cfg.fixed_c},
        {"normalize_output", cfg.normalize_output},
        {"gcn_bias", cfg.gcn_bias},
    };
    json tensors = json::array();
    for (const ParamTensor* p : params.all()) tensors.push_back(param_to_json(*p));
    j["params"] = std::move(tensors);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
    out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
    json j;
    in >> j;
    if (j.at("format").get<std::string>() != "kernode-checkpoint")
        throw std::runtime_error("not a kernode checkpoint: " + path.string());
    if (j.at("version").get<int>() != 1)
        throw std::runtime_error("unsupported checkpoint version");

    Checkpoint ckpt;
    ckpt.note = j.value("note", "");
    const json& c = j.at("config");
    ckpt.cfg.variant = variant_from_name(c.at("variant").get<std::string>());
    ckpt.cfg.hops = c.at("hops").get<std::size_t>();
    ckpt.cfg.layer_dims = c.at("layer_dims").get<std::vector<std::size_t>>();
    ckpt.cfg.mask_mode = c.at("mask_mode").get<std::string>() == "exact" ? MaskMode::kExact
                                                                         : MaskMode::kCumulative;
    ckpt.cfg.fixed_c = c.at("fixed_c").get<double>();
    ckpt.cfg.normalize_output = c.at("normalize_output").get<bool>();
    ckpt.cfg.gcn_bias = c.at("gcn_bias").get<bool>();

    const json& tensors = j.at("params");
    if (tensors.empty()) throw std::runtime_error("checkpoint has no parameters");
    ckpt.params.omega = param_from_json(tensors.at(0));
    for (std::size_t k = 1; k + 1 < tensors.size(); k += 2) {
        MlpLayer layer;
        layer.w = param_from_json(tensors.at(k));
        layer.b = param_from_json(tensors.at(k + 1));
        ckpt.params.mlp.push_back(std::move(layer));
    }
    if (ckpt.params.mlp.size() != ckpt.cfg.layer_dims.size())
        throw std::runtime_error("checkpoint layer count does not match its config");
    return ckpt;
}

}  // namespace kernode
