#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kernode/csr.hpp"
#include "kernode/dense.hpp"

namespace kernode {

// A loaded citation-network style dataset: bag-of-words features, one class
// label per node, symmetric binary zero-diagonal adjacency.
struct GraphDataset {
    std::string name;
    std::size_t n_nodes = 0;
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    DenseMatrix features;  // n_nodes x n_features, raw counts
    std::vector<int> labels;
    CsrMatrix adjacency;

    // Ingestion notes surfaced in output metadata.
    std::size_t dropped_self_loops = 0;
    std::size_t deduplicated_edges = 0;

    std::size_t n_undirected_edges() const { return adjacency.nnz() / 2; }
};

enum class SplitRegime { kFastgcn, kJk };

std::string to_string(SplitRegime r);
SplitRegime split_regime_from_string(const std::string& s);

struct SplitSpec {
    std::vector<Index> train_idx, val_idx, test_idx;
    SplitRegime regime = SplitRegime::kFastgcn;
    bool loaded_from_file = false;  // false: seeded random split of published sizes
};

// On-disk container: meta.json, edges.tsv, features.tsv, labels.tsv,
// optionally split.<regime>.json. See README for the exact schema.
GraphDataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const GraphDataset& ds, const std::filesystem::path& dir);

// Published train/val/test sizes (FastGCN and JK regimes) for the three
// benchmark datasets; throws for unknown names or the missing Pubmed/JK case.
struct SplitSizes {
    std::size_t n_train, n_val, n_test;
};
SplitSizes published_split_sizes(const std::string& dataset_name, SplitRegime regime);

// Uses dir/split.<regime>.json verbatim when present; otherwise draws a
// seeded random split with the published sizes and persists it there.
SplitSpec make_split(const GraphDataset& ds, const std::filesystem::path& dir,
                     SplitRegime regime, std::uint64_t seed);

// Seeded random split with explicit sizes (for containers without published
// sizes). Never touches disk.
SplitSpec make_split_sized(const GraphDataset& ds, const SplitSizes& sizes,
                           SplitRegime regime, std::uint64_t seed);

void validate_split(const GraphDataset& ds, const SplitSpec& split);

// Row-normalizes bag-of-words features to unit L1 mass (rows with zero mass
// are left as-is).
DenseMatrix row_normalize_features(const DenseMatrix& x);

}  // namespace kernode
