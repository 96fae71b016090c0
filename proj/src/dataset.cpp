#include "kernode/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kernode/rng.hpp"

namespace kernode {

namespace {

using nlohmann::json;

json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing file: " + p.string());
    json j;
    in >> j;
    return j;
}

// Parses "a<TAB>b" or "a<TAB>b<TAB>c" rows of a TSV file, invoking fn per row.
template <typename Fn>
void for_each_tsv_row(const std::filesystem::path& p, std::size_t n_fields, Fn&& fn) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing file: " + p.string());
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> fields(n_fields);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t start = 0;
        for (std::size_t f = 0; f < n_fields; ++f) {
            const std::size_t tab = line.find('\t', start);
            if (f + 1 < n_fields) {
                if (tab == std::string::npos)
                    throw std::runtime_error(p.string() + ":" + std::to_string(line_no) +
                                             ": expected " + std::to_string(n_fields) + " fields");
                fields[f] = line.substr(start, tab - start);
                start = tab + 1;
            } else {
                fields[f] = line.substr(start);
            }
        }
        fn(fields, line_no);
    }
}

std::size_t parse_index(const std::string& s, const std::filesystem::path& p, std::size_t line) {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0)
        throw std::runtime_error(p.string() + ":" + std::to_string(line) + ": bad index '" + s + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string to_string(SplitRegime r) {
    return r == SplitRegime::kFastgcn ? "fastgcn" : "jk";
}

SplitRegime split_regime_from_string(const std::string& s) {
    if (s == "fastgcn") return SplitRegime::kFastgcn;
    if (s == "jk") return SplitRegime::kJk;
    throw std::invalid_argument("unknown split regime '" + s + "'");
}

GraphDataset load_dataset(const std::filesystem::path& dir) {
    const json meta = read_json_file(dir / "meta.json");
    GraphDataset ds;
    ds.name = meta.at("name").get<std::string>();
    ds.n_nodes = meta.at("n_nodes").get<std::size_t>();
    ds.n_classes = meta.at("n_classes").get<std::size_t>();
    ds.n_features = meta.at("n_features").get<std::size_t>();
    if (ds.n_nodes == 0 || ds.n_classes == 0 || ds.n_features == 0)
        throw std::runtime_error(dir.string() + ": meta.json has zero-sized dataset");

    // edges.tsv: one undirected edge per line; duplicates/reversals collapse.
    std::set<std::pair<Index, Index>> edges;
    std::size_t raw_edges = 0;
    const auto edges_path = dir / "edges.tsv";
    for_each_tsv_row(edges_path, 2, [&](const std::vector<std::string>& f, std::size_t line) {
        const Index u = parse_index(f[0], edges_path, line);
        const Index v = parse_index(f[1], edges_path, line);
        if (u >= ds.n_nodes || v >= ds.n_nodes)
            throw std::runtime_error(edges_path.string() + ":" + std::to_string(line) +
                                     ": node index out of range");
        ++raw_edges;
        if (u == v) {
            ++ds.dropped_self_loops;
            return;
        }
        edges.emplace(std::min(u, v), std::max(u, v));
    });
    ds.deduplicated_edges = raw_edges - ds.dropped_self_loops - edges.size();
    if (ds.dropped_self_loops > 0)
        std::fprintf(stderr, "[dataset] %s: dropped %zu self-loop edge(s)\n", ds.name.c_str(),
                     ds.dropped_self_loops);

    std::vector<std::tuple<Index, Index, double>> adj_triplets;
    adj_triplets.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
        adj_triplets.emplace_back(u, v, 1.0);
        adj_triplets.emplace_back(v, u, 1.0);
    }
    ds.adjacency = csr_from_triplets(ds.n_nodes, ds.n_nodes, adj_triplets);

    ds.features = DenseMatrix(ds.n_nodes, ds.n_features);
    const auto feat_path = dir / "features.tsv";
    for_each_tsv_row(feat_path, 3, [&](const std::vector<std::string>& f, std::size_t line) {
        const Index node = parse_index(f[0], feat_path, line);
        const Index feat = parse_index(f[1], feat_path, line);
        if (node >= ds.n_nodes || feat >= ds.n_features)
            throw std::runtime_error(feat_path.string() + ":" + std::to_string(line) +
                                     ": index out of range");
        ds.features.at(node, feat) = std::stod(f[2]);
    });

    ds.labels.assign(ds.n_nodes, -1);
    const auto labels_path = dir / "labels.tsv";
    for_each_tsv_row(labels_path, 2, [&](const std::vector<std::string>& f, std::size_t line) {
        const Index node = parse_index(f[0], labels_path, line);
        const Index cls = parse_index(f[1], labels_path, line);
        if (node >= ds.n_nodes)
            throw std::runtime_error(labels_path.string() + ":" + std::to_string(line) +
                                     ": node index out of range");
        if (cls >= ds.n_classes)
            throw std::runtime_error(labels_path.string() + ":" + std::to_string(line) +
                                     ": class index out of range");
        ds.labels[node] = static_cast<int>(cls);
    });

    std::vector<std::size_t> class_count(ds.n_classes, 0);
    for (Index i = 0; i < ds.n_nodes; ++i) {
        if (ds.labels[i] < 0)
            throw std::runtime_error(ds.name + ": node " + std::to_string(i) + " has no label");
        ++class_count[ds.labels[i]];
    }
    for (std::size_t c = 0; c < ds.n_classes; ++c)
        if (class_count[c] == 0)
            throw std::runtime_error(ds.name + ": class " + std::to_string(c) + " has no nodes");
    return ds;
}

void save_dataset(const GraphDataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        json meta;
        meta["name"] = ds.name;
        meta["n_nodes"] = ds.n_nodes;
        meta["n_classes"] = ds.n_classes;
        meta["n_features"] = ds.n_features;
        std::ofstream out(dir / "meta.json");
        out << meta.dump(2) << "\n";
    }
    {
        std::ofstream out(dir / "edges.tsv");
        for (Index i = 0; i < ds.adjacency.n_rows; ++i)
            for (Index k = ds.adjacency.row_ptr[i]; k < ds.adjacency.row_ptr[i + 1]; ++k) {
                const Index j = ds.adjacency.col_idx[k];
                if (i < j) out << i << '\t' << j << '\n';
            }
    }
    {
        std::ofstream out(dir / "features.tsv");
        char buf[64];
        for (Index i = 0; i < ds.features.n_rows; ++i)
            for (Index j = 0; j < ds.features.n_cols; ++j) {
                const double v = ds.features.at(i, j);
                if (v != 0.0) {
                    std::snprintf(buf, sizeof(buf), "%.17g", v);
                    out << i << '\t' << j << '\t' << buf << '\n';
                }
            }
    }
    {
        std::ofstream out(dir / "labels.tsv");
        for (Index i = 0; i < ds.labels.size(); ++i) out << i << '\t' << ds.labels[i] << '\n';
    }
}

SplitSizes published_split_sizes(const std::string& name, SplitRegime regime) {
    if (name == "cora")
        return regime == SplitRegime::kFastgcn ? SplitSizes{1208, 500, 1000}
                                               : SplitSizes{1624, 542, 542};
    if (name == "citeseer")
        return regime == SplitRegime::kFastgcn ? SplitSizes{1827, 500, 1000}
                                               : SplitSizes{1997, 665, 665};
    if (name == "pubmed") {
        if (regime == SplitRegime::kJk)
            throw std::invalid_argument("pubmed has no published JK split");
        return SplitSizes{18217, 500, 1000};
    }
    throw std::invalid_argument("no published split sizes for dataset '" + name + "'");
}

SplitSpec make_split_sized(const GraphDataset& ds, const SplitSizes& sizes,
                           SplitRegime regime, std::uint64_t seed) {
    const std::size_t total = sizes.n_train + sizes.n_val + sizes.n_test;
    if (sizes.n_train == 0 || sizes.n_val == 0 || sizes.n_test == 0)
        throw std::invalid_argument("make_split_sized: all split parts must be nonempty");
    if (total > ds.n_nodes)
        throw std::invalid_argument("make_split_sized: requested sizes exceed n_nodes");

    std::vector<Index> perm(ds.n_nodes);
    for (Index i = 0; i < ds.n_nodes; ++i) perm[i] = i;
    Rng rng(seed);
    for (Index i = 0; i + 1 < ds.n_nodes; ++i) {
        const Index pick = i + rng.next_index(ds.n_nodes - i);
        std::swap(perm[i], perm[pick]);
    }

    SplitSpec split;
    split.regime = regime;
    split.train_idx.assign(perm.begin(), perm.begin() + sizes.n_train);
    split.val_idx.assign(perm.begin() + sizes.n_train, perm.begin() + sizes.n_train + sizes.n_val);
    split.test_idx.assign(perm.begin() + sizes.n_train + sizes.n_val, perm.begin() + total);
    std::sort(split.train_idx.begin(), split.train_idx.end());
    std::sort(split.val_idx.begin(), split.val_idx.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
    validate_split(ds, split);
    return split;
}

SplitSpec make_split(const GraphDataset& ds, const std::filesystem::path& dir,
                     SplitRegime regime, std::uint64_t seed) {
    const auto split_path = dir / ("split." + to_string(regime) + ".json");
    if (std::filesystem::exists(split_path)) {
        const json j = read_json_file(split_path);
        SplitSpec split;
        split.regime = regime;
        split.loaded_from_file = true;
        split.train_idx = j.at("train").get<std::vector<Index>>();
        split.val_idx = j.at("val").get<std::vector<Index>>();
        split.test_idx = j.at("test").get<std::vector<Index>>();
        validate_split(ds, split);
        return split;
    }

    const SplitSpec split = make_split_sized(ds, published_split_sizes(ds.name, regime),
                                             regime, seed);
    std::ofstream out(split_path);
    if (out) {
        json j;
        j["train"] = split.train_idx;
        j["val"] = split.val_idx;
        j["test"] = split.test_idx;
        j["seed"] = seed;
        j["note"] = "seeded random split of the published sizes (no fixed index file shipped)";
        out << j.dump() << "\n";
    } else {
        std::fprintf(stderr, "[dataset] warning: could not persist %s\n",
                     split_path.string().c_str());
    }
    return split;
}

void validate_split(const GraphDataset& ds, const SplitSpec& split) {
    if (split.train_idx.empty() || split.val_idx.empty() || split.test_idx.empty())
        throw std::invalid_argument("split: all parts must be nonempty");
    std::vector<char> seen(ds.n_nodes, 0);
    for (const auto* part : {&split.train_idx, &split.val_idx, &split.test_idx}) {
        for (Index i : *part) {
            if (i >= ds.n_nodes) throw std::out_of_range("split: node index out of range");
            if (seen[i]) throw std::invalid_argument("split: parts are not disjoint");
            seen[i] = 1;
        }
    }
}

DenseMatrix row_normalize_features(const DenseMatrix& x) {
    DenseMatrix out = x;
    for (Index i = 0; i < x.n_rows; ++i) {
        double sum = 0.0;
        const double* xi = x.row(i);
        for (Index j = 0; j < x.n_cols; ++j) sum += xi[j];
        if (sum == 0.0) continue;
        double* oi = out.row(i);
        for (Index j = 0; j < x.n_cols; ++j) oi[j] /= sum;
    }
    return out;
}

}  // namespace kernode
