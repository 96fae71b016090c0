#include "kernode/classify.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace kernode {

std::vector<int> nearest_centroid_predict(const DenseMatrix& z_train,
                                          const std::vector<int>& y_train,
                                          const DenseMatrix& z_test,
                                          const BaseKernel& kernel, int n_classes) {
    if (y_train.size() != z_train.n_rows)
        throw std::invalid_argument("nearest_centroid_predict: y_train size mismatch");
    if (z_train.n_cols != z_test.n_cols)
        throw std::invalid_argument("nearest_centroid_predict: embedding dim mismatch");
    if (n_classes <= 0) throw std::invalid_argument("nearest_centroid_predict: n_classes");

    std::vector<double> class_count(n_classes, 0.0);
    for (int y : y_train) {
        if (y < 0 || y >= n_classes)
            throw std::out_of_range("nearest_centroid_predict: label out of range");
        class_count[y] += 1.0;
    }
    for (int c = 0; c < n_classes; ++c)
        if (class_count[c] == 0.0)
            throw std::invalid_argument("nearest_centroid_predict: empty class in training set");

    std::vector<int> pred(z_test.n_rows);
    std::vector<double> sim(n_classes);
    for (Index u = 0; u < z_test.n_rows; ++u) {
        std::fill(sim.begin(), sim.end(), 0.0);
        std::span<const double> zu(z_test.row(u), z_test.n_cols);
        for (Index v = 0; v < z_train.n_rows; ++v)
            sim[y_train[v]] +=
                kernel_eval(kernel, zu, std::span<const double>(z_train.row(v), z_train.n_cols));
        int best = 0;
        double best_mu = sim[0] / class_count[0];
        for (int c = 1; c < n_classes; ++c) {
            const double mu = sim[c] / class_count[c];
            if (mu > best_mu) {
                best_mu = mu;
                best = c;
            }
        }
        pred[u] = best;
    }
    return pred;
}

std::vector<int> softmax_predict(const DenseMatrix& logits) {
    std::vector<int> pred(logits.n_rows);
    for (Index i = 0; i < logits.n_rows; ++i) {
        const double* li = logits.row(i);
        int best = 0;
        for (Index j = 1; j < logits.n_cols; ++j)
            if (li[j] > li[best]) best = static_cast<int>(j);
        pred[i] = best;
    }
    return pred;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                std::span<const Index> idx) {
    if (idx.empty()) throw std::invalid_argument("accuracy: empty index set");
    std::size_t correct = 0;
    for (Index i : idx) {
        if (i >= pred.size() || i >= truth.size())
            throw std::out_of_range("accuracy: index out of range");
        if (pred[i] == truth[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(idx.size());
}

namespace {

void require_both_classes(std::span<const int> labels, const char* who) {
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1)
            has_pos = true;
        else if (y == 0)
            has_neg = true;
        else
            throw std::invalid_argument(std::string(who) + ": labels must be 0/1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument(std::string(who) + ": need at least one of each class");
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_auc: size mismatch");
    require_both_classes(labels, "roc_auc");

    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tied score groups.
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }

    double pos_rank_sum = 0.0;
    double n_pos = 0.0, n_neg = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k] == 1) {
            pos_rank_sum += rank[k];
            n_pos += 1.0;
        } else {
            n_neg += 1.0;
        }
    }
    return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("average_precision: size mismatch");
    require_both_classes(labels, "average_precision");

    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double total_pos = 0.0;
    for (int y : labels) total_pos += y;

    double ap = 0.0;
    double tp = 0.0, seen = 0.0, prev_recall = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) {
            tp += labels[order[k]];
            seen += 1.0;
        }
        const double recall = tp / total_pos;
        const double precision = tp / seen;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    return ap;
}

}  // namespace kernode
