#pragma once

#include <span>
#include <vector>

#include "kernode/csr.hpp"
#include "kernode/dense.hpp"
#include "kernode/kernel.hpp"

namespace kernode {

// Assigns each test row the class with the highest mean kernel similarity to
// that class's training rows. Ties resolve to the smallest class index. The
// caller passes embeddings already prepared for the variant's kernel
// (norm-ball normalized for the dot kernel).
std::vector<int> nearest_centroid_predict(const DenseMatrix& z_train,
                                          const std::vector<int>& y_train,
                                          const DenseMatrix& z_test,
                                          const BaseKernel& kernel, int n_classes);

// Row argmax of the logits (softmax is monotone). Ties resolve to the
// smallest class index.
std::vector<int> softmax_predict(const DenseMatrix& logits);

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                std::span<const Index> idx);

// Mann-Whitney AUC with midrank tie handling.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Area under the precision-recall curve, step interpolation over distinct
// score thresholds.
double average_precision(std::span<const double> scores, std::span<const int> labels);

}  // namespace kernode
