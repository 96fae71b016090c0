#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kernode/csr.hpp"
#include "kernode/dense.hpp"

namespace kernode {

// A learnable tensor: value plus a same-shaped gradient accumulator.
struct ParamTensor {
    DenseMatrix value;
    DenseMatrix grad;
    std::string name;

    ParamTensor() = default;
    ParamTensor(DenseMatrix v, std::string n)
        : value(std::move(v)), grad(value.n_rows, value.n_cols), name(std::move(n)) {}

    void zero_grad() { grad.fill(0.0); }
    std::size_t size() const { return value.size(); }
};

// y = x * w + b (b broadcast over rows). Caches the input for backward;
// backward accumulates into w.grad / b.grad and returns the input gradient.
class AffineOp {
  public:
    DenseMatrix forward(const DenseMatrix& x, ParamTensor& w, ParamTensor& b);
    DenseMatrix backward(const DenseMatrix& upstream);

  private:
    DenseMatrix x_;
    ParamTensor* w_ = nullptr;
    ParamTensor* b_ = nullptr;
    bool ran_forward_ = false;
};

// Affine with a CSR input (used for the bag-of-words input layer). The input
// gradient is never needed there, so backward only accumulates parameter
// gradients. The caller keeps x alive between forward and backward.
class SparseAffineOp {
  public:
    DenseMatrix forward(const CsrMatrix& x, ParamTensor& w, ParamTensor& b);
    void backward(const DenseMatrix& upstream);

  private:
    const CsrMatrix* x_ = nullptr;
    ParamTensor* w_ = nullptr;
    ParamTensor* b_ = nullptr;
};

// Elementwise max(0, x); subgradient at 0 is 0.
class ReluOp {
  public:
    DenseMatrix forward(const DenseMatrix& x);
    DenseMatrix backward(const DenseMatrix& upstream);

  private:
    std::vector<bool> active_;
    std::size_t rows_ = 0, cols_ = 0;
    bool ran_forward_ = false;
};

// Scales every row to unit L2 norm. Rows with norm below eps signal a
// degenerate embedding and throw.
class RowL2NormalizeOp {
  public:
    explicit RowL2NormalizeOp(double eps = 1e-12) : eps_(eps) {}
    DenseMatrix forward(const DenseMatrix& x);
    DenseMatrix backward(const DenseMatrix& upstream);

  private:
    DenseMatrix y_;
    std::vector<double> norms_;
    double eps_;
    bool ran_forward_ = false;
};

// Mean cross entropy of softmax(logits) against integer labels over a row
// subset. backward() returns the logits gradient, zero outside the subset.
class SoftmaxXentOp {
  public:
    double forward(const DenseMatrix& logits, const std::vector<int>& labels,
                   const std::vector<Index>& rows);
    DenseMatrix backward(double scale = 1.0);

  private:
    DenseMatrix probs_;  // softmax rows for the subset, in subset order
    std::vector<Index> rows_;
    std::vector<int> subset_labels_;
    std::size_t n_rows_ = 0, n_cols_ = 0;
    bool ran_forward_ = false;
};

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. step() applies the update,
// advances the counter and zeroes gradients; non-finite gradients abort.
class Adam {
  public:
    Adam(std::vector<ParamTensor*> params, AdamConfig cfg);
    void step();
    std::size_t step_count() const { return t_; }

  private:
    std::vector<ParamTensor*> params_;
    std::vector<DenseMatrix> m_, v_;
    AdamConfig cfg_;
    std::size_t t_ = 0;
};

struct FiniteDiffReport {
    double max_rel_error = 0.0;
    std::size_t coords_checked = 0;
    std::string worst_param;
    Index worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;

    bool passed(double tol) const { return max_rel_error < tol; }
};

// Central-difference gradient verification. loss_fn must be deterministic,
// zero the gradients, recompute the loss from current parameter values and
// fill the gradients. Checks coords_per_param sampled coordinates per
// parameter (all of them when the parameter is smaller). Relative error uses
// max(|analytic|, |numeric|, denom_floor) as the denominator.
FiniteDiffReport finite_diff_check(const std::function<double()>& loss_fn,
                                   const std::vector<ParamTensor*>& params,
                                   double step = 1e-5,
                                   std::size_t coords_per_param = 50,
                                   std::uint64_t seed = 1234,
                                   double denom_floor = 1e-5);

}  // namespace kernode
