#include "kernode/tensor_grad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kernode/rng.hpp"

namespace kernode {

DenseMatrix AffineOp::forward(const DenseMatrix& x, ParamTensor& w, ParamTensor& b) {
    if (x.n_cols != w.value.n_rows)
        throw std::invalid_argument("AffineOp: x/w shape mismatch");
    if (b.value.n_rows != 1 || b.value.n_cols != w.value.n_cols)
        throw std::invalid_argument("AffineOp: bias must be 1 x out_dim");
    x_ = x;
    w_ = &w;
    b_ = &b;
    ran_forward_ = true;
    DenseMatrix y = matmul(x, w.value);
    for (Index i = 0; i < y.n_rows; ++i) {
        double* yi = y.row(i);
        for (Index j = 0; j < y.n_cols; ++j) yi[j] += b.value.at(0, j);
    }
    return y;
}

DenseMatrix AffineOp::backward(const DenseMatrix& upstream) {
    if (!ran_forward_) throw std::logic_error("AffineOp: backward before forward");
    if (upstream.n_rows != x_.n_rows || upstream.n_cols != w_->value.n_cols)
        throw std::invalid_argument("AffineOp: upstream shape mismatch");
    // dW += x^T * upstream, accumulated without materializing x^T.
    for (Index i = 0; i < x_.n_rows; ++i) {
        const double* xi = x_.row(i);
        const double* ui = upstream.row(i);
        for (Index k = 0; k < x_.n_cols; ++k) {
            const double xv = xi[k];
            if (xv == 0.0) continue;
            double* gk = w_->grad.row(k);
            for (Index j = 0; j < upstream.n_cols; ++j) gk[j] += xv * ui[j];
        }
    }
    for (Index i = 0; i < upstream.n_rows; ++i) {
        const double* ui = upstream.row(i);
        for (Index j = 0; j < upstream.n_cols; ++j) b_->grad.at(0, j) += ui[j];
    }
    // dx = upstream * w^T
    DenseMatrix dx(x_.n_rows, x_.n_cols);
    for (Index i = 0; i < upstream.n_rows; ++i) {
        const double* ui = upstream.row(i);
        double* di = dx.row(i);
        for (Index j = 0; j < upstream.n_cols; ++j) {
            const double uv = ui[j];
            if (uv == 0.0) continue;
            for (Index k = 0; k < x_.n_cols; ++k) di[k] += uv * w_->value.at(k, j);
        }
    }
    return dx;
}

DenseMatrix SparseAffineOp::forward(const CsrMatrix& x, ParamTensor& w, ParamTensor& b) {
    if (x.n_cols != w.value.n_rows)
        throw std::invalid_argument("SparseAffineOp: x/w shape mismatch");
    if (b.value.n_rows != 1 || b.value.n_cols != w.value.n_cols)
        throw std::invalid_argument("SparseAffineOp: bias must be 1 x out_dim");
    x_ = &x;
    w_ = &w;
    b_ = &b;
    const Index out = w.value.n_cols;
    DenseMatrix y(x.n_rows, out);
    for (Index i = 0; i < x.n_rows; ++i) {
        double* yi = y.row(i);
        for (Index k = x.row_ptr[i]; k < x.row_ptr[i + 1]; ++k) {
            const double v = x.values[k];
            const double* wr = w.value.row(x.col_idx[k]);
            for (Index j = 0; j < out; ++j) yi[j] += v * wr[j];
        }
        for (Index j = 0; j < out; ++j) yi[j] += b.value.at(0, j);
    }
    return y;
}

void SparseAffineOp::backward(const DenseMatrix& upstream) {
    if (x_ == nullptr) throw std::logic_error("SparseAffineOp: backward before forward");
    if (upstream.n_rows != x_->n_rows || upstream.n_cols != w_->value.n_cols)
        throw std::invalid_argument("SparseAffineOp: upstream shape mismatch");
    for (Index i = 0; i < x_->n_rows; ++i) {
        const double* ui = upstream.row(i);
        for (Index k = x_->row_ptr[i]; k < x_->row_ptr[i + 1]; ++k) {
            const double v = x_->values[k];
            double* gr = w_->grad.row(x_->col_idx[k]);
            for (Index j = 0; j < upstream.n_cols; ++j) gr[j] += v * ui[j];
        }
        for (Index j = 0; j < upstream.n_cols; ++j) b_->grad.at(0, j) += ui[j];
    }
}

DenseMatrix ReluOp::forward(const DenseMatrix& x) {
    rows_ = x.n_rows;
    cols_ = x.n_cols;
    active_.assign(x.size(), false);
    ran_forward_ = true;
    DenseMatrix y(x.n_rows, x.n_cols);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.data[i] > 0.0) {
            y.data[i] = x.data[i];
            active_[i] = true;
        }
    }
    return y;
}

DenseMatrix ReluOp::backward(const DenseMatrix& upstream) {
    if (!ran_forward_) throw std::logic_error("ReluOp: backward before forward");
    if (upstream.n_rows != rows_ || upstream.n_cols != cols_)
        throw std::invalid_argument("ReluOp: upstream shape mismatch");
    DenseMatrix dx(rows_, cols_);
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (active_[i]) dx.data[i] = upstream.data[i];
    return dx;
}

DenseMatrix RowL2NormalizeOp::forward(const DenseMatrix& x) {
    y_ = DenseMatrix(x.n_rows, x.n_cols);
    norms_.resize(x.n_rows);
    ran_forward_ = true;
    for (Index i = 0; i < x.n_rows; ++i) {
        const double* xi = x.row(i);
        double s = 0.0;
        for (Index j = 0; j < x.n_cols; ++j) s += xi[j] * xi[j];
        const double norm = std::sqrt(s);
        if (norm < eps_)
            throw std::domain_error("RowL2NormalizeOp: degenerate (near-zero) embedding row");
        norms_[i] = norm;
        double* yi = y_.row(i);
        for (Index j = 0; j < x.n_cols; ++j) yi[j] = xi[j] / norm;
    }
    return y_;
}

DenseMatrix RowL2NormalizeOp::backward(const DenseMatrix& upstream) {
    if (!ran_forward_) throw std::logic_error("RowL2NormalizeOp: backward before forward");
    if (!upstream.same_shape(y_))
        throw std::invalid_argument("RowL2NormalizeOp: upstream shape mismatch");
    DenseMatrix dx(y_.n_rows, y_.n_cols);
    for (Index i = 0; i < y_.n_rows; ++i) {
        const double* ui = upstream.row(i);
        const double* yi = y_.row(i);
        double dot = 0.0;
        for (Index j = 0; j < y_.n_cols; ++j) dot += ui[j] * yi[j];
        double* di = dx.row(i);
        for (Index j = 0; j < y_.n_cols; ++j) di[j] = (ui[j] - dot * yi[j]) / norms_[i];
    }
    return dx;
}

double SoftmaxXentOp::forward(const DenseMatrix& logits, const std::vector<int>& labels,
                              const std::vector<Index>& rows) {
    if (rows.empty()) throw std::invalid_argument("SoftmaxXentOp: empty index set");
    if (labels.size() != logits.n_rows)
        throw std::invalid_argument("SoftmaxXentOp: labels length mismatch");
    n_rows_ = logits.n_rows;
    n_cols_ = logits.n_cols;
    rows_ = rows;
    subset_labels_.resize(rows.size());
    probs_ = DenseMatrix(rows.size(), logits.n_cols);
    ran_forward_ = true;

    double loss = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Index i = rows[r];
        if (i >= logits.n_rows) throw std::out_of_range("SoftmaxXentOp: row index out of range");
        const int y = labels[i];
        if (y < 0 || static_cast<Index>(y) >= logits.n_cols)
            throw std::out_of_range("SoftmaxXentOp: label out of range");
        subset_labels_[r] = y;
        const double* li = logits.row(i);
        double mx = li[0];
        for (Index j = 1; j < logits.n_cols; ++j) mx = std::max(mx, li[j]);
        double sum = 0.0;
        for (Index j = 0; j < logits.n_cols; ++j) sum += std::exp(li[j] - mx);
        const double log_sum = std::log(sum);
        loss += -(li[y] - mx - log_sum);
        double* pr = probs_.row(r);
        for (Index j = 0; j < logits.n_cols; ++j) pr[j] = std::exp(li[j] - mx) / sum;
    }
    return loss / static_cast<double>(rows.size());
}

DenseMatrix SoftmaxXentOp::backward(double scale) {
    if (!ran_forward_) throw std::logic_error("SoftmaxXentOp: backward before forward");
    DenseMatrix dlogits(n_rows_, n_cols_);
    const double inv_n = scale / static_cast<double>(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const double* pr = probs_.row(r);
        double* di = dlogits.row(rows_[r]);
        for (Index j = 0; j < n_cols_; ++j) di[j] = pr[j] * inv_n;
        di[subset_labels_[r]] -= inv_n;
    }
    return dlogits;
}

Adam::Adam(std::vector<ParamTensor*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const ParamTensor* p : params_) {
        m_.emplace_back(p->value.n_rows, p->value.n_cols);
        v_.emplace_back(p->value.n_rows, p->value.n_cols);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params_.size(); ++p) {
        ParamTensor& param = *params_[p];
        if (!all_finite(param.grad))
            throw std::runtime_error("Adam: non-finite gradient in parameter '" + param.name + "'");
        double* m = m_[p].data.data();
        double* v = v_[p].data.data();
        double* val = param.value.data.data();
        const double* g = param.grad.data.data();
        for (std::size_t i = 0; i < param.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            val[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
        }
        param.zero_grad();
    }
}

FiniteDiffReport finite_diff_check(const std::function<double()>& loss_fn,
                                   const std::vector<ParamTensor*>& params,
                                   double step, std::size_t coords_per_param,
                                   std::uint64_t seed, double denom_floor) {
    FiniteDiffReport report;
    loss_fn();
    std::vector<DenseMatrix> analytic;
    analytic.reserve(params.size());
    for (const ParamTensor* p : params) analytic.push_back(p->grad);

    Rng rng(seed);
    for (std::size_t p = 0; p < params.size(); ++p) {
        ParamTensor& param = *params[p];
        const std::size_t n = param.size();
        std::vector<Index> coords;
        if (n <= coords_per_param) {
            coords.resize(n);
            for (Index i = 0; i < n; ++i) coords[i] = i;
        } else {
            // sample without replacement
            std::vector<Index> pool(n);
            for (Index i = 0; i < n; ++i) pool[i] = i;
            for (std::size_t c = 0; c < coords_per_param; ++c) {
                const Index pick = c + rng.next_index(n - c);
                std::swap(pool[c], pool[pick]);
                coords.push_back(pool[c]);
            }
        }
        for (Index idx : coords) {
            const double saved = param.value.data[idx];
            param.value.data[idx] = saved + step;
            const double loss_plus = loss_fn();
            param.value.data[idx] = saved - step;
            const double loss_minus = loss_fn();
            param.value.data[idx] = saved;
            const double numeric = (loss_plus - loss_minus) / (2.0 * step);
            const double a = analytic[p].data[idx];
            const double denom = std::max({std::fabs(a), std::fabs(numeric), denom_floor});
            const double rel = std::fabs(a - numeric) / denom;
            ++report.coords_checked;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = param.name;
                report.worst_index = idx;
                report.worst_analytic = a;
                report.worst_numeric = numeric;
            }
        }
    }
    // Leave gradients consistent with the unperturbed parameters.
    loss_fn();
    return report;
}

}  // namespace kernode
