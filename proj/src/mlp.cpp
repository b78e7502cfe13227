#include "coolseq/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace coolseq {

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw InvalidParameterError("Mlp: need at least input and output layer");
    for (std::size_t s : sizes_)
        if (s == 0) throw InvalidParameterError("Mlp: zero-width layer");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(total);
        total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    }
    params_.assign(total, 0.0);
}

void Mlp::set_params(std::span<const double> p) {
    if (p.size() != params_.size()) throw InvalidParameterError("Mlp::set_params: size mismatch");
    std::copy(p.begin(), p.end(), params_.begin());
}

void Mlp::init_random(Rng& rng) {
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const std::size_t fan_in = sizes_[l], fan_out = sizes_[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        double* w = params_.data() + offsets_[l];
        for (std::size_t i = 0; i < fan_out * fan_in; ++i) w[i] = rng.uniform(-bound, bound);
        for (std::size_t i = 0; i < fan_out; ++i) w[fan_out * fan_in + i] = 0.0;
    }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
    Cache cache;
    return forward(x, cache);
}

std::vector<double> Mlp::forward(std::span<const double> x, Cache& cache) const {
    if (x.size() != sizes_.front())
        throw InvalidParameterError("Mlp::forward: input size " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(sizes_.front()));
    cache.post.resize(sizes_.size() - 1);
    std::span<const double> in = x;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const std::size_t n_in = sizes_[l], n_out = sizes_[l + 1];
        const double* w = params_.data() + offsets_[l];
        const double* b = w + n_out * n_in;
        auto& out = cache.post[l];
        out.assign(n_out, 0.0);
        const bool last = (l + 2 == sizes_.size());
        for (std::size_t j = 0; j < n_out; ++j) {
            double z = b[j];
            const double* wj = w + j * n_in;
            for (std::size_t i = 0; i < n_in; ++i) z += wj[i] * in[i];
            out[j] = last ? z : std::tanh(z);
        }
        in = out;
    }
    return cache.post.back();
}

void Mlp::backward(std::span<const double> x, const Cache& cache,
                   std::span<const double> dloss_dout, std::span<double> grad) const {
    if (grad.size() != params_.size()) throw InvalidParameterError("Mlp::backward: grad size");
    if (dloss_dout.size() != sizes_.back())
        throw InvalidParameterError("Mlp::backward: output gradient size");

    std::vector<double> delta(dloss_dout.begin(), dloss_dout.end());
    for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
        const std::size_t n_in = sizes_[l], n_out = sizes_[l + 1];
        const double* w = params_.data() + offsets_[l];
        const bool last = (l + 2 == sizes_.size());
        // delta currently holds dL/dz of layer l's output; for hidden layers
        // fold in the tanh derivative using the cached activation.
        if (!last) {
            const auto& a = cache.post[l];
            for (std::size_t j = 0; j < n_out; ++j) delta[j] *= 1.0 - a[j] * a[j];
        }
        std::span<const double> in = l == 0 ? x : std::span<const double>(cache.post[l - 1]);
        double* gw = grad.data() + offsets_[l];
        double* gb = gw + n_out * n_in;
        for (std::size_t j = 0; j < n_out; ++j) {
            const double d = delta[j];
            double* gwj = gw + j * n_in;
            for (std::size_t i = 0; i < n_in; ++i) gwj[i] += d * in[i];
            gb[j] += d;
        }
        if (l == 0) break;
        std::vector<double> prev(n_in, 0.0);
        for (std::size_t j = 0; j < n_out; ++j) {
            const double d = delta[j];
            const double* wj = w + j * n_in;
            for (std::size_t i = 0; i < n_in; ++i) prev[i] += wj[i] * d;
        }
        delta = std::move(prev);
    }
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    const double peak = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double& v : out) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : out) v /= total;
    return out;
}

AdamOptimizer::AdamOptimizer(std::size_t n_params, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(n_params, 0.0),
      v_(n_params, 0.0) {}

void AdamOptimizer::reset() {
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
    t_ = 0;
}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw InvalidParameterError("AdamOptimizer::step: size mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
}

}  // namespace coolseq
