#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coolseq/rng.hpp"

namespace coolseq {

/// Plain fully connected network with tanh hidden units and a linear output
/// layer, storing all weights in one flat buffer so the optimizer and the
/// finite-difference checks can treat parameters uniformly.
class Mlp {
  public:
    /// layer_sizes = {inputs, hidden..., outputs}
    explicit Mlp(std::vector<std::size_t> layer_sizes);

    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t param_count() const { return params_.size(); }
    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    void set_params(std::span<const double> p);

    /// Xavier-uniform init, deterministic under the caller's generator.
    void init_random(Rng& rng);

    /// Per-forward scratch; reusable across calls of matching shape.
    struct Cache {
        std::vector<std::vector<double>> post;  ///< post[l] = activations after layer l
    };

    std::vector<double> forward(std::span<const double> x) const;
    std::vector<double> forward(std::span<const double> x, Cache& cache) const;

    /// Accumulates dL/dparams into grad (layout of params()) given dL/doutput
    /// for the forward pass recorded in cache. The input x must be the same.
    void backward(std::span<const double> x, const Cache& cache,
                  std::span<const double> dloss_dout, std::span<double> grad) const;

  private:
    std::vector<std::size_t> sizes_;
    std::vector<double> params_;
    // offsets_[l]: start of layer l's weight block (out x in row-major, then bias)
    std::vector<std::size_t> offsets_;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Adam with bias correction; state lives with the optimizer.
class AdamOptimizer {
  public:
    AdamOptimizer(std::size_t n_params, double learning_rate = 3e-4, double beta1 = 0.9,
                  double beta2 = 0.999, double epsilon = 1e-8);

    void step(std::span<double> params, std::span<const double> grad);
    void reset();

  private:
    double lr_, beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    long t_ = 0;
};

}  // namespace coolseq
