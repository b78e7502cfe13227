#include <doctest.h>

#include <cmath>
#include <vector>

#include "coolseq/mlp.hpp"

using namespace coolseq;

namespace {

// scalar test loss: L = sum_k c_k * y_k for a fixed random c
double loss_of(const Mlp& net, std::span<const double> x, const std::vector<double>& c) {
    const std::vector<double> y = net.forward(x);
    double loss = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) loss += c[k] * y[k];
    return loss;
}

}  // namespace

TEST_CASE("forward shapes and determinism of init") {
    Rng rng_a(42), rng_b(42);
    Mlp a({6, 12, 3});
    Mlp b({6, 12, 3});
    a.init_random(rng_a);
    b.init_random(rng_b);
    REQUIRE(a.param_count() == b.param_count());
    for (std::size_t i = 0; i < a.param_count(); ++i) CHECK(a.params()[i] == b.params()[i]);
    const std::vector<double> x = {0.1, -0.2, 0.3, 0.0, 0.5, -0.7};
    const std::vector<double> ya = a.forward(x);
    CHECK(ya.size() == 3);
    CHECK(ya == b.forward(x));
    CHECK_THROWS_AS(a.forward(std::vector<double>{1.0}), InvalidParameterError);
    CHECK_THROWS_AS(Mlp({4}), InvalidParameterError);
    CHECK_THROWS_AS(Mlp({4, 0, 2}), InvalidParameterError);
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(99);
    Mlp net({8, 16, 16, 2});
    net.init_random(rng);
    std::vector<double> x(8);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const std::vector<double> c = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

    Mlp::Cache cache;
    net.forward(x, cache);
    std::vector<double> grad(net.param_count(), 0.0);
    net.backward(x, cache, c, grad);

    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < net.param_count(); ++i) {
        const double original = net.params()[i];
        net.params()[i] = original + h;
        const double up = loss_of(net, x, c);
        net.params()[i] = original - h;
        const double down = loss_of(net, x, c);
        net.params()[i] = original;
        const double fd = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
        worst = std::max(worst, std::abs(fd - grad[i]) / scale);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("backward accumulates into the gradient buffer") {
    Rng rng(3);
    Mlp net({3, 5, 1});
    net.init_random(rng);
    const std::vector<double> x = {0.2, -0.4, 0.9};
    Mlp::Cache cache;
    net.forward(x, cache);
    std::vector<double> grad(net.param_count(), 0.0);
    const std::vector<double> d = {1.0};
    net.backward(x, cache, d, grad);
    std::vector<double> twice(net.param_count(), 0.0);
    net.backward(x, cache, d, twice);
    net.backward(x, cache, d, twice);
    for (std::size_t i = 0; i < grad.size(); ++i)
        CHECK(twice[i] == doctest::Approx(2.0 * grad[i]).epsilon(1e-12));
}

TEST_CASE("softmax is a valid distribution and shift invariant") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> logits(4);
        for (double& v : logits) v = rng.uniform(-30.0, 30.0);
        const std::vector<double> p = softmax(logits);
        double total = 0.0;
        for (double v : p) {
            CHECK(v > 0.0);
            total += v;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
        std::vector<double> shifted = logits;
        for (double& v : shifted) v += 123.0;
        const std::vector<double> q = softmax(shifted);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-12));
    }
}

TEST_CASE("adam converges on a quadratic") {
    std::vector<double> value = {0.0};
    std::vector<double> grad(1);
    AdamOptimizer opt(1, 0.1);
    for (int step = 0; step < 1000; ++step) {
        grad[0] = 2.0 * (value[0] - 3.0);
        opt.step(value, grad);
    }
    CHECK(value[0] == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("param round trip") {
    Rng rng(8);
    Mlp net({4, 6, 2});
    net.init_random(rng);
    const std::vector<double> snapshot(net.params().begin(), net.params().end());
    Mlp other({4, 6, 2});
    other.set_params(snapshot);
    const std::vector<double> x = {0.3, 0.1, -0.2, 0.8};
    CHECK(net.forward(x) == other.forward(x));
    CHECK_THROWS_AS(other.set_params(std::vector<double>{1.0}), InvalidParameterError);
}
