#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noisenet/dataset.hpp"
#include "noisenet/errors.hpp"
#include "noisenet/training.hpp"

using namespace noisenet;

TEST_CASE("init_weights determinism and Glorot bound") {
    const NetworkTopology topo{{784, 20, 10}};
    const auto a = init_weights(topo, 42);
    const auto b = init_weights(topo, 42);
    for (std::size_t k = 0; k < a.weights.size(); ++k)
        CHECK(a.weights[k].data == b.weights[k].data);

    const double bound = std::sqrt(6.0 / (784.0 + 20.0));  // ~0.0864
    double sum = 0.0;
    for (double v : a.weights[0].data) {
        CHECK(std::abs(v) <= bound);
        sum += v;
    }
    CHECK(std::abs(sum / double(a.weights[0].data.size())) < 0.003);
}

TEST_CASE("loss of a near-perfect prediction is near zero") {
    DenseNetwork net;
    net.topology.layer_sizes = {1, 2};
    net.weights = {Matrix(1, 2)};
    net.weights[0].at(0, 0) = 50.0;
    net.weights[0].at(0, 1) = -50.0;
    std::vector<Matrix> grads;
    const double loss = loss_and_gradients(net, {{1.0}}, {0}, grads);
    CHECK(loss == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("uniform prediction over 10 classes costs ln 10") {
    DenseNetwork net;
    net.topology.layer_sizes = {4, 3, 10};
    net.weights = {Matrix(4, 3), Matrix(3, 10)};  // all-zero -> uniform output
    std::vector<Matrix> grads;
    const double loss =
        loss_and_gradients(net, {{0.1, 0.2, 0.3, 0.4}}, {6}, grads);
    CHECK(loss == doctest::Approx(std::log(10.0)).epsilon(1e-9));
}

TEST_CASE("analytic gradients match central finite differences") {
    const NetworkTopology topo{{4, 3, 2}};
    auto net = init_weights(topo, 7);
    const auto data = synthetic_dataset(3, 5, 4, 2);

    std::vector<Matrix> grads;
    loss_and_gradients(net, data.inputs, data.labels, grads);

    const double h = 1e-5;
    for (std::size_t k = 0; k < net.weights.size(); ++k) {
        for (std::size_t idx = 0; idx < net.weights[k].data.size(); ++idx) {
            auto perturbed = net;
            std::vector<Matrix> scratch;
            perturbed.weights[k].data[idx] += h;
            const double lp = loss_and_gradients(perturbed, data.inputs,
                                                 data.labels, scratch);
            perturbed.weights[k].data[idx] -= 2.0 * h;
            const double lm = loss_and_gradients(perturbed, data.inputs,
                                                 data.labels, scratch);
            const double fd = (lp - lm) / (2.0 * h);
            const double g = grads[k].data[idx];
            if (std::abs(g) < 1e-8)
                CHECK(std::abs(fd - g) < 1e-6);
            else
                CHECK(std::abs(fd - g) / std::abs(g) < 1e-6);
        }
    }
}

TEST_CASE("gradient check on random small nets") {
    GaussianSource pick(123);
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t in = 2 + pick.next_u64() % 3;
        const std::size_t hid = 2 + pick.next_u64() % 4;
        const std::size_t out = 2 + pick.next_u64() % 3;
        auto net = init_weights(NetworkTopology{{in, hid, out}},
                                1000 + std::uint64_t(trial));
        const auto data = synthetic_dataset(50 + std::uint64_t(trial), 4, in, out);

        std::vector<Matrix> grads;
        loss_and_gradients(net, data.inputs, data.labels, grads);
        const double h = 1e-5;
        for (std::size_t k = 0; k < net.weights.size(); ++k)
            for (std::size_t idx = 0; idx < net.weights[k].data.size(); ++idx) {
                auto perturbed = net;
                std::vector<Matrix> scratch;
                perturbed.weights[k].data[idx] += h;
                const double lp = loss_and_gradients(perturbed, data.inputs,
                                                     data.labels, scratch);
                perturbed.weights[k].data[idx] -= 2.0 * h;
                const double lm = loss_and_gradients(perturbed, data.inputs,
                                                     data.labels, scratch);
                const double fd = (lp - lm) / (2.0 * h);
                const double g = grads[k].data[idx];
                if (std::abs(g) < 1e-8)
                    CHECK(std::abs(fd - g) < 1e-6);
                else
                    CHECK(std::abs(fd - g) / std::abs(g) < 1e-6);
            }
    }
}

TEST_CASE("gradients identical for 1 and 8 workers") {
    auto net = init_weights(NetworkTopology{{6, 5, 3}}, 5);
    const auto data = synthetic_dataset(8, 64, 6, 3);
    std::vector<Matrix> g1, g8;
    const double l1 = loss_and_gradients(net, data.inputs, data.labels, g1, 1);
    const double l8 = loss_and_gradients(net, data.inputs, data.labels, g8, 8);
    CHECK(l1 == l8);
    for (std::size_t k = 0; k < g1.size(); ++k) CHECK(g1[k].data == g8[k].data);
}

TEST_CASE("adam zero gradient is a fixed point") {
    auto net = init_weights(NetworkTopology{{3, 2}}, 1);
    const auto before = net.weights[0].data;
    auto state = AdamState::for_network(net);
    std::vector<Matrix> zero = {Matrix(3, 2)};
    TrainConfig cfg;
    adam_step(net, zero, state, cfg);
    CHECK(net.weights[0].data == before);
}

TEST_CASE("first adam step moves each weight by about the learning rate") {
    auto net = init_weights(NetworkTopology{{3, 2}}, 2);
    const auto before = net.weights[0].data;
    auto state = AdamState::for_network(net);
    std::vector<Matrix> grads = {Matrix(3, 2)};
    GaussianSource rng(6);
    for (auto& g : grads[0].data) g = rng.next() * 10.0;
    TrainConfig cfg;
    adam_step(net, grads, state, cfg);
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double step = before[i] - net.weights[0].data[i];
        // Bias-corrected first step: m_hat/sqrt(v_hat) = sign(g).
        CHECK(step * grads[0].data[i] > 0.0);
        CHECK(std::abs(step) ==
              doctest::Approx(cfg.learning_rate).epsilon(1e-4));
    }
}

TEST_CASE("adam minimizes a 1-D quadratic") {
    // f(w) = (w - 3)^2, df/dw = 2(w - 3); network is a bare 1x1 weight slot.
    DenseNetwork net;
    net.topology.layer_sizes = {1, 1};
    net.weights = {Matrix(1, 1, 0.0)};
    auto state = AdamState::for_network(net);
    TrainConfig cfg;
    cfg.learning_rate = 0.2;
    std::vector<Matrix> grads = {Matrix(1, 1)};
    for (int step = 0; step < 300; ++step) {
        grads[0].data[0] = 2.0 * (net.weights[0].data[0] - 3.0);
        adam_step(net, grads, state, cfg);
    }
    CHECK(std::abs(net.weights[0].data[0] - 3.0) < 1e-2);
}

TEST_CASE("training separable blobs reaches 95% train accuracy") {
    const auto train_ds = synthetic_dataset(1, 600, 8, 3, "train");
    const auto test_ds = synthetic_dataset(2, 150, 8, 3, "test");
    auto net = init_weights(NetworkTopology{{8, 6, 3}}, 4);
    TrainConfig cfg;
    cfg.epochs = 50;
    const auto report = train(net, train_ds, test_ds, cfg);
    CHECK(report.train_accuracy >= 95.0);
}

TEST_CASE("training is reproducible") {
    const auto train_ds = synthetic_dataset(1, 300, 6, 3, "train");
    const auto test_ds = synthetic_dataset(2, 60, 6, 3, "test");
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.init_seed = 9;
    cfg.shuffle_seed = 10;

    auto net1 = init_weights(NetworkTopology{{6, 5, 3}}, cfg.init_seed);
    auto net2 = init_weights(NetworkTopology{{6, 5, 3}}, cfg.init_seed);
    const auto r1 = train(net1, train_ds, test_ds, cfg);
    const auto r2 = train(net2, train_ds, test_ds, cfg);
    CHECK(r1.epoch_loss == r2.epoch_loss);
    CHECK(r1.train_accuracy == r2.train_accuracy);
    CHECK(r1.test_accuracy == r2.test_accuracy);
    for (std::size_t k = 0; k < net1.weights.size(); ++k)
        CHECK(net1.weights[k].data == net2.weights[k].data);
}

TEST_CASE("loss decreases across most epochs") {
    const auto train_ds = synthetic_dataset(1, 600, 8, 4, "train");
    auto net = init_weights(NetworkTopology{{8, 6, 4}}, 4);
    TrainConfig cfg;
    cfg.epochs = 20;
    const auto report = train(net, train_ds, {}, cfg);
    int improving = 0;
    for (std::size_t e = 1; e < report.epoch_loss.size(); ++e)
        if (report.epoch_loss[e] <= report.epoch_loss[e - 1]) ++improving;
    CHECK(double(improving) >= 0.9 * double(report.epoch_loss.size() - 1));
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), SpecError);
    cfg = {};
    cfg.beta1 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), SpecError);
    auto empty_batch = [] {
        DenseNetwork net;
        net.topology.layer_sizes = {2, 2};
        net.weights = {Matrix(2, 2)};
        std::vector<Matrix> grads;
        loss_and_gradients(net, {}, {}, grads);
    };
    CHECK_THROWS_AS(empty_batch(), SpecError);
}
