#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "noisenet/errors.hpp"
#include "noisenet/network.hpp"
#include "noisenet/training.hpp"

using namespace noisenet;

namespace {

DenseNetwork make_net(const std::vector<std::size_t>& sizes,
                      std::uint64_t seed) {
    return init_weights(NetworkTopology{sizes}, seed);
}

}  // namespace

TEST_CASE("sigmoid fixed points") {
    CHECK(sigmoid(std::vector<double>{0.0})[0] == 0.5);
    const auto v = sigmoid(std::vector<double>{-1e3, 1e3});
    CHECK(v[0] >= 0.0);
    CHECK(v[0] < 1e-300);
    CHECK(v[1] == 1.0);  // saturates exactly in double precision
    CHECK(sigmoid(std::vector<double>{std::log(3.0)})[0] ==
          doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("softmax uniform and closed-form cases") {
    for (double c : {-7.0, 0.0, 123.0}) {
        const auto v = softmax(std::vector<double>{c, c, c});
        for (double p : v) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    const auto v = softmax(std::vector<double>{0.0, std::log(3.0)});
    CHECK(v[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("softmax normalizes and preserves argmax on random vectors") {
    GaussianSource rng(11);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> v(1 + rng.next_u64() % 10);
        for (auto& x : v) x = 10.0 * rng.next();
        const auto p = softmax(v);
        double sum = 0.0;
        for (double q : p) sum += q;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(argmax_lowest(p) == argmax_lowest(v));
    }
}

TEST_CASE("forward_clean zero-weight network") {
    DenseNetwork net;
    net.topology.layer_sizes = {5, 4, 10};
    net.weights = {Matrix(5, 4), Matrix(4, 10)};
    const auto tr = forward_clean(net, std::vector<double>{1, 0, 1, 0, 1});
    for (double a : tr.activations[1]) CHECK(a == 0.5);
    for (double p : tr.output()) CHECK(p == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("forward_clean 1-1-1 hand computation") {
    DenseNetwork net;
    net.topology.layer_sizes = {1, 1, 1};
    net.weights = {Matrix(1, 1, 1.0), Matrix(1, 1, 1.0)};
    const auto tr = forward_clean(net, std::vector<double>{0.0});
    CHECK(tr.activations[1][0] == 0.5);
    CHECK(tr.output()[0] == 1.0);  // softmax of a singleton
}

TEST_CASE("forward_clean shape error") {
    auto net = make_net({4, 3, 2}, 1);
    CHECK_THROWS_AS(forward_clean(net, std::vector<double>{1.0, 2.0}),
                    ShapeError);
}

TEST_CASE("predict argmax and tie-breaking") {
    CHECK(argmax_lowest(std::vector<double>{0.1, 0.8, 0.1}) == 1);
    CHECK(argmax_lowest(std::vector<double>{0.5, 0.5}) == 0);
}

TEST_CASE("forward_clean determinism and activation range") {
    auto net = make_net({6, 5, 4, 3}, 3);
    GaussianSource rng(4);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(6);
        for (auto& v : x) v = rng.next();
        const auto a = forward_clean(net, x);
        const auto b = forward_clean(net, x);
        CHECK(a.activations == b.activations);
        CHECK(a.preactivations == b.preactivations);
        for (std::size_t layer = 1; layer + 1 < a.activations.size(); ++layer)
            for (double v : a.activations[layer]) {
                CHECK(v > 0.0);
                CHECK(v < 1.0);
            }
        double sum = 0.0;
        for (double p : a.output()) sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("model checkpoint round trip is bitwise") {
    namespace fs = std::filesystem;
    const auto path =
        (fs::temp_directory_path() / "noisenet_model_test.bin").string();
    auto net = make_net({7, 5, 3}, 99);
    save_model(net, path);
    const auto back = load_model(path);
    CHECK(back.topology.layer_sizes == net.topology.layer_sizes);
    for (std::size_t k = 0; k < net.weights.size(); ++k)
        CHECK(back.weights[k].data == net.weights[k].data);

    // Flip one payload byte: checksum must catch it.
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(30);
        f.put(char(0x5a));
    }
    CHECK_THROWS_AS(load_model(path), FormatError);
    fs::remove(path);
}

TEST_CASE("load_model rejects non-checkpoint files") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "not_a_model.bin").string();
    std::ofstream(path) << "hello world, definitely not a checkpoint";
    CHECK_THROWS_AS(load_model(path), FormatError);
    fs::remove(path);
    CHECK_THROWS_AS(load_model(path), IoError);
}

TEST_CASE("parse_topology accepts comma and dash lists") {
    CHECK(parse_topology("784,20,10").id() == "784-20-10");
    CHECK(parse_topology("784-20-10").id() == "784-20-10");
    CHECK_THROWS_AS(parse_topology("784"), SpecError);
    CHECK_THROWS_AS(parse_topology("a,b"), SpecError);
}
