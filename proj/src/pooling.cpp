#include "noisenet/pooling.hpp"

#include <algorithm>

#include "noisenet/errors.hpp"

namespace noisenet {

void PoolSpec::validate(const NetworkTopology& topology) const {
    if (copies < 1) throw SpecError("pool copies must be >= 1");
    for (int layer : layers)
        if (!topology.is_hidden_layer(layer))
            throw SpecError("pool layer " + std::to_string(layer) +
                            " is not a hidden layer of " + topology.id());
    auto sorted = layers;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw SpecError("duplicate pool layer index");
}

namespace {

Matrix replicate_columns(const Matrix& w, std::size_t m) {
    Matrix out(w.rows, w.cols * m);
    for (std::size_t j = 0; j < w.rows; ++j) {
        const double* src = w.row(j);
        double* dst = out.row(j);
        for (std::size_t i = 0; i < w.cols; ++i)
            for (std::size_t c = 0; c < m; ++c) dst[i * m + c] = src[i];
    }
    return out;
}

Matrix replicate_rows_scaled(const Matrix& w, std::size_t m) {
    Matrix out(w.rows * m, w.cols);
    const double scale = 1.0 / double(m);
    for (std::size_t j = 0; j < w.rows; ++j) {
        const double* src = w.row(j);
        for (std::size_t c = 0; c < m; ++c) {
            double* dst = out.row(j * m + c);
            for (std::size_t i = 0; i < w.cols; ++i) dst[i] = src[i] * scale;
        }
    }
    return out;
}

}  // namespace

DenseNetwork apply_pooling(const DenseNetwork& net, const PoolSpec& spec) {
    spec.validate(net.topology);
    if (spec.copies == 1 || spec.layers.empty()) return net;

    DenseNetwork out = net;
    for (int layer : spec.layers) {
        const std::size_t idx = std::size_t(layer) - 1;  // topology index
        out.topology.layer_sizes[idx] *= spec.copies;
        out.weights[idx - 1] = replicate_columns(out.weights[idx - 1], spec.copies);
        out.weights[idx] = replicate_rows_scaled(out.weights[idx], spec.copies);
    }
    out.validate();
    return out;
}

NoisyAccuracy evaluate_pooled(const DenseNetwork& net, const LabeledDataset& ds,
                              const NoiseSpec& noise, const PoolSpec& pool,
                              std::size_t repetitions, std::uint64_t seed,
                              unsigned workers) {
    noise.validate(net.topology);
    const DenseNetwork pooled = apply_pooling(net, pool);
    return evaluate_noisy(pooled, ds, noise, repetitions, seed, workers);
}

}  // namespace noisenet
