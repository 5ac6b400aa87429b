#pragma once

#include <span>
#include <string>
#include <vector>

#include "noisenet/dataset.hpp"
#include "noisenet/mathcore.hpp"

namespace noisenet {

// Layer sizes [N_1 ... N_L], input first.  Hidden layers use the logistic
// sigmoid, the output layer softmax; layer numbers are 1-based throughout to
// match the W^2..W^L naming of the weight matrices.
struct NetworkTopology {
    std::vector<std::size_t> layer_sizes;

    std::size_t num_layers() const { return layer_sizes.size(); }
    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    bool is_hidden_layer(int layer) const {
        return layer >= 2 && std::size_t(layer) < layer_sizes.size();
    }
    std::string id() const;  // e.g. "784-20-10"

    void validate() const;
};

NetworkTopology parse_topology(const std::string& dashed_or_comma_list);

// Bias-free dense network.  weights[k] is W^{k+2}, of shape
// layer_sizes[k] x layer_sizes[k+1].
struct DenseNetwork {
    NetworkTopology topology;
    std::vector<Matrix> weights;

    void validate() const;
};

// Per-layer preactivations and activations of one forward pass.  For the
// input layer both entries hold the input itself.
struct ForwardTrace {
    std::vector<std::vector<double>> preactivations;
    std::vector<std::vector<double>> activations;

    const std::vector<double>& output() const { return activations.back(); }
};

// Elementwise logistic sigmoid, sign-split so large |x| cannot overflow.
std::vector<double> sigmoid(std::span<const double> v);
void sigmoid_into(std::span<const double> v, std::span<double> out);

// Max-shifted softmax; output sums to 1 and preserves the input ordering.
std::vector<double> softmax(std::span<const double> v);
void softmax_into(std::span<const double> v, std::span<double> out);

ForwardTrace forward_clean(const DenseNetwork& net, std::span<const double> x);

// Argmax of the output activations, ties broken toward the lowest index.
std::size_t predict(const DenseNetwork& net, std::span<const double> x);
std::size_t argmax_lowest(std::span<const double> v);

// Fraction of correctly classified items, in percent.
double clean_accuracy(const DenseNetwork& net, const LabeledDataset& ds,
                      unsigned workers = 0);

// Checkpoint container: "NNET" magic, format version, layer sizes, row-major
// little-endian float64 weights, CRC-32 of the payload.
void save_model(const DenseNetwork& net, const std::string& path);
DenseNetwork load_model(const std::string& path);

}  // namespace noisenet
