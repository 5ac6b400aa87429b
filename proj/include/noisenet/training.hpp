#pragma once

#include <cstdint>
#include <vector>

#include "noisenet/dataset.hpp"
#include "noisenet/network.hpp"

namespace noisenet {

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t shuffle_seed = 1;
    std::uint64_t init_seed = 1;
    unsigned workers = 0;   // 0 = hardware concurrency
    bool verbose = false;   // one key=value line per epoch on stderr

    void validate() const;
};

struct TrainReport {
    std::vector<double> epoch_loss;  // mean batch loss per epoch
    double train_accuracy = 0.0;     // percent
    double test_accuracy = 0.0;      // percent
};

// Glorot-uniform initialization: entries of W^n uniform in
// +-sqrt(6 / (N_{n-1} + N_n)), deterministic per seed.
DenseNetwork init_weights(const NetworkTopology& topology, std::uint64_t seed);

// Mean categorical cross-entropy over the batch plus its gradient w.r.t.
// every weight matrix.  `labels` are class indices; the one-hot encoding is
// implicit.  `grads` is resized/zeroed to mirror the weight shapes.
double loss_and_gradients(const DenseNetwork& net,
                          const std::vector<std::vector<double>>& inputs,
                          const std::vector<int>& labels,
                          std::vector<Matrix>& grads, unsigned workers = 1);

struct AdamState {
    std::vector<Matrix> m;  // first moments
    std::vector<Matrix> v;  // second moments
    std::uint64_t step = 0;

    static AdamState for_network(const DenseNetwork& net);
};

void adam_step(DenseNetwork& net, const std::vector<Matrix>& grads,
               AdamState& state, const TrainConfig& cfg);

// Minibatch training with per-epoch Fisher-Yates shuffling; noise-free.
TrainReport train(DenseNetwork& net, const LabeledDataset& train_ds,
                  const LabeledDataset& test_ds, const TrainConfig& cfg);

}  // namespace noisenet
