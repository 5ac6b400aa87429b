#pragma once

#include <cstdint>
#include <vector>

#include "noisenet/noise.hpp"

namespace noisenet {

// Redundancy transform: each neuron of a pooled layer is replaced by
// `copies` identical neurons receiving the same input; the next weight
// matrix averages their (independently noisy) outputs.
struct PoolSpec {
    std::size_t copies = 1;
    std::vector<int> layers;  // 1-based hidden layer numbers

    void validate(const NetworkTopology& topology) const;
};

// Pure transform.  For each pooled layer: the incoming matrix gets every
// column replicated `copies` times (identical input per copy); the outgoing
// matrix gets every row replicated `copies` times with entries divided by
// `copies`, so the downstream sum reproduces the group average.  copies == 1
// returns the network unchanged, bitwise.
DenseNetwork apply_pooling(const DenseNetwork& net, const PoolSpec& spec);

// apply_pooling followed by evaluate_noisy on the widened network; each
// neuron copy draws its own noise.
NoisyAccuracy evaluate_pooled(const DenseNetwork& net, const LabeledDataset& ds,
                              const NoiseSpec& noise, const PoolSpec& pool,
                              std::size_t repetitions, std::uint64_t seed,
                              unsigned workers = 0);

}  // namespace noisenet
