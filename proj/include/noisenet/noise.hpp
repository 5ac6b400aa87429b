#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noisenet/dataset.hpp"
#include "noisenet/network.hpp"

namespace noisenet {

enum class NoiseStage { before, after };

std::string to_string(NoiseStage s);
NoiseStage parse_stage(const std::string& s);

// Internal Gaussian noise description.  The injected additive term is
// sqrt(2*D_A)*xi, the multiplicative factor (1 + sqrt(2*D_M)*xi), with xi
// standard normal and independent per neuron, layer, input and repetition.
struct NoiseSpec {
    double d_additive = 0.0;
    double d_multiplicative = 0.0;
    NoiseStage stage = NoiseStage::after;
    std::vector<int> target_layers;  // 1-based hidden layer numbers, 2..L-1

    bool is_zero() const { return d_additive == 0.0 && d_multiplicative == 0.0; }
    void validate(const NetworkTopology& topology) const;
};

// Noisy forward pass.  Draw order is fixed: layers ascending, neurons
// ascending, multiplicative before additive; draws whose intensity is zero
// are skipped entirely, so a zero spec consumes no randomness and reproduces
// forward_clean bitwise.
ForwardTrace forward_noisy(const DenseNetwork& net, std::span<const double> x,
                           const NoiseSpec& spec, GaussianSource& rng);

struct NoisyAccuracy {
    double mean = 0.0;    // percent
    double stddev = 0.0;  // sample std over repetitions (0 for one rep)
    std::vector<double> per_repetition;
};

// Classifies the full dataset `repetitions` times with fresh noise.  Each
// repetition and each item gets an independently derived GaussianSource, so
// results are identical for any worker count.
NoisyAccuracy evaluate_noisy(const DenseNetwork& net, const LabeledDataset& ds,
                             const NoiseSpec& spec, std::size_t repetitions,
                             std::uint64_t seed, unsigned workers = 0);

}  // namespace noisenet
