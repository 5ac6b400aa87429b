#pragma once

#include <vector>

#include "noisenet/network.hpp"

namespace noisenet {

// Per-matrix statistics: mean of entries, its square, mean of squared
// entries, and the noise-variance amplification factor N_{n-1} * eta(W^n)
// (input-side layer size times the mean square).
struct WeightStats {
    int layer = 0;              // matrix W^layer, layer in 2..L
    std::size_t input_size = 0; // N_{n-1}
    double mu = 0.0;
    double mu_squared = 0.0;
    double eta = 0.0;
    double amplification = 0.0;
};

std::vector<WeightStats> weight_stats(const DenseNetwork& net);

// Product of the amplification factors of every matrix after the noisy
// layer.  A heuristic ordering predictor for after-activation noise: larger
// product means earlier injection and worse degradation.  Not meaningful for
// before-activation noise, where the sigmoid nonlinearity dominates.
double variance_amplification_estimate(const DenseNetwork& net,
                                       int injection_layer);

}  // namespace noisenet
