#include "noisenet/noise.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "noisenet/errors.hpp"

namespace noisenet {

std::string to_string(NoiseStage s) {
    return s == NoiseStage::before ? "before" : "after";
}

NoiseStage parse_stage(const std::string& s) {
    if (s == "before") return NoiseStage::before;
    if (s == "after") return NoiseStage::after;
    throw SpecError("unknown noise stage: '" + s + "' (want before|after)");
}

void NoiseSpec::validate(const NetworkTopology& topology) const {
    if (d_additive < 0.0 || d_multiplicative < 0.0)
        throw SpecError("noise intensities must be >= 0");
    for (int layer : target_layers)
        if (!topology.is_hidden_layer(layer))
            throw SpecError("noise target layer " + std::to_string(layer) +
                            " is not a hidden layer of " + topology.id());
}

ForwardTrace forward_noisy(const DenseNetwork& net, std::span<const double> x,
                           const NoiseSpec& spec, GaussianSource& rng) {
    spec.validate(net.topology);
    if (x.size() != net.topology.input_dim())
        throw ShapeError("input length " + std::to_string(x.size()) +
                         " does not match input layer size " +
                         std::to_string(net.topology.input_dim()));

    const std::size_t L = net.topology.num_layers();
    const double amp_a = spec.d_additive > 0.0
                             ? std::sqrt(2.0 * spec.d_additive)
                             : 0.0;
    const double amp_m = spec.d_multiplicative > 0.0
                             ? std::sqrt(2.0 * spec.d_multiplicative)
                             : 0.0;

    ForwardTrace tr;
    tr.preactivations.resize(L);
    tr.activations.resize(L);
    tr.preactivations[0].assign(x.begin(), x.end());
    tr.activations[0] = tr.preactivations[0];

    for (std::size_t k = 0; k < net.weights.size(); ++k) {
        const int layer = int(k) + 2;  // this matrix feeds layer `layer`
        auto& pre = tr.preactivations[k + 1];
        auto& act = tr.activations[k + 1];
        pre = mat_vec(net.weights[k], tr.activations[k]);
        act.resize(pre.size());

        if (k + 2 == L) {
            softmax_into(pre, act);  // output layer is never noisy
            continue;
        }

        const bool noisy =
            std::find(spec.target_layers.begin(), spec.target_layers.end(),
                      layer) != spec.target_layers.end();

        if (noisy && spec.stage == NoiseStage::before) {
            for (auto& v : pre) {
                if (amp_m != 0.0) v *= 1.0 + amp_m * rng.next();
                if (amp_a != 0.0) v += amp_a * rng.next();
            }
        }
        sigmoid_into(pre, act);
        if (noisy && spec.stage == NoiseStage::after) {
            for (auto& v : act) {
                if (amp_m != 0.0) v *= 1.0 + amp_m * rng.next();
                if (amp_a != 0.0) v += amp_a * rng.next();
            }
        }
    }
    return tr;
}

NoisyAccuracy evaluate_noisy(const DenseNetwork& net, const LabeledDataset& ds,
                             const NoiseSpec& spec, std::size_t repetitions,
                             std::uint64_t seed, unsigned workers) {
    if (repetitions < 1) throw SpecError("repetitions must be >= 1");
    spec.validate(net.topology);
    if (ds.size() == 0) throw SpecError("cannot evaluate an empty dataset");

    NoisyAccuracy out;
    out.per_repetition.resize(repetitions);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const std::uint64_t rep_seed = GaussianSource::derive_seed(seed, r);
        std::atomic<std::size_t> correct{0};
        parallel_for_chunks(ds.size(), workers,
                            [&](std::size_t b, std::size_t e) {
            std::size_t local = 0;
            for (std::size_t i = b; i < e; ++i) {
                GaussianSource rng(GaussianSource::derive_seed(rep_seed, i));
                const auto tr = forward_noisy(net, ds.inputs[i], spec, rng);
                if (argmax_lowest(tr.output()) == std::size_t(ds.labels[i]))
                    ++local;
            }
            correct += local;
        });
        out.per_repetition[r] =
            100.0 * double(correct.load()) / double(ds.size());
    }

    double sum = 0.0;
    for (double a : out.per_repetition) sum += a;
    out.mean = sum / double(repetitions);
    if (repetitions > 1) {
        double ss = 0.0;
        for (double a : out.per_repetition) ss += (a - out.mean) * (a - out.mean);
        out.stddev = std::sqrt(ss / double(repetitions - 1));
    }
    return out;
}

}  // namespace noisenet
