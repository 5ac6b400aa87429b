#include "noisenet/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numeric>
#include <thread>

#include "noisenet/errors.hpp"

namespace noisenet {

void TrainConfig::validate() const {
    if (epochs < 1) throw SpecError("epochs must be >= 1");
    if (batch_size < 1) throw SpecError("batch size must be >= 1");
    if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
        throw SpecError("Adam betas must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw SpecError("Adam epsilon must be > 0");
    if (!(learning_rate > 0.0)) throw SpecError("learning rate must be > 0");
}

DenseNetwork init_weights(const NetworkTopology& topology, std::uint64_t seed) {
    topology.validate();
    DenseNetwork net;
    net.topology = topology;
    GaussianSource rng(seed);
    for (std::size_t k = 0; k + 1 < topology.num_layers(); ++k) {
        const std::size_t fan_in = topology.layer_sizes[k];
        const std::size_t fan_out = topology.layer_sizes[k + 1];
        const double bound = std::sqrt(6.0 / double(fan_in + fan_out));
        Matrix w(fan_in, fan_out);
        for (auto& v : w.data) v = bound * (2.0 * rng.next_uniform() - 1.0);
        net.weights.push_back(std::move(w));
    }
    return net;
}

namespace {

constexpr double kProbClip = 1e-12;

// Number of partial-gradient accumulators.  Fixed (not tied to the worker
// count) so the reduction order, and therefore the result, is identical for
// any number of threads.
constexpr std::size_t kGradChunks = 8;

struct SampleRef {
    const std::vector<double>* input;
    int label;
};

// Forward + backward for samples [begin, end), summing raw (unnormalized)
// gradients into `grads` and returning the summed loss.
double accumulate_range(const DenseNetwork& net,
                        const std::vector<SampleRef>& batch, std::size_t begin,
                        std::size_t end, std::vector<Matrix>& grads) {
    const std::size_t L = net.topology.num_layers();
    double loss_sum = 0.0;
    std::vector<double> delta, delta_prev;
    for (std::size_t s = begin; s < end; ++s) {
        const ForwardTrace tr = forward_clean(net, *batch[s].input);
        const auto& p = tr.output();
        const int label = batch[s].label;
        if (label < 0 || std::size_t(label) >= p.size())
            throw SpecError("label out of range: " + std::to_string(label));
        const double item_loss = -std::log(p[std::size_t(label)] + kProbClip);
        if (!std::isfinite(item_loss))
            throw NumericError("non-finite loss at batch item " +
                               std::to_string(s));
        loss_sum += item_loss;

        // Softmax + cross-entropy collapse to p - y at the output.
        delta.assign(p.begin(), p.end());
        delta[std::size_t(label)] -= 1.0;

        for (std::size_t k = L - 1; k >= 1; --k) {
            const Matrix& w = net.weights[k - 1];
            Matrix& g = grads[k - 1];
            const auto& a_prev = tr.activations[k - 1];
            const bool need_prev = k > 1;
            if (need_prev) delta_prev.assign(w.rows, 0.0);
            for (std::size_t j = 0; j < w.rows; ++j) {
                const double aj = a_prev[j];
                double* grow = g.row(j);
                const double* wrow = w.row(j);
                double acc = 0.0;
                for (std::size_t i = 0; i < w.cols; ++i) {
                    grow[i] += aj * delta[i];
                    acc += wrow[i] * delta[i];
                }
                if (need_prev) delta_prev[j] = acc * aj * (1.0 - aj);
            }
            if (!need_prev) break;
            delta.swap(delta_prev);
        }
    }
    return loss_sum;
}

double batch_loss_and_gradients(const DenseNetwork& net,
                                const std::vector<SampleRef>& batch,
                                std::vector<Matrix>& grads,
                                std::vector<std::vector<Matrix>>& partials,
                                unsigned workers) {
    grads.resize(net.weights.size());
    for (std::size_t k = 0; k < grads.size(); ++k) {
        if (!grads[k].same_shape(net.weights[k]))
            grads[k] = Matrix(net.weights[k].rows, net.weights[k].cols);
        else
            std::fill(grads[k].data.begin(), grads[k].data.end(), 0.0);
    }

    const std::size_t n = batch.size();
    const std::size_t chunks = std::min(kGradChunks, n);
    const std::size_t chunk_size = (n + chunks - 1) / chunks;

    partials.resize(chunks);
    std::vector<double> chunk_loss(chunks, 0.0);
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto run_chunk = [&](std::size_t c) {
        auto& pg = partials[c];
        pg.resize(grads.size());
        for (std::size_t k = 0; k < pg.size(); ++k) {
            if (!pg[k].same_shape(grads[k]))
                pg[k] = Matrix(grads[k].rows, grads[k].cols);
            else
                std::fill(pg[k].data.begin(), pg[k].data.end(), 0.0);
        }
        const std::size_t b = c * chunk_size;
        const std::size_t e = std::min(n, b + chunk_size);
        try {
            if (b < e) chunk_loss[c] = accumulate_range(net, batch, b, e, pg);
        } catch (...) {
            std::lock_guard lk(failure_mu);
            if (!failure) failure = std::current_exception();
        }
    };

    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers <= 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        auto pump = [&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= chunks) return;
                run_chunk(c);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::min<std::size_t>(workers, chunks); ++t)
            pool.emplace_back(pump);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Fixed chunk-order reduction.
    double loss_sum = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        loss_sum += chunk_loss[c];
        for (std::size_t k = 0; k < grads.size(); ++k) {
            const auto& src = partials[c][k].data;
            auto& dst = grads[k].data;
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
    }

    const double inv_b = 1.0 / double(n);
    for (auto& g : grads)
        for (auto& v : g.data) v *= inv_b;
    return loss_sum * inv_b;
}

}  // namespace

double loss_and_gradients(const DenseNetwork& net,
                          const std::vector<std::vector<double>>& inputs,
                          const std::vector<int>& labels,
                          std::vector<Matrix>& grads, unsigned workers) {
    if (inputs.empty()) throw SpecError("loss_and_gradients: empty batch");
    if (inputs.size() != labels.size())
        throw ShapeError("batch inputs and labels differ in length");
    std::vector<SampleRef> batch(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i)
        batch[i] = {&inputs[i], labels[i]};
    std::vector<std::vector<Matrix>> partials;
    return batch_loss_and_gradients(net, batch, grads, partials, workers);
}

AdamState AdamState::for_network(const DenseNetwork& net) {
    AdamState st;
    for (const auto& w : net.weights) {
        st.m.emplace_back(w.rows, w.cols);
        st.v.emplace_back(w.rows, w.cols);
    }
    return st;
}

void adam_step(DenseNetwork& net, const std::vector<Matrix>& grads,
               AdamState& state, const TrainConfig& cfg) {
    if (grads.size() != net.weights.size() || state.m.size() != grads.size())
        throw ShapeError("adam_step: gradient/state shape mismatch");
    state.step += 1;
    const double b1t = 1.0 - std::pow(cfg.beta1, double(state.step));
    const double b2t = 1.0 - std::pow(cfg.beta2, double(state.step));
    for (std::size_t k = 0; k < grads.size(); ++k) {
        auto& w = net.weights[k].data;
        auto& m = state.m[k].data;
        auto& v = state.v[k].data;
        const auto& g = grads[k].data;
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / b1t;
            const double vhat = v[i] / b2t;
            w[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    }
}

TrainReport train(DenseNetwork& net, const LabeledDataset& train_ds,
                  const LabeledDataset& test_ds, const TrainConfig& cfg) {
    cfg.validate();
    net.validate();
    if (train_ds.input_dim() != net.topology.input_dim())
        throw ShapeError("training data input dim does not match topology");

    AdamState state = AdamState::for_network(net);
    std::vector<std::size_t> order(train_ds.size());
    std::iota(order.begin(), order.end(), 0);
    GaussianSource shuffle_rng(cfg.shuffle_seed);

    TrainReport report;
    std::vector<Matrix> grads;
    std::vector<std::vector<Matrix>> partials;
    std::vector<SampleRef> batch;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Seeded Fisher-Yates; std::shuffle is implementation-defined.
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            const std::size_t j = std::size_t(shuffle_rng.next_u64() % (i + 1));
            std::swap(order[i], order[j]);
        }

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
            const std::size_t e = std::min(order.size(), b + cfg.batch_size);
            batch.clear();
            for (std::size_t i = b; i < e; ++i)
                batch.push_back({&train_ds.inputs[order[i]],
                                 train_ds.labels[order[i]]});
            epoch_loss += batch_loss_and_gradients(net, batch, grads, partials,
                                                   cfg.workers);
            adam_step(net, grads, state, cfg);
            ++n_batches;
        }
        report.epoch_loss.push_back(epoch_loss / double(n_batches));
        if (cfg.verbose)
            std::cerr << "epoch=" << (epoch + 1)
                      << " loss=" << report.epoch_loss.back() << "\n";
    }

    report.train_accuracy = clean_accuracy(net, train_ds, cfg.workers);
    if (test_ds.size() > 0)
        report.test_accuracy = clean_accuracy(net, test_ds, cfg.workers);
    return report;
}

}  // namespace noisenet
