#include "noisenet/analysis.hpp"

#include "noisenet/errors.hpp"

namespace noisenet {

std::vector<WeightStats> weight_stats(const DenseNetwork& net) {
    std::vector<WeightStats> out;
    out.reserve(net.weights.size());
    for (std::size_t k = 0; k < net.weights.size(); ++k) {
        const Matrix& w = net.weights[k];
        double sum = 0.0, sum_sq = 0.0;
        for (double v : w.data) {
            sum += v;
            sum_sq += v * v;
        }
        const double n = double(w.rows) * double(w.cols);
        WeightStats st;
        st.layer = int(k) + 2;
        st.input_size = w.rows;
        st.mu = sum / n;
        st.mu_squared = st.mu * st.mu;
        st.eta = sum_sq / n;
        st.amplification = double(w.rows) * st.eta;
        out.push_back(st);
    }
    return out;
}

double variance_amplification_estimate(const DenseNetwork& net,
                                       int injection_layer) {
    if (!net.topology.is_hidden_layer(injection_layer))
        throw SpecError("injection layer " + std::to_string(injection_layer) +
                        " is not a hidden layer of " + net.topology.id());
    const auto stats = weight_stats(net);
    double product = 1.0;
    // Matrices W^{n+1} .. W^L carry the noise from layer n to the output.
    for (const auto& st : stats)
        if (st.layer > injection_layer) product *= st.amplification;
    return product;
}

}  // namespace noisenet
