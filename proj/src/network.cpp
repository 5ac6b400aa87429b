#include "noisenet/network.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "noisenet/errors.hpp"

namespace noisenet {

std::string NetworkTopology::id() const {
    std::string s;
    for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(layer_sizes[i]);
    }
    return s;
}

void NetworkTopology::validate() const {
    if (layer_sizes.size() < 2)
        throw SpecError("topology needs at least input and output layers");
    for (auto n : layer_sizes)
        if (n < 1) throw SpecError("topology layer sizes must be >= 1");
}

NetworkTopology parse_topology(const std::string& list) {
    NetworkTopology t;
    std::string tok;
    std::stringstream ss(list);
    while (std::getline(ss, tok, list.find('-') != std::string::npos ? '-' : ',')) {
        if (tok.empty()) continue;
        try {
            t.layer_sizes.push_back(std::stoul(tok));
        } catch (const std::exception&) {
            throw SpecError("bad topology token: '" + tok + "'");
        }
    }
    t.validate();
    return t;
}

void DenseNetwork::validate() const {
    topology.validate();
    if (weights.size() != topology.num_layers() - 1)
        throw ShapeError("weight count does not match topology");
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].rows != topology.layer_sizes[k] ||
            weights[k].cols != topology.layer_sizes[k + 1])
            throw ShapeError("weight matrix " + std::to_string(k + 2) +
                             " shape mismatch");
        for (double v : weights[k].data)
            if (!std::isfinite(v)) throw NumericError("non-finite weight");
    }
}

void sigmoid_into(std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = v[i];
        if (x >= 0.0) {
            out[i] = 1.0 / (1.0 + std::exp(-x));
        } else {
            const double e = std::exp(x);
            out[i] = e / (1.0 + e);
        }
    }
}

std::vector<double> sigmoid(std::span<const double> v) {
    std::vector<double> out(v.size());
    sigmoid_into(v, out);
    return out;
}

void softmax_into(std::span<const double> v, std::span<double> out) {
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        sum += out[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i) out[i] /= sum;
}

std::vector<double> softmax(std::span<const double> v) {
    std::vector<double> out(v.size());
    softmax_into(v, out);
    return out;
}

ForwardTrace forward_clean(const DenseNetwork& net, std::span<const double> x) {
    if (x.size() != net.topology.input_dim())
        throw ShapeError("input length " + std::to_string(x.size()) +
                         " does not match input layer size " +
                         std::to_string(net.topology.input_dim()));
    const std::size_t L = net.topology.num_layers();
    ForwardTrace tr;
    tr.preactivations.resize(L);
    tr.activations.resize(L);
    tr.preactivations[0].assign(x.begin(), x.end());
    tr.activations[0] = tr.preactivations[0];
    for (std::size_t k = 0; k < net.weights.size(); ++k) {
        tr.preactivations[k + 1] = mat_vec(net.weights[k], tr.activations[k]);
        tr.activations[k + 1].resize(tr.preactivations[k + 1].size());
        if (k + 2 == L)
            softmax_into(tr.preactivations[k + 1], tr.activations[k + 1]);
        else
            sigmoid_into(tr.preactivations[k + 1], tr.activations[k + 1]);
    }
    return tr;
}

std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

std::size_t predict(const DenseNetwork& net, std::span<const double> x) {
    return argmax_lowest(forward_clean(net, x).output());
}

double clean_accuracy(const DenseNetwork& net, const LabeledDataset& ds,
                      unsigned workers) {
    std::atomic<std::size_t> correct{0};
    parallel_for_chunks(ds.size(), workers, [&](std::size_t b, std::size_t e) {
        std::size_t local = 0;
        for (std::size_t i = b; i < e; ++i)
            if (predict(net, ds.inputs[i]) == std::size_t(ds.labels[i])) ++local;
        correct += local;
    });
    return 100.0 * double(correct.load()) / double(ds.size());
}

namespace {

constexpr char kMagic[4] = {'N', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(buf, bits);
}

std::uint32_t get_u32(const std::string& b, std::size_t& off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t(std::uint8_t(b[off++])) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::string& b, std::size_t& off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= std::uint64_t(std::uint8_t(b[off++])) << (8 * i);
    return v;
}

double get_f64(const std::string& b, std::size_t& off) {
    const std::uint64_t bits = get_u64(b, off);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void save_model(const DenseNetwork& net, const std::string& path) {
    net.validate();
    std::string payload;
    put_u32(payload, kVersion);
    put_u32(payload, std::uint32_t(net.topology.num_layers()));
    for (auto n : net.topology.layer_sizes) put_u64(payload, n);
    for (const auto& w : net.weights)
        for (double v : w.data) put_f64(payload, v);

    const auto crc = std::uint32_t(
        crc32(0, reinterpret_cast<const Bytef*>(payload.data()),
              uInt(payload.size())));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write model file: " + path);
    f.write(kMagic, 4);
    f.write(payload.data(), std::streamsize(payload.size()));
    std::string tail;
    put_u32(tail, crc);
    f.write(tail.data(), 4);
    if (!f) throw IoError("write failure on model file: " + path);
}

DenseNetwork load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open model file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("not a model checkpoint: " + path);

    const std::string payload = bytes.substr(4, bytes.size() - 8);
    std::size_t tail_off = bytes.size() - 4;
    std::uint32_t stored_crc = 0;
    {
        std::size_t off = tail_off;
        stored_crc = get_u32(bytes, off);
    }
    const auto crc = std::uint32_t(
        crc32(0, reinterpret_cast<const Bytef*>(payload.data()),
              uInt(payload.size())));
    if (crc != stored_crc)
        throw FormatError("checksum mismatch in model file: " + path);

    std::size_t off = 0;
    const std::uint32_t version = get_u32(payload, off);
    if (version != kVersion)
        throw FormatError("unsupported model version " +
                          std::to_string(version) + " in " + path);
    const std::uint32_t nlayers = get_u32(payload, off);
    if (nlayers < 2 || nlayers > 1024)
        throw FormatError("implausible layer count in " + path);

    DenseNetwork net;
    net.topology.layer_sizes.resize(nlayers);
    if (payload.size() < off + 8 * nlayers)
        throw IoError("truncated model file: " + path);
    for (auto& n : net.topology.layer_sizes) n = std::size_t(get_u64(payload, off));

    std::size_t n_weights = 0;
    for (std::size_t k = 0; k + 1 < nlayers; ++k)
        n_weights += net.topology.layer_sizes[k] * net.topology.layer_sizes[k + 1];
    if (payload.size() != off + 8 * n_weights)
        throw IoError("truncated model file: " + path);

    for (std::size_t k = 0; k + 1 < nlayers; ++k) {
        Matrix w(net.topology.layer_sizes[k], net.topology.layer_sizes[k + 1]);
        for (auto& v : w.data) v = get_f64(payload, off);
        net.weights.push_back(std::move(w));
    }
    net.validate();
    return net;
}

}  // namespace noisenet
