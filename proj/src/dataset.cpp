#include "noisenet/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "noisenet/errors.hpp"
#include "noisenet/mathcore.hpp"

namespace noisenet {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failure on: " + path);
    return bytes;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in,
                                 const std::string& path) {
    z_stream zs{};
    // 15 + 16 selects gzip wrapping.
    if (inflateInit2(&zs, 15 + 16) != Z_OK)
        throw IoError("zlib init failed for: " + path);
    std::vector<std::uint8_t> out;
    out.reserve(in.size() * 4);
    std::uint8_t buf[1 << 16];
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    do {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("corrupt gzip stream: " + path);
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::vector<std::uint8_t> read_maybe_gzipped(const std::string& path) {
    auto bytes = read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b)
        return gunzip(bytes, path);
    return bytes;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off,
                        const std::string& path) {
    if (off + 4 > b.size()) throw IoError("truncated file: " + path);
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

void write_be32(std::ofstream& f, std::uint32_t v) {
    const char bytes[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
    f.write(bytes, 4);
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path,
                        const std::string& split) {
    const auto img = read_maybe_gzipped(images_path);
    const auto lab = read_maybe_gzipped(labels_path);

    if (read_be32(img, 0, images_path) != kImageMagic)
        throw FormatError("bad image magic in " + images_path);
    if (read_be32(lab, 0, labels_path) != kLabelMagic)
        throw FormatError("bad label magic in " + labels_path);

    const std::uint32_t n_images = read_be32(img, 4, images_path);
    const std::uint32_t rows = read_be32(img, 8, images_path);
    const std::uint32_t cols = read_be32(img, 12, images_path);
    const std::uint32_t n_labels = read_be32(lab, 4, labels_path);

    if (n_images != n_labels)
        throw FormatError("image count " + std::to_string(n_images) +
                          " != label count " + std::to_string(n_labels));

    const std::size_t dim = std::size_t(rows) * cols;
    if (img.size() < 16 + std::size_t(n_images) * dim)
        throw IoError("truncated image file: " + images_path);
    if (lab.size() < 8 + n_labels)
        throw IoError("truncated label file: " + labels_path);

    LabeledDataset ds;
    ds.split = split;
    ds.inputs.reserve(n_images);
    ds.labels.reserve(n_images);
    for (std::uint32_t k = 0; k < n_images; ++k) {
        std::vector<double> x(dim);
        const std::uint8_t* px = img.data() + 16 + std::size_t(k) * dim;
        for (std::size_t i = 0; i < dim; ++i) x[i] = px[i] / 255.0;
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(int(lab[8 + k]));
    }
    return ds;
}

void save_idx(const LabeledDataset& ds, const std::string& images_path,
              const std::string& labels_path) {
    const std::size_t dim = ds.input_dim();
    // IDX carries explicit 2-D image dimensions; store 1 x dim when the input
    // length is not a perfect square.
    std::uint32_t rows = 1, cols = std::uint32_t(dim);
    const auto r = std::uint32_t(std::lround(std::sqrt(double(dim))));
    if (std::size_t(r) * r == dim) rows = cols = r;

    std::ofstream fi(images_path, std::ios::binary);
    if (!fi) throw IoError("cannot write: " + images_path);
    write_be32(fi, kImageMagic);
    write_be32(fi, std::uint32_t(ds.size()));
    write_be32(fi, rows);
    write_be32(fi, cols);
    for (const auto& x : ds.inputs)
        for (double v : x) {
            const auto byte = static_cast<std::uint8_t>(
                std::clamp(std::lround(v * 255.0), 0L, 255L));
            fi.put(char(byte));
        }
    if (!fi) throw IoError("write failure on: " + images_path);

    std::ofstream fl(labels_path, std::ios::binary);
    if (!fl) throw IoError("cannot write: " + labels_path);
    write_be32(fl, kLabelMagic);
    write_be32(fl, std::uint32_t(ds.size()));
    for (int l : ds.labels) fl.put(char(l));
    if (!fl) throw IoError("write failure on: " + labels_path);
}

LabeledDataset synthetic_dataset(std::uint64_t seed, std::size_t n_items,
                                 std::size_t input_dim, std::size_t class_count,
                                 const std::string& split) {
    if (class_count == 0 || input_dim == 0)
        throw SpecError("synthetic_dataset: dim and class count must be >= 1");
    if (n_items < class_count)
        throw SpecError("synthetic_dataset: need at least one item per class");

    // Class centers on a fixed set of phase-shifted cosine patterns; any two
    // classes differ in most coordinates, which keeps the blobs separable.
    std::vector<std::vector<double>> centers(class_count);
    for (std::size_t c = 0; c < class_count; ++c) {
        centers[c].resize(input_dim);
        for (std::size_t d = 0; d < input_dim; ++d) {
            const double phase =
                2.0 * 3.14159265358979323846 * double(c) / double(class_count);
            centers[c][d] = 0.5 + 0.35 * std::cos(phase + 2.4 * double(d));
        }
    }

    constexpr double kBlobSigma = 0.04;
    GaussianSource rng(seed);
    LabeledDataset ds;
    ds.split = split;
    ds.inputs.reserve(n_items);
    ds.labels.reserve(n_items);
    for (std::size_t k = 0; k < n_items; ++k) {
        const std::size_t c = k % class_count;  // balanced within +-1
        std::vector<double> x(input_dim);
        for (std::size_t d = 0; d < input_dim; ++d)
            x[d] = std::clamp(centers[c][d] + kBlobSigma * rng.next(), 0.0, 1.0);
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(int(c));
    }
    return ds;
}

}  // namespace noisenet
