#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "noisenet/dataset.hpp"
#include "noisenet/errors.hpp"

using namespace noisenet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("noisenet_ds_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

void write_be32(std::ofstream& f, std::uint32_t v) {
    const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
    f.write(b, 4);
}

// Minimal IDX pair: n 28x28 images with constant pixel value, one label each.
void write_idx_pair(const std::string& img_path, const std::string& lab_path,
                    const std::vector<std::uint8_t>& pixel_values,
                    const std::vector<std::uint8_t>& labels,
                    std::uint32_t image_magic = 0x00000803,
                    std::uint32_t label_magic = 0x00000801) {
    std::ofstream fi(img_path, std::ios::binary);
    write_be32(fi, image_magic);
    write_be32(fi, std::uint32_t(pixel_values.size()));
    write_be32(fi, 28);
    write_be32(fi, 28);
    for (auto v : pixel_values)
        for (int i = 0; i < 784; ++i) fi.put(char(v));
    std::ofstream fl(lab_path, std::ios::binary);
    write_be32(fl, label_magic);
    write_be32(fl, std::uint32_t(labels.size()));
    for (auto l : labels) fl.put(char(l));
}

}  // namespace

TEST_CASE("hand-built IDX file: one all-zero image labeled 7") {
    TempDir tmp;
    write_idx_pair(tmp.file("img"), tmp.file("lab"), {0}, {7});
    const auto ds = load_idx(tmp.file("img"), tmp.file("lab"));
    REQUIRE(ds.size() == 1);
    CHECK(ds.labels[0] == 7);
    CHECK(ds.inputs[0].size() == 784);
    for (double v : ds.inputs[0]) CHECK(v == 0.0);
}

TEST_CASE("normalization endpoints 0 -> 0.0 and 255 -> 1.0") {
    TempDir tmp;
    write_idx_pair(tmp.file("img"), tmp.file("lab"), {0, 255}, {1, 2});
    const auto ds = load_idx(tmp.file("img"), tmp.file("lab"));
    CHECK(ds.inputs[0][0] == 0.0);
    CHECK(ds.inputs[1][0] == 1.0);
}

TEST_CASE("bad magic numbers are format errors") {
    TempDir tmp;
    write_idx_pair(tmp.file("img"), tmp.file("lab"), {0}, {1}, 0xdeadbeef);
    CHECK_THROWS_AS(load_idx(tmp.file("img"), tmp.file("lab")), FormatError);
    write_idx_pair(tmp.file("img2"), tmp.file("lab2"), {0}, {1}, 0x00000803,
                   0x12345678);
    CHECK_THROWS_AS(load_idx(tmp.file("img2"), tmp.file("lab2")), FormatError);
}

TEST_CASE("image/label count mismatch is a consistency error") {
    TempDir tmp;
    write_idx_pair(tmp.file("img"), tmp.file("lab"), {0, 0}, {1});
    CHECK_THROWS_AS(load_idx(tmp.file("img"), tmp.file("lab")), FormatError);
}

TEST_CASE("truncated image payload is an I/O error") {
    TempDir tmp;
    write_idx_pair(tmp.file("img"), tmp.file("lab"), {0}, {1});
    fs::resize_file(tmp.file("img"), 100);
    CHECK_THROWS_AS(load_idx(tmp.file("img"), tmp.file("lab")), IoError);
}

TEST_CASE("gzip-compressed IDX files load transparently") {
    TempDir tmp;
    write_idx_pair(tmp.file("img"), tmp.file("lab"), {128}, {3});
    for (const char* name : {"img", "lab"}) {
        std::ifstream in(tmp.file(name), std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        gzFile gz = gzopen(tmp.file(std::string(name) + ".gz").c_str(), "wb");
        REQUIRE(gz != nullptr);
        gzwrite(gz, bytes.data(), unsigned(bytes.size()));
        gzclose(gz);
    }
    const auto ds = load_idx(tmp.file("img.gz"), tmp.file("lab.gz"));
    REQUIRE(ds.size() == 1);
    CHECK(ds.labels[0] == 3);
    CHECK(ds.inputs[0][0] == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("IDX round trip: inputs within quantization, labels exact") {
    TempDir tmp;
    const auto ds = synthetic_dataset(5, 40, 784, 10);
    save_idx(ds, tmp.file("img"), tmp.file("lab"));
    const auto back = load_idx(tmp.file("img"), tmp.file("lab"));
    REQUIRE(back.size() == ds.size());
    for (std::size_t k = 0; k < ds.size(); ++k) {
        CHECK(back.labels[k] == ds.labels[k]);
        for (std::size_t i = 0; i < 784; ++i)
            CHECK(std::abs(back.inputs[k][i] - ds.inputs[k][i]) <= 1.0 / 255.0);
    }
}

TEST_CASE("synthetic dataset determinism and balance") {
    const auto a = synthetic_dataset(1, 10, 4, 2);
    const auto b = synthetic_dataset(1, 10, 4, 2);
    CHECK(a.inputs == b.inputs);
    CHECK(a.labels == b.labels);

    const auto big = synthetic_dataset(3, 1000, 8, 10);
    std::vector<int> counts(10, 0);
    for (int l : big.labels) counts[std::size_t(l)]++;
    for (int c : counts) CHECK(c == 100);
}

TEST_CASE("all synthetic inputs lie in [0,1]") {
    const auto ds = synthetic_dataset(9, 200, 16, 5);
    for (const auto& x : ds.inputs)
        for (double v : x) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
}

TEST_CASE("synthetic preconditions") {
    CHECK_THROWS_AS(synthetic_dataset(1, 3, 4, 5), SpecError);
}
