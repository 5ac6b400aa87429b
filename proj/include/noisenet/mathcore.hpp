#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace noisenet {

// Dense row-major matrix of doubles. A weight matrix connecting a layer of
// size `rows` to a layer of size `cols` stores entry (j, i) at data[j*cols+i],
// i.e. row index j walks the input side and column index i the output side.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t j, std::size_t i) { return data[j * cols + i]; }
    double at(std::size_t j, std::size_t i) const { return data[j * cols + i]; }

    double* row(std::size_t j) { return data.data() + j * cols; }
    const double* row(std::size_t j) const { return data.data() + j * cols; }

    bool same_shape(const Matrix& o) const {
        return rows == o.rows && cols == o.cols;
    }
};

// out[i] = sum_j x[j] * W(j, i).  x indexes the previous layer (length
// W.rows), the output indexes the next layer (length W.cols).
std::vector<double> mat_vec(const Matrix& w, std::span<const double> x);

// Accumulating variant used by the forward passes: `out` must already have
// length w.cols and is overwritten.
void mat_vec_into(const Matrix& w, std::span<const double> x,
                  std::span<double> out);

// Seedable standard-normal stream.  The uniform source is a splitmix64
// counter generator, turned Gaussian by the Box-Muller transform, so equal
// seeds replay the exact same sequence.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double next_uniform();  // open interval (0, 1)
    double next();          // one N(0, 1) sample
    std::vector<double> draw(std::size_t n);

    // Deterministic child-seed derivation; used to fork independent streams
    // for repetitions, test items and sweep cells.
    static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Runs fn(begin, end) over a fixed contiguous chunking of [0, n).  The chunk
// layout depends only on n, never on the worker count, so any output written
// per-index or accumulated per-chunk is identical for 1 and N workers.
// workers == 0 means hardware concurrency.
void parallel_for_chunks(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace noisenet
