#include "noisenet/mathcore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "noisenet/errors.hpp"

namespace noisenet {

void mat_vec_into(const Matrix& w, std::span<const double> x,
                  std::span<double> out) {
    if (x.size() != w.rows) {
        throw ShapeError("mat_vec: vector length " + std::to_string(x.size()) +
                         " does not match matrix rows " +
                         std::to_string(w.rows) + " (matrix is " +
                         std::to_string(w.rows) + "x" + std::to_string(w.cols) +
                         ")");
    }
    std::fill(out.begin(), out.end(), 0.0);
    // Row-major accumulation: the inner loop runs over a contiguous row.
    for (std::size_t j = 0; j < w.rows; ++j) {
        const double xj = x[j];
        const double* row = w.row(j);
        for (std::size_t i = 0; i < w.cols; ++i) out[i] += xj * row[i];
    }
}

std::vector<double> mat_vec(const Matrix& w, std::span<const double> x) {
    std::vector<double> out(w.cols);
    mat_vec_into(w, x, out);
    return out;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t GaussianSource::next_u64() { return splitmix64(state_); }

double GaussianSource::next_uniform() {
    // 53-bit mantissa, shifted into the open interval (0, 1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianSource::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

std::vector<double> GaussianSource::draw(std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = next();
    return out;
}

std::uint64_t GaussianSource::derive_seed(std::uint64_t master,
                                          std::uint64_t index) {
    std::uint64_t state = master ^ (index * 0xd1342543de82ef95ULL + 1ULL);
    return splitmix64(state);
}

void parallel_for_chunks(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;

    // Chunk layout depends only on n so results cannot depend on the worker
    // count or scheduling order.
    const std::size_t chunk_count = std::min<std::size_t>(n, 64);
    const std::size_t chunk_size = (n + chunk_count - 1) / chunk_count;

    if (workers == 1 || chunk_count == 1) {
        for (std::size_t c = 0; c < chunk_count; ++c) {
            const std::size_t b = c * chunk_size;
            const std::size_t e = std::min(n, b + chunk_size);
            if (b < e) fn(b, e);
        }
        return;
    }

    std::atomic<std::size_t> next_chunk{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next_chunk.fetch_add(1);
            if (c >= chunk_count) return;
            const std::size_t b = c * chunk_size;
            const std::size_t e = std::min(n, b + chunk_size);
            if (b < e) fn(b, e);
        }
    };
    std::vector<std::thread> pool;
    const unsigned nthreads = static_cast<unsigned>(
        std::min<std::size_t>(workers, chunk_count));
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace noisenet
