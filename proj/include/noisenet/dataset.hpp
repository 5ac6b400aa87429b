#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace noisenet {

// Inputs normalized to [0,1], labels 0..9 (or 0..C-1 for synthetic data).
struct LabeledDataset {
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
    std::string split;  // "train" | "test" | ""

    std::size_t size() const { return inputs.size(); }
    std::size_t input_dim() const { return inputs.empty() ? 0 : inputs[0].size(); }
};

// Reads an MNIST-style IDX image/label pair.  Pixel bytes are divided by 255;
// 28x28 images are flattened row-major into length-784 vectors.  Files whose
// first two bytes are the gzip magic (0x1f 0x8b) are decompressed
// transparently.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path,
                        const std::string& split = "");

// Writes the dataset back out as a raw (uncompressed) IDX pair, quantizing
// each input component to the nearest byte.
void save_idx(const LabeledDataset& ds, const std::string& images_path,
              const std::string& labels_path);

// Deterministic Gaussian-blob dataset: one well-separated blob per class,
// clipped to [0,1]^dim, class counts balanced within one item.  Exists so the
// full pipeline can run and be tested without the real MNIST files.
LabeledDataset synthetic_dataset(std::uint64_t seed, std::size_t n_items,
                                 std::size_t input_dim, std::size_t class_count,
                                 const std::string& split = "");

}  // namespace noisenet
