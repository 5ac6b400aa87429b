#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noisenet/pooling.hpp"

namespace noisenet {

// One full noise-sweep grid: models x stages x kinds x layers x intensities,
// each cell averaged over `repetitions` noisy passes of the test set.
struct SweepConfig {
    std::vector<std::string> model_paths;
    std::vector<double> d_grid;           // strictly increasing, > 0
    std::vector<std::string> kinds;       // "additive" | "multiplicative"
    std::vector<std::string> stages;      // "before" | "after"
    std::vector<int> layers;              // single-layer injections
    std::size_t repetitions = 10;
    std::uint64_t seed = 0;
    std::optional<PoolSpec> pooling;
    unsigned workers = 0;

    void validate() const;
};

// 21 log-spaced points over [1e-4, 1] (5 per decade); D = 0 reference rows
// are added by run_sweep itself.
std::vector<double> default_d_grid();

SweepConfig load_sweep_config(const std::string& json_path);

struct SweepRow {
    std::string topology;
    std::string stage;
    std::string kind;
    int layer = 0;
    double d = 0.0;
    double acc_mean = 0.0;
    double acc_std = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    bool operator==(const SweepResult&) const = default;
};

// Evaluates the full Cartesian grid.  Every (stage, kind, layer)
// configuration also gets a D = 0 reference row.  Cell seeds derive from
// (seed, cell index); cells run in parallel and are merged in index order,
// so the result is identical for any worker count.
SweepResult run_sweep(const SweepConfig& config,
                      const std::vector<DenseNetwork>& models,
                      const LabeledDataset& test_ds);

// Loads config.model_paths and the dataset caller-side variant.
SweepResult run_sweep(const SweepConfig& config, const LabeledDataset& test_ds);

// Columns: topology,stage,kind,layer,D,acc_mean,acc_std,reps,seed.
// Doubles are printed round-trip exact, so load_csv(emit_csv(r)) == r.
void emit_csv(const SweepResult& result, const std::string& path);
SweepResult load_csv(const std::string& path);

struct ComparisonEntry {
    std::string context;  // matched keys, e.g. "784-20-10 additive layer 2"
    double d = 0.0;
    std::string lhs, rhs;
    double diff = 0.0;  // lhs accuracy - rhs accuracy
    bool holds = false; // diff >= -max(std of the two cells)
};

struct OrderingReport {
    std::string grouping;
    std::vector<ComparisonEntry> entries;
    std::string verdict;  // "<lhs> dominates" | "tie" | "mixed"
};

// grouping selects the field whose two (or ordered more) values are
// compared at matched remaining keys: "stage" (before vs after), "kind"
// (multiplicative vs additive), "layer" (later vs earlier) or "topology"
// (second id vs first id, e.g. pooled vs unpooled).
OrderingReport compare_curves(const SweepResult& result,
                              const std::string& grouping);

}  // namespace noisenet
