#include "noisenet/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "noisenet/errors.hpp"

namespace noisenet {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw NumericError("double formatting failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("bad numeric field: '" + s + "'");
    return v;
}

void check_kind(const std::string& kind) {
    if (kind != "additive" && kind != "multiplicative")
        throw SpecError("unknown noise kind: '" + kind +
                        "' (want additive|multiplicative)");
}

}  // namespace

void SweepConfig::validate() const {
    if (repetitions < 1) throw SpecError("repetitions must be >= 1");
    if (kinds.empty() || stages.empty() || layers.empty())
        throw SpecError("sweep kinds/stages/layers must be nonempty");
    for (const auto& k : kinds) check_kind(k);
    for (const auto& s : stages) parse_stage(s);
    if (d_grid.empty()) throw SpecError("sweep D grid must be nonempty");
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
        if (d_grid[i] < 0.0) throw SpecError("D values must be >= 0");
        if (i > 0 && d_grid[i] <= d_grid[i - 1])
            throw SpecError("D grid must be strictly increasing");
    }
}

std::vector<double> default_d_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k)
        grid.push_back(std::pow(10.0, -4.0 + 4.0 * double(k) / 20.0));
    return grid;
}

SweepConfig load_sweep_config(const std::string& json_path) {
    std::ifstream f(json_path);
    if (!f) throw IoError("cannot open sweep config: " + json_path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad sweep config JSON in " + json_path + ": " +
                          e.what());
    }
    SweepConfig cfg;
    try {
        cfg.model_paths = j.at("models").get<std::vector<std::string>>();
        cfg.d_grid = j.contains("d_grid")
                         ? j["d_grid"].get<std::vector<double>>()
                         : default_d_grid();
        cfg.kinds = j.contains("kinds")
                        ? j["kinds"].get<std::vector<std::string>>()
                        : std::vector<std::string>{"additive", "multiplicative"};
        cfg.stages = j.contains("stages")
                         ? j["stages"].get<std::vector<std::string>>()
                         : std::vector<std::string>{"after"};
        cfg.layers = j.at("layers").get<std::vector<int>>();
        cfg.repetitions = j.value("repetitions", std::size_t{10});
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.workers = j.value("workers", 0u);
        if (j.contains("pooling")) {
            PoolSpec pool;
            pool.copies = j["pooling"].at("m").get<std::size_t>();
            pool.layers = j["pooling"].at("layers").get<std::vector<int>>();
            cfg.pooling = pool;
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad sweep config schema in " + json_path + ": " +
                          e.what());
    }
    cfg.validate();
    if (cfg.model_paths.empty())
        throw SpecError("sweep config needs at least one model");
    return cfg;
}

SweepResult run_sweep(const SweepConfig& config,
                      const std::vector<DenseNetwork>& models,
                      const LabeledDataset& test_ds) {
    config.validate();
    if (models.empty()) throw SpecError("run_sweep: no models");

    struct Cell {
        const DenseNetwork* net;
        std::string stage;
        std::string kind;
        int layer;
        double d;
    };
    std::vector<Cell> cells;
    for (const auto& net : models)
        for (const auto& stage : config.stages)
            for (const auto& kind : config.kinds)
                for (int layer : config.layers) {
                    cells.push_back({&net, stage, kind, layer, 0.0});
                    for (double d : config.d_grid)
                        cells.push_back({&net, stage, kind, layer, d});
                }

    // Pooled networks are materialized once per model.
    std::map<const DenseNetwork*, DenseNetwork> pooled;
    if (config.pooling)
        for (const auto& net : models)
            pooled.emplace(&net, apply_pooling(net, *config.pooling));

    SweepResult result;
    result.rows.resize(cells.size());
    std::exception_ptr failure;
    std::mutex failure_mu;

    parallel_for_chunks(cells.size(), config.workers,
                        [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const Cell& cell = cells[c];
            const DenseNetwork& net =
                config.pooling ? pooled.at(cell.net) : *cell.net;
            NoiseSpec spec;
            spec.stage = parse_stage(cell.stage);
            spec.target_layers = {cell.layer};
            if (cell.kind == "additive")
                spec.d_additive = cell.d;
            else
                spec.d_multiplicative = cell.d;
            const std::uint64_t cell_seed =
                GaussianSource::derive_seed(config.seed, c);
            try {
                const auto acc = evaluate_noisy(net, test_ds, spec,
                                                config.repetitions, cell_seed,
                                                /*workers=*/1);
                SweepRow row;
                row.topology = net.topology.id();
                row.stage = cell.stage;
                row.kind = cell.kind;
                row.layer = cell.layer;
                row.d = cell.d;
                row.acc_mean = acc.mean;
                row.acc_std = acc.stddev;
                row.reps = config.repetitions;
                row.seed = cell_seed;
                result.rows[c] = std::move(row);
            } catch (const std::exception& ex) {
                std::lock_guard lk(failure_mu);
                if (!failure)
                    failure = std::make_exception_ptr(SpecError(
                        "sweep cell failed (topology=" + net.topology.id() +
                        " stage=" + cell.stage + " kind=" + cell.kind +
                        " layer=" + std::to_string(cell.layer) +
                        " D=" + format_double(cell.d) + "): " + ex.what()));
            }
        }
    });
    if (failure) std::rethrow_exception(failure);
    return result;
}

SweepResult run_sweep(const SweepConfig& config, const LabeledDataset& test_ds) {
    if (config.model_paths.empty())
        throw SpecError("sweep needs at least one model");
    std::vector<DenseNetwork> models;
    models.reserve(config.model_paths.size());
    for (const auto& path : config.model_paths) models.push_back(load_model(path));
    return run_sweep(config, models, test_ds);
}

void emit_csv(const SweepResult& result, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write CSV: " + path);
    f << "topology,stage,kind,layer,D,acc_mean,acc_std,reps,seed\n";
    for (const auto& r : result.rows) {
        f << r.topology << ',' << r.stage << ',' << r.kind << ',' << r.layer
          << ',' << format_double(r.d) << ',' << format_double(r.acc_mean)
          << ',' << format_double(r.acc_std) << ',' << r.reps << ',' << r.seed
          << '\n';
    }
    if (!f) throw IoError("write failure on CSV: " + path);
}

SweepResult load_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open CSV: " + path);
    std::string line;
    if (!std::getline(f, line) ||
        line != "topology,stage,kind,layer,D,acc_mean,acc_std,reps,seed")
        throw FormatError("bad CSV header in " + path);
    SweepResult result;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (fields.size() != 9)
            throw FormatError("bad CSV row in " + path + ": " + line);
        SweepRow r;
        r.topology = fields[0];
        r.stage = fields[1];
        r.kind = fields[2];
        r.layer = int(parse_double(fields[3]));
        r.d = parse_double(fields[4]);
        r.acc_mean = parse_double(fields[5]);
        r.acc_std = parse_double(fields[6]);
        r.reps = std::size_t(parse_double(fields[7]));
        r.seed = std::uint64_t(std::stoull(fields[8]));
        result.rows.push_back(std::move(r));
    }
    return result;
}

namespace {

struct GroupKey {
    std::string topology, stage, kind;
    int layer;
    double d;

    auto operator<=>(const GroupKey&) const = default;
};

std::string key_context(const GroupKey& k, const std::string& grouping) {
    std::string ctx;
    if (grouping != "topology") ctx += k.topology + " ";
    if (grouping != "stage") ctx += k.stage + " ";
    if (grouping != "kind") ctx += k.kind + " ";
    if (grouping != "layer") ctx += "layer " + std::to_string(k.layer);
    return ctx;
}

}  // namespace

OrderingReport compare_curves(const SweepResult& result,
                              const std::string& grouping) {
    if (grouping != "stage" && grouping != "kind" && grouping != "layer" &&
        grouping != "topology")
        throw SpecError("unknown grouping: '" + grouping + "'");

    // Partition rows by the non-grouped keys; the grouped field becomes the
    // ordered comparison axis inside each partition.
    std::map<GroupKey, std::map<std::string, const SweepRow*>> parts;
    std::vector<std::string> appearance;  // grouped values, in row order
    for (const auto& r : result.rows) {
        GroupKey key{r.topology, r.stage, r.kind, r.layer, r.d};
        std::string value;
        if (grouping == "stage") {
            value = r.stage;
            key.stage.clear();
        } else if (grouping == "kind") {
            value = r.kind;
            key.kind.clear();
        } else if (grouping == "layer") {
            value = std::to_string(r.layer);
            key.layer = 0;
        } else {
            value = r.topology;
            key.topology.clear();
        }
        if (std::find(appearance.begin(), appearance.end(), value) ==
            appearance.end())
            appearance.push_back(value);
        if (!parts[key].emplace(value, &r).second)
            throw SpecError("duplicate sweep cell for grouping '" + grouping +
                            "'");
    }

    // Comparison order: lhs is the value expected to dominate.
    std::vector<std::pair<std::string, std::string>> pairs;
    if (grouping == "stage") {
        pairs = {{"before", "after"}};
    } else if (grouping == "kind") {
        pairs = {{"multiplicative", "additive"}};
    } else if (grouping == "layer") {
        std::vector<int> layers;
        for (const auto& v : appearance) layers.push_back(std::stoi(v));
        std::sort(layers.begin(), layers.end());
        for (std::size_t i = 0; i + 1 < layers.size(); ++i)
            pairs.emplace_back(std::to_string(layers[i + 1]),
                               std::to_string(layers[i]));
    } else {
        if (appearance.size() != 2)
            throw SpecError("topology grouping needs exactly two topologies, got " +
                            std::to_string(appearance.size()));
        pairs = {{appearance[1], appearance[0]}};
    }

    OrderingReport report;
    report.grouping = grouping;
    bool all_hold = true, any_positive = false, all_zero = true;
    for (const auto& [key, group] : parts) {
        for (const auto& [lhs, rhs] : pairs) {
            auto li = group.find(lhs);
            auto ri = group.find(rhs);
            if (li == group.end() || ri == group.end())
                throw SpecError("unmatched sweep grids for grouping '" +
                                grouping + "' at D=" + format_double(key.d));
            ComparisonEntry e;
            e.context = key_context(key, grouping);
            e.d = key.d;
            e.lhs = lhs;
            e.rhs = rhs;
            e.diff = li->second->acc_mean - ri->second->acc_mean;
            const double tol =
                std::max(li->second->acc_std, ri->second->acc_std);
            e.holds = e.diff >= -tol;
            all_hold = all_hold && e.holds;
            any_positive = any_positive || e.diff > 0.0;
            all_zero = all_zero && e.diff == 0.0;
            report.entries.push_back(std::move(e));
        }
    }

    if (all_zero)
        report.verdict = "tie";
    else if (all_hold && any_positive)
        report.verdict = grouping == "layer"
                             ? "later layer dominates"
                             : pairs.front().first + " dominates";
    else
        report.verdict = "mixed";
    return report;
}

}  // namespace noisenet
