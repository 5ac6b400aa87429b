// Command-line front end: train / eval / stats / pool / sweep / reproduce.
//
// Exit codes: 0 success, 1 usage error, 2 data error (I/O or file format),
// 3 numeric error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisenet/analysis.hpp"
#include "noisenet/dataset.hpp"
#include "noisenet/errors.hpp"
#include "noisenet/experiment.hpp"
#include "noisenet/network.hpp"
#include "noisenet/noise.hpp"
#include "noisenet/pooling.hpp"
#include "noisenet/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace noisenet;

namespace {

constexpr const char* kVersion = "noisenet 1.0.0";

std::string default_data_dir() {
    if (const char* env = std::getenv("NOISENET_DATA_DIR")) return env;
    return "data/mnist";
}

std::string find_idx_file(const std::string& dir, const std::string& stem) {
    for (const auto& name : {stem, stem + ".gz"}) {
        const fs::path p = fs::path(dir) / name;
        if (fs::exists(p)) return p.string();
    }
    throw IoError("missing MNIST file: expected '" + stem + "' or '" + stem +
                  ".gz' in " + dir);
}

struct DataOptions {
    std::string data_dir = default_data_dir();
    bool synthetic = false;
    std::size_t synthetic_train = 2000;
    std::size_t synthetic_test = 500;
    std::uint64_t synthetic_seed = 1;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--data-dir", data_dir,
                        "Directory with the four MNIST IDX files "
                        "(env NOISENET_DATA_DIR)");
        cmd->add_flag("--synthetic", synthetic,
                      "Use the deterministic synthetic blob dataset instead "
                      "of MNIST");
        cmd->add_option("--synthetic-train", synthetic_train,
                        "Synthetic training items");
        cmd->add_option("--synthetic-test", synthetic_test,
                        "Synthetic test items");
    }

    LabeledDataset load_train(std::size_t dim, std::size_t classes) const {
        if (synthetic)
            return synthetic_dataset(synthetic_seed, synthetic_train, dim,
                                     classes, "train");
        return load_idx(find_idx_file(data_dir, "train-images-idx3-ubyte"),
                        find_idx_file(data_dir, "train-labels-idx1-ubyte"),
                        "train");
    }

    LabeledDataset load_test(std::size_t dim, std::size_t classes) const {
        if (synthetic)
            return synthetic_dataset(
                GaussianSource::derive_seed(synthetic_seed, 0x7e57),
                synthetic_test, dim, classes, "test");
        return load_idx(find_idx_file(data_dir, "t10k-images-idx3-ubyte"),
                        find_idx_file(data_dir, "t10k-labels-idx1-ubyte"),
                        "test");
    }
};

std::vector<int> parse_layer_list(const std::string& s) {
    std::vector<int> layers;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) layers.push_back(std::stoi(tok));
    if (layers.empty()) throw SpecError("empty layer list");
    return layers;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void log_kv(std::initializer_list<std::pair<std::string, std::string>> kvs) {
    bool first = true;
    for (const auto& [k, v] : kvs) {
        if (!first) std::cout << ' ';
        std::cout << k << '=' << v;
        first = false;
    }
    std::cout << '\n';
}

// ---------------------------------------------------------------- train ---

int cmd_train(const std::string& topology_str, const DataOptions& data,
              TrainConfig cfg, std::uint64_t seed, const std::string& out) {
    const NetworkTopology topology = parse_topology(topology_str);
    cfg.init_seed = GaussianSource::derive_seed(seed, 0);
    cfg.shuffle_seed = GaussianSource::derive_seed(seed, 1);

    const auto train_ds = data.load_train(topology.input_dim(), topology.output_dim());
    const auto test_ds = data.load_test(topology.input_dim(), topology.output_dim());
    if (train_ds.input_dim() != topology.input_dim())
        throw SpecError("dataset input dim " +
                        std::to_string(train_ds.input_dim()) +
                        " does not match topology " + topology.id());

    DenseNetwork net = init_weights(topology, cfg.init_seed);
    log_kv({{"cmd", "train"},
            {"topology", topology.id()},
            {"epochs", std::to_string(cfg.epochs)},
            {"batch", std::to_string(cfg.batch_size)},
            {"seed", std::to_string(seed)},
            {"train_items", std::to_string(train_ds.size())},
            {"test_items", std::to_string(test_ds.size())}});

    const auto t0 = std::chrono::steady_clock::now();
    const TrainReport report = train(net, train_ds, test_ds, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    if (!out.empty()) save_model(net, out);

    log_kv({{"cmd", "train"},
            {"final_loss", std::to_string(report.epoch_loss.back())},
            {"train_acc", std::to_string(report.train_accuracy)},
            {"test_acc", std::to_string(report.test_accuracy)},
            {"seconds", std::to_string(secs)},
            {"model", out.empty() ? "-" : out}});
    // TrainReport as one CSV row.
    std::cout << "topology,epochs,batch,lr,seed,train_acc,test_acc,final_loss\n"
              << topology.id() << ',' << cfg.epochs << ',' << cfg.batch_size
              << ',' << cfg.learning_rate << ',' << seed << ','
              << report.train_accuracy << ',' << report.test_accuracy << ','
              << report.epoch_loss.back() << '\n';
    return 0;
}

// ----------------------------------------------------------------- eval ---

int cmd_eval(const std::string& model_path, const DataOptions& data,
             const std::string& kind, const std::string& stage,
             const std::string& layers, double d, std::size_t reps,
             std::uint64_t seed, unsigned workers) {
    const DenseNetwork net = load_model(model_path);
    const auto test_ds =
        data.load_test(net.topology.input_dim(), net.topology.output_dim());

    NoiseSpec spec;
    spec.stage = parse_stage(stage);
    spec.target_layers = parse_layer_list(layers);
    if (kind == "additive") {
        spec.d_additive = d;
    } else if (kind == "multiplicative") {
        spec.d_multiplicative = d;
    } else if (kind == "both") {
        spec.d_additive = d;
        spec.d_multiplicative = d;
    } else {
        throw SpecError("unknown --noise-kind: '" + kind + "'");
    }

    const auto acc = evaluate_noisy(net, test_ds, spec, reps, seed, workers);
    log_kv({{"cmd", "eval"},
            {"model", model_path},
            {"topology", net.topology.id()},
            {"kind", kind},
            {"stage", stage},
            {"layers", layers},
            {"D", std::to_string(d)},
            {"reps", std::to_string(reps)},
            {"seed", std::to_string(seed)},
            {"acc_mean", std::to_string(acc.mean)},
            {"acc_std", std::to_string(acc.stddev)}});
    return 0;
}

// ---------------------------------------------------------------- stats ---

int cmd_stats(const std::string& model_path, const std::string& csv_out) {
    const DenseNetwork net = load_model(model_path);
    const auto stats = weight_stats(net);

    std::cout << "model=" << model_path << " topology=" << net.topology.id()
              << "\n\n";
    std::cout << "matrix";
    for (const auto& st : stats) std::cout << "\tW^" << st.layer;
    std::cout << "\nmu";
    for (const auto& st : stats) std::cout << '\t' << st.mu;
    std::cout << "\nmu^2";
    for (const auto& st : stats) std::cout << '\t' << st.mu_squared;
    std::cout << "\neta";
    for (const auto& st : stats) std::cout << '\t' << st.eta;
    std::cout << "\nN*eta";
    for (const auto& st : stats) std::cout << '\t' << st.amplification;
    std::cout << '\n';

    if (!csv_out.empty()) {
        std::ofstream f(csv_out);
        if (!f) throw IoError("cannot write: " + csv_out);
        f << "matrix,input_size,mu,mu_squared,eta,amplification\n";
        for (const auto& st : stats)
            f << "W^" << st.layer << ',' << st.input_size << ',' << st.mu
              << ',' << st.mu_squared << ',' << st.eta << ','
              << st.amplification << '\n';
    }
    return 0;
}

// ----------------------------------------------------------------- pool ---

int cmd_pool(const std::string& model_path, std::size_t m,
             const std::string& layers, const std::string& out) {
    const DenseNetwork net = load_model(model_path);
    PoolSpec spec;
    spec.copies = m;
    spec.layers = parse_layer_list(layers);
    const DenseNetwork pooled = apply_pooling(net, spec);
    save_model(pooled, out);
    log_kv({{"cmd", "pool"},
            {"model", model_path},
            {"m", std::to_string(m)},
            {"layers", layers},
            {"out", out},
            {"topology", pooled.topology.id()}});
    return 0;
}

// ---------------------------------------------------------------- sweep ---

int cmd_sweep(const std::string& config_path, const DataOptions& data,
              const std::string& out, unsigned workers_override) {
    SweepConfig cfg = load_sweep_config(config_path);
    if (workers_override > 0) cfg.workers = workers_override;

    std::vector<DenseNetwork> models;
    for (const auto& p : cfg.model_paths) models.push_back(load_model(p));
    const auto test_ds = data.load_test(models[0].topology.input_dim(),
                                        models[0].topology.output_dim());

    const auto result = run_sweep(cfg, models, test_ds);
    emit_csv(result, out);
    log_kv({{"cmd", "sweep"},
            {"config", config_path},
            {"rows", std::to_string(result.rows.size())},
            {"out", out}});
    return 0;
}

// ------------------------------------------------------------ reproduce ---

struct Manifest {
    json doc;
    std::string path;

    void init(const std::string& command_line, std::uint64_t seed) {
        doc["tool_version"] = kVersion;
        doc["command_line"] = command_line;
        doc["config_hash"] =
            "fnv1a:" + std::to_string(fnv1a(command_line));
        doc["seed"] = seed;
        doc["artifacts"] = json::array();
    }
    void flush() const {
        std::ofstream f(path);
        if (!f) throw IoError("cannot write manifest: " + path);
        f << doc.dump(2) << '\n';
    }
    // Marks the artifact in-progress on disk before it is produced so a
    // crash never leaves an unlisted partial file.
    void begin(const std::string& kind, const std::string& file) {
        doc["artifacts"].push_back(
            {{"kind", kind}, {"path", file}, {"status", "incomplete"}});
        flush();
    }
    void complete() {
        doc["artifacts"].back()["status"] = "complete";
        flush();
    }
};

struct ReproOptions {
    DataOptions data;
    std::string out_dir = "reproduce_out";
    std::uint64_t seed = 42;
    std::size_t reps = 10;
    std::size_t epochs = 0;  // 0 = per-topology default
    std::size_t grid_points = 21;
    unsigned workers = 0;
    std::vector<std::string> topologies;  // overrides; full layer lists
};

std::vector<double> make_grid(std::size_t points) {
    std::vector<double> grid;
    for (std::size_t k = 0; k < points; ++k)
        grid.push_back(std::pow(
            10.0, -4.0 + 4.0 * double(k) / double(points - 1)));
    return grid;
}

// One sub-sweep; rows are appended so a figure can mix models, stages and
// per-layer pooling.
void append_sweep(SweepResult& out, const DenseNetwork& net,
                  const LabeledDataset& ds, const std::vector<std::string>& stages,
                  const std::vector<std::string>& kinds,
                  const std::vector<int>& layers, const std::vector<double>& grid,
                  std::size_t reps, std::uint64_t seed, unsigned workers,
                  std::optional<PoolSpec> pooling = std::nullopt) {
    SweepConfig cfg;
    cfg.model_paths = {"<in-memory>"};
    cfg.d_grid = grid;
    cfg.kinds = kinds;
    cfg.stages = stages;
    cfg.layers = layers;
    cfg.repetitions = reps;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.pooling = pooling;
    const auto r = run_sweep(cfg, {net}, ds);
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
}

std::vector<int> hidden_layers_of(const DenseNetwork& net) {
    std::vector<int> layers;
    for (int l = 2; net.topology.is_hidden_layer(l); ++l) layers.push_back(l);
    return layers;
}

int cmd_reproduce(const ReproOptions& opt, const std::string& command_line) {
    fs::create_directories(opt.out_dir);
    Manifest manifest;
    manifest.path = (fs::path(opt.out_dir) / "manifest.json").string();
    manifest.init(command_line, opt.seed);

    const auto t0 = std::chrono::steady_clock::now();

    // Topology list: the standard experiment set by default, caller
    // overrides for smoke runs.
    std::vector<std::string> topo_strs = opt.topologies;
    if (topo_strs.empty()) {
        if (opt.data.synthetic)
            topo_strs = {"8,6,3", "8,6,5,3", "8,6,5,4,3"};
        else
            topo_strs = {"784,20,10",         "784,20,20,10",
                         "784,20,20,20,10",   "784,10,10,10,10",
                         "784,30,30,30,10",   "784,350,250,200,10"};
    }

    std::vector<NetworkTopology> topologies;
    for (const auto& s : topo_strs) topologies.push_back(parse_topology(s));

    const auto train_ds = opt.data.load_train(topologies[0].input_dim(),
                                              topologies[0].output_dim());
    const auto test_ds = opt.data.load_test(topologies[0].input_dim(),
                                            topologies[0].output_dim());

    // --- train all protocol networks -------------------------------------
    std::vector<DenseNetwork> models;
    for (std::size_t i = 0; i < topologies.size(); ++i) {
        const auto& topo = topologies[i];
        TrainConfig cfg;
        cfg.workers = opt.workers;
        if (opt.epochs > 0) cfg.epochs = opt.epochs;
        cfg.init_seed = GaussianSource::derive_seed(opt.seed, 2 * i);
        cfg.shuffle_seed = GaussianSource::derive_seed(opt.seed, 2 * i + 1);

        const std::string model_path =
            (fs::path(opt.out_dir) / ("model_" + topo.id() + ".bin")).string();
        manifest.begin("model", model_path);

        DenseNetwork net = init_weights(topo, cfg.init_seed);
        const TrainReport rep = train(net, train_ds, test_ds, cfg);
        save_model(net, model_path);
        manifest.complete();
        log_kv({{"cmd", "reproduce"},
                {"stage", "train"},
                {"topology", topo.id()},
                {"train_acc", std::to_string(rep.train_accuracy)},
                {"test_acc", std::to_string(rep.test_accuracy)}});
        models.push_back(std::move(net));
    }

    const auto grid = make_grid(opt.grid_points);
    const auto& m_first = models.front();
    const auto& m_second = models.size() > 1 ? models[1] : models.front();
    const auto& m_deep = models.size() > 2 ? models[2] : models.back();
    std::vector<const DenseNetwork*> width_nets;
    if (models.size() > 3)
        for (std::size_t i = 3; i < models.size(); ++i)
            width_nets.push_back(&models[i]);
    else
        width_nets.push_back(&m_deep);

    const std::vector<std::string> both_kinds = {"additive", "multiplicative"};
    std::uint64_t fig_seed = GaussianSource::derive_seed(opt.seed, 1000);
    auto next_seed = [&fig_seed] { return fig_seed++; };

    auto emit_figure = [&](const std::string& name, const SweepResult& rows) {
        const std::string path = (fs::path(opt.out_dir) / name).string();
        manifest.begin("figure_csv", path);
        emit_csv(rows, path);
        manifest.complete();
        log_kv({{"cmd", "reproduce"},
                {"stage", "figure"},
                {"file", name},
                {"rows", std::to_string(rows.rows.size())}});
    };

    // Per-layer pooled sweeps: pooling follows the noisy layer.
    auto pooled_per_layer = [&](SweepResult& rows, const DenseNetwork& net,
                                const std::string& stage) {
        for (int layer : hidden_layers_of(net)) {
            PoolSpec pool;
            pool.copies = 3;
            pool.layers = {layer};
            append_sweep(rows, net, test_ds, {stage}, both_kinds, {layer},
                         grid, opt.reps, next_seed(), opt.workers, pool);
        }
    };

    {  // noise after activation, one and two hidden layers
        SweepResult rows;
        append_sweep(rows, m_first, test_ds, {"after"}, both_kinds,
                     hidden_layers_of(m_first), grid, opt.reps, next_seed(),
                     opt.workers);
        append_sweep(rows, m_second, test_ds, {"after"}, both_kinds,
                     hidden_layers_of(m_second), grid, opt.reps, next_seed(),
                     opt.workers);
        emit_figure("fig2_after_one_two_hidden.csv", rows);
    }
    {  // noise after activation, three hidden layers
        SweepResult rows;
        append_sweep(rows, m_deep, test_ds, {"after"}, both_kinds,
                     hidden_layers_of(m_deep), grid, opt.reps, next_seed(),
                     opt.workers);
        emit_figure("fig3_after_three_hidden.csv", rows);
    }
    {  // noise after activation, hidden-layer width comparison
        SweepResult rows;
        for (const auto* net : width_nets)
            append_sweep(rows, *net, test_ds, {"after"}, both_kinds,
                         hidden_layers_of(*net), grid, opt.reps, next_seed(),
                         opt.workers);
        emit_figure("fig4_after_width.csv", rows);
    }
    {  // pooling m=3 vs none, noise after activation
        SweepResult rows;
        append_sweep(rows, m_deep, test_ds, {"after"}, both_kinds,
                     hidden_layers_of(m_deep), grid, opt.reps, next_seed(),
                     opt.workers);
        pooled_per_layer(rows, m_deep, "after");
        emit_figure("fig5_after_pooling.csv", rows);
    }
    {  // before vs after, one hidden layer
        SweepResult rows;
        append_sweep(rows, m_first, test_ds, {"before", "after"}, both_kinds,
                     hidden_layers_of(m_first), grid, opt.reps, next_seed(),
                     opt.workers);
        emit_figure("fig6_before_vs_after_one_hidden.csv", rows);
    }
    {  // before vs after, three hidden layers
        SweepResult rows;
        append_sweep(rows, m_deep, test_ds, {"before", "after"}, both_kinds,
                     hidden_layers_of(m_deep), grid, opt.reps, next_seed(),
                     opt.workers);
        emit_figure("fig7_before_vs_after_depth.csv", rows);
    }
    {  // before vs after, width comparison
        SweepResult rows;
        for (const auto* net : width_nets)
            append_sweep(rows, *net, test_ds, {"before", "after"}, both_kinds,
                         hidden_layers_of(*net), grid, opt.reps, next_seed(),
                         opt.workers);
        emit_figure("fig8_before_vs_after_width.csv", rows);
    }
    {  // pooling m=3 vs none, noise before activation
        SweepResult rows;
        append_sweep(rows, m_deep, test_ds, {"before"}, both_kinds,
                     hidden_layers_of(m_deep), grid, opt.reps, next_seed(),
                     opt.workers);
        pooled_per_layer(rows, m_deep, "before");
        emit_figure("fig9_before_pooling.csv", rows);
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    manifest.doc["duration_seconds"] = secs;
    manifest.flush();
    log_kv({{"cmd", "reproduce"},
            {"stage", "done"},
            {"seconds", std::to_string(secs)},
            {"manifest", manifest.path}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noise-injection experiments on dense sigmoid MNIST networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string command_line;
    for (int i = 0; i < argc; ++i) {
        if (i) command_line += ' ';
        command_line += argv[i];
    }

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a network");
    std::string topology = "784,20,10", train_out = "model.bin";
    TrainConfig tcfg;
    std::uint64_t train_seed = 42;
    DataOptions train_data;
    train_cmd->add_option("--topology", topology, "Comma-separated layer sizes")
        ->capture_default_str();
    train_cmd->add_option("--epochs", tcfg.epochs)->capture_default_str();
    train_cmd->add_option("--batch", tcfg.batch_size)->capture_default_str();
    train_cmd->add_option("--lr", tcfg.learning_rate)->capture_default_str();
    train_cmd->add_option("--seed", train_seed)->capture_default_str();
    train_cmd->add_option("--out", train_out, "Model checkpoint path")
        ->capture_default_str();
    train_cmd->add_option("--workers", tcfg.workers, "0 = all cores");
    train_cmd->add_flag("--verbose", tcfg.verbose, "Per-epoch loss lines");
    train_data.add_flags(train_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate under noise");
    std::string eval_model, noise_kind = "additive", stage = "after",
                layers = "2";
    double d_value = 0.1;
    std::size_t reps = 10;
    std::uint64_t eval_seed = 7;
    unsigned eval_workers = 0;
    DataOptions eval_data;
    eval_cmd->add_option("--model", eval_model)->required();
    eval_cmd->add_option("--noise-kind", noise_kind,
                         "additive|multiplicative|both")
        ->capture_default_str();
    eval_cmd->add_option("--stage", stage, "before|after")->capture_default_str();
    eval_cmd->add_option("--layers", layers, "Comma-separated hidden layers")
        ->capture_default_str();
    eval_cmd->add_option("--D", d_value, "Noise intensity")->capture_default_str();
    eval_cmd->add_option("--reps", reps)->capture_default_str();
    eval_cmd->add_option("--seed", eval_seed)->capture_default_str();
    eval_cmd->add_option("--workers", eval_workers);
    eval_data.add_flags(eval_cmd);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Weight-matrix statistics");
    std::string stats_model, stats_csv;
    stats_cmd->add_option("--model", stats_model)->required();
    stats_cmd->add_option("--csv", stats_csv, "Also write CSV here");

    // pool
    auto* pool_cmd = app.add_subcommand("pool", "Apply the pooling transform");
    std::string pool_model, pool_layers = "2", pool_out = "pooled.bin";
    std::size_t pool_m = 3;
    pool_cmd->add_option("--model", pool_model)->required();
    pool_cmd->add_option("--m", pool_m, "Copies per neuron")->capture_default_str();
    pool_cmd->add_option("--layers", pool_layers)->capture_default_str();
    pool_cmd->add_option("--out", pool_out)->capture_default_str();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a sweep config");
    std::string sweep_config, sweep_out = "results.csv";
    unsigned sweep_workers = 0;
    DataOptions sweep_data;
    sweep_cmd->add_option("--config", sweep_config, "JSON SweepConfig")
        ->required();
    sweep_cmd->add_option("--out", sweep_out)->capture_default_str();
    sweep_cmd->add_option("--workers", sweep_workers, "0 = all cores");
    sweep_data.add_flags(sweep_cmd);

    // reproduce
    auto* repro_cmd =
        app.add_subcommand("reproduce", "Full experiment suite end to end");
    ReproOptions ropt;
    repro_cmd->add_option("--out-dir", ropt.out_dir)->capture_default_str();
    repro_cmd->add_option("--seed", ropt.seed)->capture_default_str();
    repro_cmd->add_option("--reps", ropt.reps)->capture_default_str();
    repro_cmd->add_option("--epochs", ropt.epochs,
                          "Override training epochs (0 = default 30)");
    repro_cmd->add_option("--grid-points", ropt.grid_points)
        ->capture_default_str();
    repro_cmd->add_option("--workers", ropt.workers, "0 = all cores");
    repro_cmd->add_option("--topologies", ropt.topologies,
                          "Override protocol topologies (repeatable, "
                          "comma-separated layer sizes each)");
    ropt.data.add_flags(repro_cmd);

    try {
        app.parse(argc, argv);
        if (*train_cmd)
            return cmd_train(topology, train_data, tcfg, train_seed, train_out);
        if (*eval_cmd)
            return cmd_eval(eval_model, eval_data, noise_kind, stage, layers,
                            d_value, reps, eval_seed, eval_workers);
        if (*stats_cmd) return cmd_stats(stats_model, stats_csv);
        if (*pool_cmd) return cmd_pool(pool_model, pool_m, pool_layers, pool_out);
        if (*sweep_cmd)
            return cmd_sweep(sweep_config, sweep_data, sweep_out, sweep_workers);
        if (*repro_cmd) return cmd_reproduce(ropt, command_line);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const SpecError& e) {
        std::cerr << "error=usage detail=\"" << e.what() << "\"\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error=data detail=\"" << e.what() << "\"\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error=data detail=\"" << e.what() << "\"\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "error=numeric detail=\"" << e.what() << "\"\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error=numeric detail=\"" << e.what() << "\"\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error=internal detail=\"" << e.what() << "\"\n";
        return 3;
    }
}
