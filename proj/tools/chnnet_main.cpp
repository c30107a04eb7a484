// Command-line front end: train single runs, compare FNN against CHNNet
// across seeds, verify gradients against finite differences, print
// trainable-parameter counts and inspect IDX datasets.
//
// Exit codes: 0 ok, 1 check failed, 2 usage/input error, 3 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chnnet/error.hpp"
#include "chnnet/experiment.hpp"
#include "chnnet/gradcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct TrainArgs {
    std::string preset;
    std::string config_path;
    std::string kind = "fnn";
    std::string data_dir;
    std::string out_dir = ".";
    std::string grad_mode = "paper";
    std::string init_scheme = "glorot";
    std::uint64_t seed = 1;
    std::size_t epochs = 0;  // 0 = keep preset/config default
    std::size_t subset = 0;
    bool freeze_w2 = false;
    // which flags were given explicitly, so they override a --config file
    bool seed_set = false;
    bool grad_mode_set = false;
    bool init_set = false;
};

struct CompareArgs {
    std::string preset;
    std::string data_dir;
    std::string out_dir = ".";
    std::size_t seeds = 3;
    std::size_t epochs = 10;
    std::size_t subset = 0;
    std::size_t workers = 2;
    std::string grad_mode = "paper";
};

struct GradcheckArgs {
    std::string arch = "6-6-6-4";
    std::string kind = "chn";
    std::string mode = "exact";
    std::string init_scheme = "glorot";
    std::size_t input_width = 8;
    double eps = 1e-5;
    double tol = 1e-6;
    std::uint64_t seed = 1;
    std::size_t batch = 4;
    std::size_t coords = 200;
};

struct ParamsArgs {
    std::string arch;
    std::string kind = "fnn";
    std::size_t input_width = 784;
};

struct InspectArgs {
    std::string data_dir;
    std::string dataset = "mnist";
    std::string split = "train";
};

chn::LayerKind parse_kind(const std::string& kind) {
    if (kind == "chn") return chn::LayerKind::Chn;
    if (kind == "fnn" || kind == "dense") return chn::LayerKind::Dense;
    throw std::invalid_argument("--kind must be fnn|chn, got '" + kind + "'");
}

chn::GradMode parse_mode(const std::string& mode) {
    if (mode == "paper") return chn::GradMode::Paper;
    if (mode == "exact") return chn::GradMode::Exact;
    throw std::invalid_argument("--mode must be paper|exact, got '" + mode + "'");
}

chn::InitScheme parse_init(const std::string& name) {
    if (name == "glorot") return chn::InitScheme::Glorot;
    if (name == "w2-zero") return chn::InitScheme::W2Zero;
    throw std::invalid_argument("--init must be glorot|w2-zero, got '" + name + "'");
}

std::string resolve_data_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("CHNNET_DATA_DIR")) return env;
    throw std::invalid_argument("no data directory: pass --data-dir or set CHNNET_DATA_DIR");
}

chn::RunConfig config_from_preset(const chn::Preset& preset, chn::LayerKind kind) {
    chn::RunConfig cfg;
    cfg.dataset = preset.dataset;
    const std::string& arch =
        kind == chn::LayerKind::Chn ? preset.chn_arch : preset.fnn_arch;
    cfg.arch = chn::parse_arch(arch, 784, kind);
    cfg.optimizer = preset.optimizer;
    cfg.learning_rate = preset.learning_rate;
    cfg.batch_size = preset.batch_size;
    return cfg;
}

int run_train(const TrainArgs& args) {
    chn::RunConfig cfg;
    if (!args.preset.empty()) {
        const auto preset = chn::find_preset(args.preset);
        if (!preset) {
            throw std::invalid_argument("unknown preset '" + args.preset +
                                        "' (see README for the preset list)");
        }
        cfg = config_from_preset(*preset, parse_kind(args.kind));
        cfg.grad_mode = parse_mode(args.grad_mode);
        cfg.init_scheme = parse_init(args.init_scheme);
        cfg.freeze_w2 = args.freeze_w2;
        cfg.seed = args.seed;
    } else if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::invalid_argument("cannot open config " + args.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = chn::run_config_from_json(buf.str(), 784);
        if (args.seed_set) cfg.seed = args.seed;
        if (args.grad_mode_set) cfg.grad_mode = parse_mode(args.grad_mode);
        if (args.init_set) cfg.init_scheme = parse_init(args.init_scheme);
        if (args.freeze_w2) cfg.freeze_w2 = true;
    } else {
        throw std::invalid_argument("train needs --preset or --config");
    }
    if (args.epochs > 0) cfg.epochs = args.epochs;
    if (args.subset > 0) cfg.subset_size = args.subset;

    const std::string data_dir = resolve_data_dir(args.data_dir);
    const chn::Dataset train_ds = chn::load_dataset(data_dir, cfg.dataset, true);
    const chn::Dataset test_ds = chn::load_dataset(data_dir, cfg.dataset, false);

    const chn::RunReport report = chn::train(cfg, train_ds, test_ds);
    chn::write_run_csv(report, args.out_dir);

    const chn::EpochRow& last = report.epochs.back();
    std::cout << "final: train_loss=" << last.train_loss << " test_loss=" << last.test_loss
              << " test_accuracy=" << last.test_accuracy << "%"
              << " params=" << report.trainable_params << " wall=" << report.wall_seconds
              << "s\n"
              << "csv: " << args.out_dir << "/" << chn::run_csv_filename(report) << "\n";
    return kExitOk;
}

int run_compare(const CompareArgs& args) {
    const auto preset = chn::find_preset(args.preset);
    if (!preset) {
        throw std::invalid_argument("unknown preset '" + args.preset +
                                    "' (see README for the preset list)");
    }
    if (args.seeds < 2) {
        throw std::invalid_argument("compare: t-test needs at least 2 seeds, got " +
                                    std::to_string(args.seeds));
    }
    std::vector<chn::RunConfig> fnn_cfgs, chn_cfgs;
    for (std::size_t i = 0; i < args.seeds; ++i) {
        const std::uint64_t seed = i + 1;
        chn::RunConfig f = config_from_preset(*preset, chn::LayerKind::Dense);
        chn::RunConfig c = config_from_preset(*preset, chn::LayerKind::Chn);
        f.seed = c.seed = seed;
        f.epochs = c.epochs = args.epochs;
        f.subset_size = c.subset_size = args.subset;
        c.grad_mode = parse_mode(args.grad_mode);
        fnn_cfgs.push_back(std::move(f));
        chn_cfgs.push_back(std::move(c));
    }

    const std::string data_dir = resolve_data_dir(args.data_dir);
    const chn::Dataset train_ds = chn::load_dataset(data_dir, preset->dataset, true);
    const chn::Dataset test_ds = chn::load_dataset(data_dir, preset->dataset, false);

    const chn::Comparison cmp =
        chn::compare(fnn_cfgs, chn_cfgs, train_ds, test_ds, args.workers);

    std::filesystem::create_directories(args.out_dir);
    for (const auto& model : {&cmp.fnn, &cmp.chn}) {
        for (const auto& run : model->runs) chn::write_run_csv(run, args.out_dir);
    }
    const std::string base = args.out_dir + "/" + preset->name + "_comparison";
    {
        std::ofstream out(base + ".json");
        out << chn::comparison_json(cmp);
        std::ofstream csv(base + ".csv");
        csv << chn::comparison_csv(cmp);
    }

    std::cout << "fnn: arch=" << cmp.fnn.arch << " params=" << cmp.fnn.trainable_params
              << " loss=" << cmp.fnn.mean_loss << "(+-" << cmp.fnn.std_loss << ")"
              << " acc=" << cmp.fnn.mean_accuracy << "(+-" << cmp.fnn.std_accuracy << ")\n";
    std::cout << "chn: arch=" << cmp.chn.arch << " params=" << cmp.chn.trainable_params
              << " loss=" << cmp.chn.mean_loss << "(+-" << cmp.chn.std_loss << ")"
              << " acc=" << cmp.chn.mean_accuracy << "(+-" << cmp.chn.std_accuracy << ")\n";
    std::cout << "accuracy t=" << cmp.accuracy_test.t_statistic
              << " df=" << cmp.accuracy_test.degrees_of_freedom
              << " p=" << cmp.accuracy_test.p_value << "\n"
              << "written: " << base << ".json, " << base << ".csv\n";
    return kExitOk;
}

int run_gradcheck(const GradcheckArgs& args) {
    const chn::ArchSpec arch =
        chn::parse_arch(args.arch, args.input_width, parse_kind(args.kind));
    chn::Network net(arch, parse_mode(args.mode), parse_init(args.init_scheme), args.seed);

    // Probe batch nudged away from ReLU kinks so central differences see a
    // differentiable function.
    chn::Rng rng(chn::mix_seed(args.seed, chn::RngPurpose::Probe, 1));
    chn::Matrix x(arch.input_width, args.batch);
    chn::Labels y;
    for (int attempt = 0;; ++attempt) {
        for (std::size_t k = 0; k < x.size(); ++k) x.at_index(k) = rng.next_uniform(-1.0, 1.0);
        y.values.clear();
        for (std::size_t j = 0; j < args.batch; ++j) {
            y.values.push_back(static_cast<int>(rng.next_below(arch.output_width)));
        }
        if (net.min_abs_hidden_preactivation(x) >= 1e-4) break;
        if (attempt >= 200) {
            throw chn::NumericError("gradcheck: could not draw a kink-free probe batch");
        }
    }

    chn::GradCheckOptions opt;
    opt.eps = args.eps;
    opt.tol = args.tol;
    opt.max_coords = args.coords;
    opt.seed = args.seed;
    const chn::GradReport report = chn::check_network(net, x, y, opt);

    std::cout << "gradcheck arch=" << args.arch << " kind=" << args.kind
              << " mode=" << args.mode << " eps=" << args.eps << " tol=" << args.tol << "\n";
    for (const auto& p : report.params) {
        std::cout << "  " << p.name << ": max_rel_err=" << p.max_rel_err
                  << " mean_rel_err=" << p.mean_rel_err << " checked=" << p.checked
                  << (p.max_rel_err > args.tol ? "  FAIL" : "") << "\n";
    }
    if (!report.within(args.tol)) {
        std::cout << "FAIL: max relative error " << report.max_rel_err() << " > " << args.tol
                  << " (";
        const auto bad = report.failing(args.tol);
        for (std::size_t i = 0; i < bad.size(); ++i) std::cout << (i ? ", " : "") << bad[i];
        std::cout << ")\n";
        return kExitCheckFailed;
    }
    std::cout << "OK: max relative error " << report.max_rel_err() << "\n";
    return kExitOk;
}

int run_params(const ParamsArgs& args) {
    const chn::ArchSpec arch =
        chn::parse_arch(args.arch, args.input_width, parse_kind(args.kind));
    std::cout << chn::param_count(arch) << "\n";
    return kExitOk;
}

int run_inspect(const InspectArgs& args) {
    const std::string data_dir = resolve_data_dir(args.data_dir);
    const bool train = args.split == "train";
    if (!train && args.split != "test") {
        throw std::invalid_argument("--split must be train|test, got '" + args.split + "'");
    }
    auto [images, labels] = chn::load_dataset_raw(data_dir, args.dataset, train);
    const int classes = chn::dataset_num_classes(args.dataset);

    std::vector<std::size_t> histogram(static_cast<std::size_t>(classes), 0);
    for (int v : labels.values) {
        if (v < 0 || v >= classes) {
            throw std::runtime_error("label " + std::to_string(v) + " out of range for " +
                                     args.dataset);
        }
        ++histogram[static_cast<std::size_t>(v)];
    }
    std::cout << args.dataset << " " << args.split << ": " << images.count << " images of "
              << images.rows << "x" << images.cols << ", " << labels.size() << " labels, "
              << classes << " classes\n";
    std::cout << "class histogram:";
    for (int c = 0; c < classes; ++c) {
        std::cout << " " << c << ":" << histogram[static_cast<std::size_t>(c)];
    }
    std::cout << "\n";
    if (labels.size() != images.count) {
        std::cout << "WARNING: image/label count mismatch\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feed-forward vs laterally-connected (CHN) network experiments"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "Train one run and write its CSV report");
    train_cmd->add_option("--preset", train_args.preset, "Named experiment preset");
    train_cmd->add_option("--config", train_args.config_path, "JSON run configuration");
    train_cmd->add_option("--kind", train_args.kind, "fnn|chn (with --preset)");
    train_cmd->add_option("--data-dir", train_args.data_dir,
                          "IDX data directory (or CHNNET_DATA_DIR)");
    train_cmd->add_option("--out-dir", train_args.out_dir, "Output directory for CSV");
    train_cmd->add_option("--seed", train_args.seed, "Run seed")
        ->each([&](const std::string&) { train_args.seed_set = true; });
    train_cmd->add_option("--epochs", train_args.epochs, "Epoch count override");
    train_cmd->add_option("--subset", train_args.subset, "Train on a seeded subset of n samples");
    train_cmd->add_option("--grad-mode", train_args.grad_mode, "paper|exact")
        ->each([&](const std::string&) { train_args.grad_mode_set = true; });
    train_cmd->add_option("--init", train_args.init_scheme, "glorot|w2-zero")
        ->each([&](const std::string&) { train_args.init_set = true; });
    train_cmd->add_flag("--freeze-w2", train_args.freeze_w2, "Keep W2 at its initial value");

    CompareArgs compare_args;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Run FNN and CHNNet over paired seeds and t-test them");
    compare_cmd->add_option("--preset", compare_args.preset, "Named experiment preset")
        ->required();
    compare_cmd->add_option("--data-dir", compare_args.data_dir,
                            "IDX data directory (or CHNNET_DATA_DIR)");
    compare_cmd->add_option("--out-dir", compare_args.out_dir, "Output directory");
    compare_cmd->add_option("--seeds", compare_args.seeds, "Number of paired seeds (>= 2)");
    compare_cmd->add_option("--epochs", compare_args.epochs, "Epochs per run");
    compare_cmd->add_option("--subset", compare_args.subset, "Seeded training subset size");
    compare_cmd->add_option("--workers", compare_args.workers, "Parallel runs");
    compare_cmd->add_option("--grad-mode", compare_args.grad_mode, "CHN gradients: paper|exact");

    GradcheckArgs gradcheck_args;
    CLI::App* gradcheck_cmd =
        app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
    gradcheck_cmd->add_option("--arch", gradcheck_args.arch, "Hidden widths + output, e.g. 6-6-4");
    gradcheck_cmd->add_option("--kind", gradcheck_args.kind, "fnn|chn");
    gradcheck_cmd->add_option("--mode", gradcheck_args.mode, "paper|exact");
    gradcheck_cmd->add_option("--init", gradcheck_args.init_scheme, "glorot|w2-zero");
    gradcheck_cmd->add_option("--input", gradcheck_args.input_width, "Input width");
    gradcheck_cmd->add_option("--eps", gradcheck_args.eps, "Central-difference step");
    gradcheck_cmd->add_option("--tol", gradcheck_args.tol, "Max relative error accepted");
    gradcheck_cmd->add_option("--seed", gradcheck_args.seed, "Seed for net and probe batch");
    gradcheck_cmd->add_option("--batch", gradcheck_args.batch, "Probe batch size");
    gradcheck_cmd->add_option("--coords", gradcheck_args.coords,
                              "Coordinate sample size for large nets");

    ParamsArgs params_args;
    CLI::App* params_cmd =
        app.add_subcommand("params", "Print the trainable-parameter count of an architecture");
    params_cmd->add_option("arch", params_args.arch, "e.g. 96-96-96-96-10")->required();
    params_cmd->add_option("--kind", params_args.kind, "fnn|chn");
    params_cmd->add_option("--input", params_args.input_width, "Input width (default 784)");

    InspectArgs inspect_args;
    CLI::App* inspect_cmd = app.add_subcommand("inspect-data", "Summarize an IDX dataset");
    inspect_cmd->add_option("--data-dir", inspect_args.data_dir,
                            "IDX data directory (or CHNNET_DATA_DIR)");
    inspect_cmd->add_option("--dataset", inspect_args.dataset, "mnist|fmnist|emnist");
    inspect_cmd->add_option("--split", inspect_args.split, "train|test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return run_train(train_args);
        if (compare_cmd->parsed()) return run_compare(compare_args);
        if (gradcheck_cmd->parsed()) return run_gradcheck(gradcheck_args);
        if (params_cmd->parsed()) return run_params(params_args);
        if (inspect_cmd->parsed()) return run_inspect(inspect_args);
    } catch (const chn::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
