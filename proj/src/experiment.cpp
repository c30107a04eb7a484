#include "chnnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "chnnet/error.hpp"
#include "chnnet/optim.hpp"
#include "json.hpp"

namespace chn {

namespace {

using nlohmann::json;

std::size_t parse_width(const std::string& token, const std::string& full) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(token, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_arch: bad width '" + token + "' in \"" + full + "\"");
    }
    if (pos != token.size() || v == 0) {
        throw std::invalid_argument("parse_arch: bad width '" + token + "' in \"" + full + "\"");
    }
    return static_cast<std::size_t>(v);
}

double final_loss(const RunReport& r) { return r.epochs.back().test_loss; }
double final_accuracy(const RunReport& r) { return r.epochs.back().test_accuracy; }

ModelSummary summarize(const std::string& arch, std::size_t params,
                       std::vector<RunReport> runs) {
    ModelSummary s;
    s.arch = arch;
    s.trainable_params = params;
    SampleSet losses, accs;
    for (const auto& r : runs) {
        losses.values.push_back(final_loss(r));
        accs.values.push_back(final_accuracy(r));
    }
    std::tie(s.mean_loss, s.std_loss) = mean_std(losses);
    std::tie(s.mean_accuracy, s.std_accuracy) = mean_std(accs);
    s.runs = std::move(runs);
    return s;
}

json model_summary_json(const ModelSummary& m) {
    json per_seed = json::array();
    for (const auto& r : m.runs) {
        per_seed.push_back({{"seed", r.config.seed},
                            {"final_loss", final_loss(r)},
                            {"final_accuracy", final_accuracy(r)},
                            {"wall_seconds", r.wall_seconds}});
    }
    return {{"arch", m.arch},
            {"trainable_params", m.trainable_params},
            {"mean_loss", m.mean_loss},
            {"std_loss", m.std_loss},
            {"mean_accuracy", m.mean_accuracy},
            {"std_accuracy", m.std_accuracy},
            {"per_seed", per_seed}};
}

}  // namespace

ArchSpec parse_arch(const std::string& s, std::size_t input_width, LayerKind kind) {
    std::vector<std::size_t> widths;
    std::stringstream ss(s);
    std::string token;
    while (std::getline(ss, token, '-')) widths.push_back(parse_width(token, s));
    if (widths.size() < 2) {
        throw std::invalid_argument("parse_arch: \"" + s +
                                    "\" needs at least one hidden width and an output width");
    }
    ArchSpec arch;
    arch.input_width = input_width;
    arch.output_width = widths.back();
    widths.pop_back();
    arch.hidden_widths = std::move(widths);
    arch.layer_kind = kind;
    return arch;
}

std::string arch_to_string(const ArchSpec& arch) {
    std::string s;
    for (std::size_t w : arch.hidden_widths) s += std::to_string(w) + "-";
    s += std::to_string(arch.output_width);
    return s;
}

Network build_network(const RunConfig& cfg) {
    return Network(cfg.arch, cfg.grad_mode, cfg.init_scheme, cfg.seed);
}

std::pair<double, double> evaluate(const Network& net, const Dataset& ds) {
    constexpr std::size_t kChunk = 1024;
    const std::size_t n = ds.features.cols();
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t len = std::min(kChunk, n - start);
        Matrix x(ds.features.rows(), len);
        for (std::size_t j = 0; j < len; ++j)
            for (std::size_t i = 0; i < ds.features.rows(); ++i)
                x(i, j) = ds.features(i, start + j);
        const Matrix probs = net.predict(x);
        for (std::size_t j = 0; j < len; ++j) {
            const int label = ds.labels.values[start + j];
            loss_sum -= std::log(std::max(probs(static_cast<std::size_t>(label), j), 1e-12));
            std::size_t argmax = 0;
            for (std::size_t i = 1; i < probs.rows(); ++i) {
                if (probs(i, j) > probs(argmax, j)) argmax = i;
            }
            if (argmax == static_cast<std::size_t>(label)) ++correct;
        }
    }
    return {loss_sum / static_cast<double>(n),
            100.0 * static_cast<double>(correct) / static_cast<double>(n)};
}

RunReport train(const RunConfig& cfg, const Dataset& train_ds, const Dataset& test_ds) {
    if (cfg.epochs == 0) throw std::invalid_argument("train: epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) {
        throw std::invalid_argument("train: learning rate must be positive");
    }
    if (train_ds.features.rows() != cfg.arch.input_width) {
        throw std::invalid_argument("train: dataset width " +
                                    std::to_string(train_ds.features.rows()) +
                                    " does not match architecture input " +
                                    std::to_string(cfg.arch.input_width));
    }
    const auto t0 = std::chrono::steady_clock::now();

    Dataset local;
    const Dataset* data = &train_ds;
    if (cfg.subset_size > 0 && cfg.subset_size < train_ds.features.cols()) {
        local = subset(train_ds, cfg.subset_size, cfg.seed);
        data = &local;
    }

    Network net = build_network(cfg);
    auto slots = net.param_slots();
    std::vector<OptState> states;
    if (cfg.optimizer == OptKind::Rmsprop) {
        states.reserve(slots.size());
        for (const auto& s : slots) {
            states.push_back(
                make_rmsprop_state(s.value->rows(), s.value->cols(), cfg.learning_rate));
        }
    }

    RunReport report;
    report.config = cfg;
    report.trainable_params = net.trainable_param_count();

    const BatchPlan plan{cfg.batch_size, cfg.seed, false};
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<Batch> epoch_batches = batches(*data, plan, epoch);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < epoch_batches.size(); ++b) {
            const Batch& batch = epoch_batches[b];
            const Network::ForwardState fs = net.forward(batch.x);
            const double loss = sparse_ce_loss(fs.probs, batch.y);
            if (!std::isfinite(loss)) {
                throw NumericError("train: non-finite loss at epoch " +
                                   std::to_string(epoch + 1) + ", batch " +
                                   std::to_string(b + 1));
            }
            loss_sum += loss;
            const std::vector<Matrix> grads = net.backward(fs, batch.y);
            for (std::size_t s = 0; s < slots.size(); ++s) {
                if (slots[s].is_w2 && cfg.freeze_w2) continue;
                if (cfg.optimizer == OptKind::Sgd) {
                    *slots[s].value = sgd_step(*slots[s].value, grads[s], cfg.learning_rate);
                } else {
                    auto [next, next_state] =
                        rmsprop_step(*slots[s].value, grads[s], std::move(states[s]));
                    *slots[s].value = std::move(next);
                    states[s] = std::move(next_state);
                }
            }
        }
        EpochRow row;
        row.train_loss = loss_sum / static_cast<double>(epoch_batches.size());
        std::tie(row.test_loss, row.test_accuracy) = evaluate(net, test_ds);
        report.epochs.push_back(row);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

Comparison compare(const std::vector<RunConfig>& cfgs_fnn,
                   const std::vector<RunConfig>& cfgs_chn, const Dataset& train_ds,
                   const Dataset& test_ds, std::size_t workers) {
    if (cfgs_fnn.size() != cfgs_chn.size()) {
        throw std::invalid_argument("compare: " + std::to_string(cfgs_fnn.size()) +
                                    " FNN configs vs " + std::to_string(cfgs_chn.size()) +
                                    " CHN configs (seed counts must match)");
    }
    if (cfgs_fnn.size() < 2) {
        throw std::invalid_argument("compare: t-test needs at least 2 seeds per side, got " +
                                    std::to_string(cfgs_fnn.size()));
    }

    std::vector<RunConfig> jobs;
    jobs.insert(jobs.end(), cfgs_fnn.begin(), cfgs_fnn.end());
    jobs.insert(jobs.end(), cfgs_chn.begin(), cfgs_chn.end());
    std::vector<RunReport> results(jobs.size());

    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            results[i] = train(jobs[i], train_ds, test_ds);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < jobs.size();
                         i = next.fetch_add(1)) {
                        results[i] = train(jobs[i], train_ds, test_ds);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    Comparison cmp;
    cmp.dataset = cfgs_fnn.front().dataset;
    for (const auto& c : cfgs_fnn) cmp.seeds.push_back(c.seed);
    std::vector<RunReport> fnn_runs(results.begin(),
                                    results.begin() + static_cast<long>(cfgs_fnn.size()));
    std::vector<RunReport> chn_runs(results.begin() + static_cast<long>(cfgs_fnn.size()),
                                    results.end());
    cmp.fnn = summarize(arch_to_string(cfgs_fnn.front().arch),
                        param_count(cfgs_fnn.front().arch), std::move(fnn_runs));
    cmp.chn = summarize(arch_to_string(cfgs_chn.front().arch),
                        param_count(cfgs_chn.front().arch), std::move(chn_runs));

    SampleSet fnn_acc, chn_acc;
    for (const auto& r : cmp.fnn.runs) fnn_acc.values.push_back(final_accuracy(r));
    for (const auto& r : cmp.chn.runs) chn_acc.values.push_back(final_accuracy(r));
    cmp.accuracy_test = welch_t(fnn_acc, chn_acc);
    return cmp;
}

const std::vector<Preset>& benchmark_presets() {
    static const std::vector<Preset> presets = {
        // mnist: RMSprop 1e-4, batch 512
        {"mnist-arch-1", "mnist", "96-96-96-96-10", "96-96-96-96-10", OptKind::Rmsprop, 1e-4,
         512},
        {"mnist-arch-2", "mnist", "256-256-256-256-256-256-10", "256-256-256-256-256-256-10",
         OptKind::Rmsprop, 1e-4, 512},
        {"mnist-arch-3", "mnist", "288-256-224-192-160-128-96-64-10",
         "288-256-224-192-160-128-96-64-10", OptKind::Rmsprop, 1e-4, 512},
        {"mnist-arch-4", "mnist", "126-126-126-126-10", "96-96-96-96-10", OptKind::Rmsprop,
         1e-4, 512},
        {"mnist-arch-5", "mnist", "360-360-360-360-360-360-10", "256-256-256-256-256-256-10",
         OptKind::Rmsprop, 1e-4, 512},
        {"mnist-arch-6", "mnist", "360-334-304-268-238-208-176-142-10",
         "288-256-224-192-160-128-96-64-10", OptKind::Rmsprop, 1e-4, 512},
        // fmnist: SGD 1e-3, batch 32
        {"fmnist-arch-1", "fmnist", "512-512-512-10", "512-512-512-10", OptKind::Sgd, 1e-3, 32},
        {"fmnist-arch-2", "fmnist", "256-256-256-256-256-256-10", "256-256-256-256-256-256-10",
         OptKind::Sgd, 1e-3, 32},
        {"fmnist-arch-3", "fmnist", "928-800-672-544-416-288-160-32-10",
         "928-800-672-544-416-288-160-32-10", OptKind::Sgd, 1e-3, 32},
        {"fmnist-arch-4", "fmnist", "749-749-749-10", "512-512-512-10", OptKind::Sgd, 1e-3, 32},
        {"fmnist-arch-5", "fmnist", "358-358-358-358-358-358-10", "256-256-256-256-256-256-10",
         OptKind::Sgd, 1e-3, 32},
        {"fmnist-arch-6", "fmnist", "1184-1056-928-800-704-604-448-352-10",
         "928-800-672-544-416-288-160-32-10", OptKind::Sgd, 1e-3, 32},
        // emnist: SGD 1e-3, batch 32
        {"emnist-arch-1", "emnist", "768-768-768-62", "768-768-768-62", OptKind::Sgd, 1e-3, 32},
        {"emnist-arch-2", "emnist", "320-320-320-320-320-320-62", "320-320-320-320-320-320-62",
         OptKind::Sgd, 1e-3, 32},
        {"emnist-arch-3", "emnist", "1024-896-768-640-512-384-256-128-62",
         "1024-896-768-640-512-384-256-128-62", OptKind::Sgd, 1e-3, 32},
        {"emnist-arch-4", "emnist", "1152-1152-1152-62", "768-768-768-62", OptKind::Sgd, 1e-3,
         32},
        {"emnist-arch-5", "emnist", "412-412-412-412-412-412-62", "320-320-320-320-320-320-62",
         OptKind::Sgd, 1e-3, 32},
        {"emnist-arch-6", "emnist", "1272-1144-1016-978-760-632-504-376-62",
         "1024-896-768-640-512-384-256-128-62", OptKind::Sgd, 1e-3, 32},
    };
    return presets;
}

std::optional<Preset> find_preset(const std::string& name) {
    for (const auto& p : benchmark_presets()) {
        if (p.name == name) return p;
    }
    return std::nullopt;
}

std::string layer_kind_name(LayerKind kind) {
    return kind == LayerKind::Chn ? "chn" : "fnn";
}

std::string grad_mode_name(GradMode mode) {
    return mode == GradMode::Paper ? "paper" : "exact";
}

std::string optimizer_name(OptKind kind) {
    return kind == OptKind::Sgd ? "sgd" : "rmsprop";
}

std::string run_csv(const RunReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,train_loss,test_loss,test_accuracy\n";
    for (std::size_t e = 0; e < report.epochs.size(); ++e) {
        const EpochRow& r = report.epochs[e];
        out << (e + 1) << "," << r.train_loss << "," << r.test_loss << "," << r.test_accuracy
            << "\n";
    }
    return out.str();
}

std::string run_csv_filename(const RunReport& report) {
    return report.config.dataset + "_" + arch_to_string(report.config.arch) + "_" +
           layer_kind_name(report.config.arch.layer_kind) + "_" +
           std::to_string(report.config.seed) + ".csv";
}

void write_run_csv(const RunReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/" + run_csv_filename(report);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << run_csv(report);
}

std::string comparison_json(const Comparison& cmp) {
    json j;
    j["dataset"] = cmp.dataset;
    j["seeds"] = cmp.seeds;
    j["method"] = {{"t_test", "welch"},
                   {"std_ddof", 1},
                   {"loss_metric", "final-epoch test loss"},
                   {"accuracy_metric", "final-epoch test accuracy (percent)"},
                   {"t_sign_convention", "mean(fnn) - mean(chn)"}};
    j["models"] = {{"fnn", model_summary_json(cmp.fnn)}, {"chn", model_summary_json(cmp.chn)}};
    const double t = cmp.accuracy_test.t_statistic;
    j["accuracy_t_test"] = {
        {"t_statistic", std::isfinite(t) ? json(t) : json(t > 0 ? "inf" : "-inf")},
        {"degrees_of_freedom", cmp.accuracy_test.degrees_of_freedom},
        {"p_value", cmp.accuracy_test.p_value},
        {"two_sided", cmp.accuracy_test.two_sided}};
    return j.dump(2) + "\n";
}

std::string comparison_csv(const Comparison& cmp) {
    std::ostringstream out;
    out.precision(17);
    out << "model,arch,trainable_params,mean_loss,std_loss,mean_accuracy,std_accuracy,"
           "t_statistic,p_value\n";
    const auto row = [&](const char* name, const ModelSummary& m) {
        out << name << "," << m.arch << "," << m.trainable_params << "," << m.mean_loss << ","
            << m.std_loss << "," << m.mean_accuracy << "," << m.std_accuracy << ","
            << cmp.accuracy_test.t_statistic << "," << cmp.accuracy_test.p_value << "\n";
    };
    row("fnn", cmp.fnn);
    row("chn", cmp.chn);
    return out.str();
}

RunConfig run_config_from_json(const std::string& json_text, std::size_t input_width) {
    const json j = json::parse(json_text);
    static const char* known[] = {"dataset",    "arch",        "layer_kind", "optimizer",
                                  "learning_rate", "batch_size", "epochs",     "seed",
                                  "grad_mode",  "init_scheme", "freeze_w2",  "subset"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known)) {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    RunConfig cfg;
    cfg.dataset = j.at("dataset").get<std::string>();

    const std::string kind_name = j.value("layer_kind", "fnn");
    LayerKind kind;
    if (kind_name == "chn") {
        kind = LayerKind::Chn;
    } else if (kind_name == "fnn" || kind_name == "dense") {
        kind = LayerKind::Dense;
    } else {
        throw std::invalid_argument("config: layer_kind must be fnn|dense|chn, got '" +
                                    kind_name + "'");
    }
    cfg.arch = parse_arch(j.at("arch").get<std::string>(), input_width, kind);

    const std::string opt_name = j.value("optimizer", "rmsprop");
    if (opt_name == "sgd") {
        cfg.optimizer = OptKind::Sgd;
    } else if (opt_name == "rmsprop") {
        cfg.optimizer = OptKind::Rmsprop;
    } else {
        throw std::invalid_argument("config: optimizer must be sgd|rmsprop, got '" + opt_name +
                                    "'");
    }
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.seed = j.value("seed", cfg.seed);

    const std::string mode_name = j.value("grad_mode", "paper");
    if (mode_name == "paper") {
        cfg.grad_mode = GradMode::Paper;
    } else if (mode_name == "exact") {
        cfg.grad_mode = GradMode::Exact;
    } else {
        throw std::invalid_argument("config: grad_mode must be paper|exact, got '" + mode_name +
                                    "'");
    }
    const std::string init_name = j.value("init_scheme", "glorot");
    if (init_name == "glorot") {
        cfg.init_scheme = InitScheme::Glorot;
    } else if (init_name == "w2-zero") {
        cfg.init_scheme = InitScheme::W2Zero;
    } else {
        throw std::invalid_argument("config: init_scheme must be glorot|w2-zero, got '" +
                                    init_name + "'");
    }
    cfg.freeze_w2 = j.value("freeze_w2", false);
    cfg.subset_size = j.value("subset", static_cast<std::size_t>(0));
    if (cfg.epochs == 0) throw std::invalid_argument("config: epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) {
        throw std::invalid_argument("config: learning_rate must be positive");
    }
    return cfg;
}

}  // namespace chn
