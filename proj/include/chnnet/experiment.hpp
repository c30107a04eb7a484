#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chnnet/idx.hpp"
#include "chnnet/network.hpp"
#include "chnnet/stats.hpp"

namespace chn {

enum class OptKind { Sgd, Rmsprop };

struct RunConfig {
    ArchSpec arch;
    OptKind optimizer = OptKind::Rmsprop;
    double learning_rate = 1e-4;
    std::size_t batch_size = 512;
    std::size_t epochs = 30;
    std::uint64_t seed = 1;
    GradMode grad_mode = GradMode::Paper;
    InitScheme init_scheme = InitScheme::Glorot;
    bool freeze_w2 = false;  // keep W2 fixed at its initial value
    std::string dataset = "mnist";
    std::size_t subset_size = 0;  // 0 = full training set
};

struct EpochRow {
    double train_loss = 0.0;
    double test_loss = 0.0;
    double test_accuracy = 0.0;  // percent
};

struct RunReport {
    std::vector<EpochRow> epochs;
    std::size_t trainable_params = 0;
    double wall_seconds = 0.0;  // excluded from determinism guarantees
    RunConfig config;
};

// "96-96-96-96-10": last entry is the output width, the rest hidden widths;
// the input width comes from the dataset.
ArchSpec parse_arch(const std::string& s, std::size_t input_width, LayerKind kind);
std::string arch_to_string(const ArchSpec& arch);

Network build_network(const RunConfig& cfg);

// loss (mean cross-entropy) and accuracy in percent, computed over all
// samples in deterministic order.
std::pair<double, double> evaluate(const Network& net, const Dataset& ds);

RunReport train(const RunConfig& cfg, const Dataset& train_ds, const Dataset& test_ds);

struct ModelSummary {
    std::string arch;
    std::size_t trainable_params = 0;
    double mean_loss = 0.0, std_loss = 0.0;
    double mean_accuracy = 0.0, std_accuracy = 0.0;
    std::vector<RunReport> runs;
};

struct Comparison {
    std::string dataset;
    std::vector<std::uint64_t> seeds;
    ModelSummary fnn;
    ModelSummary chn;
    TTestResult accuracy_test;  // sign: mean(FNN) - mean(CHN)
};

// Runs both model families over paired seeds (seed i shares data shuffles on
// both sides) and summarizes final-epoch loss/accuracy plus a Welch t-test
// on the accuracies. Config lists must pair up one seed per entry.
Comparison compare(const std::vector<RunConfig>& cfgs_fnn,
                   const std::vector<RunConfig>& cfgs_chn, const Dataset& train_ds,
                   const Dataset& test_ds, std::size_t workers = 1);

// Named experiment configurations matching the published setups. arch-1..3
// pair identical widths; arch-4..6 pair a widened dense net against the
// corresponding arch-1..3 CHN net.
struct Preset {
    std::string name;
    std::string dataset;
    std::string fnn_arch;
    std::string chn_arch;
    OptKind optimizer;
    double learning_rate;
    std::size_t batch_size;
};

const std::vector<Preset>& benchmark_presets();
std::optional<Preset> find_preset(const std::string& name);

// File outputs. CSV rows: epoch,train_loss,test_loss,test_accuracy.
std::string run_csv(const RunReport& report);
std::string run_csv_filename(const RunReport& report);
void write_run_csv(const RunReport& report, const std::string& out_dir);

std::string comparison_json(const Comparison& cmp);
std::string comparison_csv(const Comparison& cmp);

// JSON config round-trip for the CLI (--config). Unknown keys are rejected.
RunConfig run_config_from_json(const std::string& json_text, std::size_t input_width);

std::string layer_kind_name(LayerKind kind);
std::string grad_mode_name(GradMode mode);
std::string optimizer_name(OptKind kind);

}  // namespace chn
