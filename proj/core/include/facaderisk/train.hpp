#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "facaderisk/net.hpp"
#include "facaderisk/split.hpp"

namespace facaderisk {

/// Learning-rate presets from the reference configuration (tuned for a
/// large pretrained backbone; the compact model defaults to 1e-3).
inline constexpr double kLrPresetPaperHigh = 1e-5;
inline constexpr double kLrPresetPaperLow = 1e-6;
std::optional<double> lr_preset(const std::string& name);  // paper_high | paper_low

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 10;
    int batch_size = 32;
    std::uint64_t seed = 0;
};

/// Per-epoch training averages (losses are per-sample means over the
/// epoch; log-variances are the values after the epoch's last step).
struct EpochStats {
    int epoch = 0;
    double combined = 0.0;
    double year_mse = 0.0;
    double structure_ce = 0.0;
    double ptype_ce = 0.0;
    std::array<double, kNumTasks> log_vars{};
};

struct TrainStats {
    std::vector<EpochStats> epochs;
};

/// One preprocessed training sample: resized RGB bytes plus targets.
struct LabeledImage {
    std::string image_id;
    std::vector<std::uint8_t> rgb;  // input_size^2 * 3, interleaved
    float year_norm = 0.0f;
    int structure = 0;
    int ptype = 0;
};

struct Dataset {
    int image_size = 0;
    std::vector<LabeledImage> samples;
    std::size_t excluded = 0;                // undecodable images skipped at load
    std::vector<std::string> excluded_ids;   // their image_ids, in manifest order
};

/// Loads the images of one split, resized to image_size, with targets
/// derived from the property manifest. `want == nullopt` loads all.
Dataset load_dataset(const std::filesystem::path& properties_path,
                     const std::filesystem::path& images_path,
                     const SplitAssignment& split, std::optional<Split> want,
                     const ModelConfig& cfg);

/// Adam over minibatches (beta1 0.9, beta2 0.999, eps 1e-8), optimizing
/// backbone, heads and log-variances jointly. Deterministic given
/// config.seed. Throws on an empty dataset and aborts with a diagnostic
/// naming the epoch/batch if the loss turns non-finite.
TrainStats train_model(MultiTaskModel& model, const Dataset& data,
                       const TrainConfig& config);

/// Loss trace file: TSV with one row per epoch
/// (epoch, combined, year_mse, structure_ce, ptype_ce, s_year,
///  s_structure, s_ptype).
void save_loss_trace(const std::filesystem::path& path, const TrainStats& stats);

}  // namespace facaderisk
