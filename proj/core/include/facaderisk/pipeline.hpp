#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "facaderisk/net.hpp"
#include "facaderisk/synth.hpp"
#include "facaderisk/train.hpp"

namespace facaderisk {

/// Resolved configuration for the full run. Serializable to one JSON
/// file; the CLI overlays flags on top of the file, and the resolved
/// result is echoed into every output directory for provenance.
struct PipelineConfig {
    std::filesystem::path out_dir = "run";

    bool use_synth = true;    // when false, corpus_* point at external manifests
    SynthSpec synth;
    std::filesystem::path corpus_properties;
    std::filesystem::path corpus_images;

    int dedup_threshold = 10;
    std::string category_filter = "heuristic";

    std::uint64_t split_seed = 0;
    double train_fraction = 0.8;

    TrainConfig train;
    ModelConfig model;

    void validate() const;  // throws before any work happens
};

/// Reads a config file (missing keys keep their defaults).
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

std::string pipeline_config_to_json(const PipelineConfig& cfg);

/// Executes corpus -> ingest -> dedup -> split -> train -> eval in order.
/// Each stage directory carries a `.stamp` of its input content hashes
/// and config subset; a stage whose stamp matches and whose outputs exist
/// is skipped, so a rerun is a no-op and corrupting one input re-executes
/// only the stages downstream of it.
void run_pipeline(const PipelineConfig& cfg, std::ostream& log);

}  // namespace facaderisk
