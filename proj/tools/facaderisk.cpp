// Command-line front end for the facade risk pipeline. Every subcommand
// accepts --config <file>; explicit flags override config file values.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "facaderisk/checkpoint.hpp"
#include "facaderisk/dedup.hpp"
#include "facaderisk/error.hpp"
#include "facaderisk/evaluate.hpp"
#include "facaderisk/ingest.hpp"
#include "facaderisk/pipeline.hpp"
#include "facaderisk/split.hpp"
#include "facaderisk/synth.hpp"
#include "facaderisk/train.hpp"

namespace fs = std::filesystem;
using namespace facaderisk;

namespace {

// Base configuration: file values when --config was given, defaults
// otherwise. Flags the user typed are overlaid by the callers below.
PipelineConfig base_config(const std::string& config_path) {
    if (config_path.empty()) return PipelineConfig{};
    return load_pipeline_config(config_path);
}

int run_synth(const SynthSpec& spec, const fs::path& out_dir) {
    const SynthResult res = generate(spec, out_dir);
    std::cout << "generated " << res.n_properties << " properties, " << res.n_images
              << " images\n"
              << "  " << res.property_manifest.string() << "\n"
              << "  " << res.image_manifest.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"facade attribute estimation pipeline"};
    app.require_subcommand(1);

    // ---- synth ------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic facade corpus");
    std::string synth_config;
    int n_properties = 100, min_images = 1, max_images = 3;
    int year_min = 1915, year_max = 2025, image_size = 128;
    std::uint64_t synth_seed = 0;
    double cue_strength = 1.0;
    std::vector<double> class_mix;
    bool skip_images = false;
    std::string synth_out;
    synth_cmd->add_option("--config", synth_config, "JSON config file");
    synth_cmd->add_option("--n-properties", n_properties, "number of properties")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
    synth_cmd->add_option("--cue-strength", cue_strength,
                          "cue determinism in [0,1]; 1 = fully deterministic cues")
        ->capture_default_str();
    synth_cmd->add_option("--min-images", min_images, "min images per property")
        ->capture_default_str();
    synth_cmd->add_option("--max-images", max_images, "max images per property")
        ->capture_default_str();
    synth_cmd->add_option("--year-min", year_min, "lower construction year bound")
        ->capture_default_str();
    synth_cmd->add_option("--year-max", year_max, "upper construction year bound")
        ->capture_default_str();
    synth_cmd->add_option("--image-size", image_size, "rendered image side in pixels")
        ->capture_default_str();
    synth_cmd->add_option("--class-mix", class_mix,
                          "6 weights over (structure, ptype) pairs")
        ->expected(6);
    synth_cmd->add_flag("--skip-images", skip_images, "write manifests only");
    synth_cmd->add_option("--out", synth_out, "output directory")->required();

    // ---- ingest -----------------------------------------------------
    auto* ingest_cmd = app.add_subcommand("ingest", "filter metadata and build clean manifests");
    std::string ingest_config, ingest_props, ingest_images, ingest_out;
    ingest_cmd->add_option("--config", ingest_config, "JSON config file");
    ingest_cmd->add_option("--properties", ingest_props, "property manifest")->required();
    ingest_cmd->add_option("--images", ingest_images, "image manifest")->required();
    ingest_cmd->add_option("--out", ingest_out, "output directory")->required();

    // ---- dedup ------------------------------------------------------
    auto* dedup_cmd = app.add_subcommand("dedup",
                                         "drop near-duplicate images and non-facade categories");
    std::string dedup_config, dedup_images, dedup_out, dedup_filter = "heuristic";
    int dedup_threshold = 10;
    dedup_cmd->add_option("--config", dedup_config, "JSON config file");
    dedup_cmd->add_option("--images", dedup_images, "image manifest")->required();
    dedup_cmd->add_option("--threshold", dedup_threshold,
                          "max Hamming distance treated as duplicate")
        ->capture_default_str();
    dedup_cmd->add_option("--filter", dedup_filter, "category filter: heuristic|none")
        ->capture_default_str();
    dedup_cmd->add_option("--out", dedup_out, "output image manifest")->required();

    // ---- split ------------------------------------------------------
    auto* split_cmd = app.add_subcommand("split", "leakage-free property-level train/test split");
    std::string split_config, split_props, split_out;
    std::uint64_t split_seed = 0;
    double train_fraction = 0.8;
    split_cmd->add_option("--config", split_config, "JSON config file");
    split_cmd->add_option("--properties", split_props, "property manifest")->required();
    split_cmd->add_option("--seed", split_seed, "split seed")->capture_default_str();
    split_cmd->add_option("--train-fraction", train_fraction, "train share in (0,1)")
        ->capture_default_str();
    split_cmd->add_option("--out", split_out, "output split file")->required();

    // ---- train ------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train the multi-task model");
    std::string train_config, train_data, train_props, train_images, train_split;
    std::string train_out, train_trace, lr_preset_name;
    double lr = 1e-3, lr_scale = 1.0;
    int epochs = 10, batch_size = 32;
    std::uint64_t train_seed = 0;
    train_cmd->add_option("--config", train_config, "JSON config file");
    train_cmd->add_option("--data", train_data,
                          "directory with properties.jsonl, images.jsonl, split.tsv");
    train_cmd->add_option("--properties", train_props, "property manifest (overrides --data)");
    train_cmd->add_option("--images", train_images, "image manifest (overrides --data)");
    train_cmd->add_option("--split-file", train_split, "split file (overrides --data)");
    train_cmd->add_option("--lr", lr, "learning rate")->capture_default_str();
    train_cmd->add_option("--lr-preset", lr_preset_name,
                          "named preset: paper_high (1e-5) | paper_low (1e-6)");
    train_cmd->add_option("--lr-scale", lr_scale, "multiplier applied to the learning rate")
        ->capture_default_str();
    train_cmd->add_option("--epochs", epochs, "training epochs")->capture_default_str();
    train_cmd->add_option("--batch-size", batch_size, "minibatch size")->capture_default_str();
    train_cmd->add_option("--seed", train_seed, "init/shuffle seed")->capture_default_str();
    train_cmd->add_option("--out", train_out, "output checkpoint")->required();
    train_cmd->add_option("--trace", train_trace,
                          "loss trace TSV (default: loss_trace.tsv next to --out)");

    // ---- eval -------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on one split");
    std::string eval_config, eval_ckpt, eval_manifest, eval_props, eval_split_file;
    std::string eval_split = "test", eval_out;
    eval_cmd->add_option("--config", eval_config, "JSON config file");
    eval_cmd->add_option("--ckpt", eval_ckpt, "model checkpoint")->required();
    eval_cmd->add_option("--manifest", eval_manifest, "image manifest")->required();
    eval_cmd->add_option("--properties", eval_props,
                         "property manifest (default: properties.jsonl next to --manifest)");
    eval_cmd->add_option("--split-file", eval_split_file,
                         "split file (default: split.tsv next to --manifest)");
    eval_cmd->add_option("--split", eval_split, "which partition: test|train|all")
        ->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "output report (JSON lines)")->required();

    // ---- predict ----------------------------------------------------
    auto* predict_cmd = app.add_subcommand("predict", "predict attributes for one image");
    std::string predict_config, predict_ckpt, predict_image;
    predict_cmd->add_option("--config", predict_config, "JSON config file");
    predict_cmd->add_option("--ckpt", predict_ckpt, "model checkpoint")->required();
    predict_cmd->add_option("--image", predict_image, "image file")->required();

    // ---- pipeline ---------------------------------------------------
    auto* pipe_cmd = app.add_subcommand("pipeline", "run every stage with caching");
    std::string pipe_config, pipe_out;
    pipe_cmd->add_option("--config", pipe_config, "JSON config file");
    pipe_cmd->add_option("--out", pipe_out, "output directory (overrides config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            PipelineConfig cfg = base_config(synth_config);
            SynthSpec spec = cfg.synth;
            if (synth_cmd->count("--n-properties")) spec.n_properties = n_properties;
            if (synth_cmd->count("--seed")) spec.seed = synth_seed;
            if (synth_cmd->count("--cue-strength")) spec.cue_strength = cue_strength;
            if (synth_cmd->count("--min-images")) spec.images_per_property_min = min_images;
            if (synth_cmd->count("--max-images")) spec.images_per_property_max = max_images;
            if (synth_cmd->count("--year-min")) spec.year_min = year_min;
            if (synth_cmd->count("--year-max")) spec.year_max = year_max;
            if (synth_cmd->count("--image-size")) spec.image_size = image_size;
            if (synth_cmd->count("--class-mix")) {
                std::copy(class_mix.begin(), class_mix.end(), spec.class_mix.begin());
            }
            if (skip_images) spec.render_images = false;
            return run_synth(spec, synth_out);
        }

        if (ingest_cmd->parsed()) {
            const auto s = run_ingest(ingest_props, ingest_images, ingest_out);
            std::cout << "properties: " << s.properties_retained << "/" << s.properties_in
                      << " retained\nimages: " << s.images_retained << "/" << s.images_in
                      << " retained\nparse diagnostics: " << s.parse_diagnostics << "\n";
            return 0;
        }

        if (dedup_cmd->parsed()) {
            PipelineConfig cfg = base_config(dedup_config);
            int threshold = dedup_cmd->count("--threshold") ? dedup_threshold
                                                            : cfg.dedup_threshold;
            std::string filter_name =
                dedup_cmd->count("--filter") ? dedup_filter : cfg.category_filter;
            const auto filter = make_category_filter(filter_name);
            const auto s = run_dedup(dedup_images, dedup_out, threshold, *filter);
            std::cout << "images: " << s.images_retained << "/" << s.images_in
                      << " retained (" << s.duplicate_drops << " near-duplicates, "
                      << s.category_drops << " category drops)\n";
            return 0;
        }

        if (split_cmd->parsed()) {
            PipelineConfig cfg = base_config(split_config);
            const std::uint64_t seed = split_cmd->count("--seed") ? split_seed : cfg.split_seed;
            const double fraction = split_cmd->count("--train-fraction")
                                        ? train_fraction
                                        : cfg.train_fraction;
            const auto props = load_property_manifest(split_props);
            const auto split = split_properties(props.records, seed, fraction);
            save_split(split_out, split);
            std::size_t train_n = 0;
            for (const auto& [id, s] : split.by_property) {
                if (s == Split::Train) ++train_n;
            }
            std::cout << "split: " << train_n << " train / "
                      << (split.by_property.size() - train_n) << " test\n";
            return 0;
        }

        if (train_cmd->parsed()) {
            PipelineConfig cfg = base_config(train_config);
            TrainConfig tc = cfg.train;
            if (train_cmd->count("--lr")) tc.learning_rate = lr;
            if (train_cmd->count("--lr-preset")) {
                const auto preset = lr_preset(lr_preset_name);
                if (!preset) throw Error("unknown lr preset: " + lr_preset_name);
                tc.learning_rate = *preset;
            }
            if (train_cmd->count("--lr-scale")) tc.learning_rate *= lr_scale;
            if (train_cmd->count("--epochs")) tc.epochs = epochs;
            if (train_cmd->count("--batch-size")) tc.batch_size = batch_size;
            if (train_cmd->count("--seed")) tc.seed = train_seed;

            fs::path props = train_props.empty() ? fs::path(train_data) / "properties.jsonl"
                                                 : fs::path(train_props);
            fs::path images = train_images.empty() ? fs::path(train_data) / "images.jsonl"
                                                   : fs::path(train_images);
            fs::path split_file = train_split.empty() ? fs::path(train_data) / "split.tsv"
                                                      : fs::path(train_split);
            if (train_data.empty() &&
                (train_props.empty() || train_images.empty() || train_split.empty())) {
                throw Error("train: pass --data or all of --properties/--images/--split-file");
            }

            const auto split = load_split(split_file);
            const Dataset data = load_dataset(props, images, split, Split::Train, cfg.model);
            std::cout << "training on " << data.samples.size() << " images ("
                      << data.excluded << " excluded)\n";
            MultiTaskModel model(cfg.model);
            model.init_parameters(tc.seed);
            const TrainStats stats = train_model(model, data, tc);
            save_checkpoint(train_out, model);
            const fs::path trace = train_trace.empty()
                                       ? fs::path(train_out).parent_path() / "loss_trace.tsv"
                                       : fs::path(train_trace);
            save_loss_trace(trace, stats);
            if (!stats.epochs.empty()) {
                std::cout << "combined loss " << stats.epochs.front().combined << " -> "
                          << stats.epochs.back().combined << "\n";
            }
            std::cout << "checkpoint: " << train_out << "\n";
            return 0;
        }

        if (eval_cmd->parsed()) {
            const fs::path manifest(eval_manifest);
            const fs::path props = eval_props.empty()
                                       ? manifest.parent_path() / "properties.jsonl"
                                       : fs::path(eval_props);
            const fs::path split_file = eval_split_file.empty()
                                            ? manifest.parent_path() / "split.tsv"
                                            : fs::path(eval_split_file);
            std::optional<Split> want;
            if (eval_split == "test") want = Split::Test;
            else if (eval_split == "train") want = Split::Train;
            else if (eval_split == "all") want = std::nullopt;
            else throw Error("eval: --split must be test, train or all");

            const MultiTaskModel model = load_checkpoint(eval_ckpt);
            SplitAssignment split;
            if (want) split = load_split(split_file);
            const EvaluationReport rep = evaluate_run(model, props, manifest, split, want);
            write_evaluation_report(eval_out, rep);
            std::printf("images=%zu excluded=%zu\n", rep.n_images, rep.n_excluded);
            std::printf("year: mae=%.3f rmse=%.3f medae=%.3f\n", rep.year.mae,
                        rep.year.rmse, rep.year.medae);
            std::printf("structure: acc=%.4f macro_f1=%.4f\n", rep.structure.accuracy,
                        rep.structure.macro_f1);
            std::printf("ptype: acc=%.4f macro_f1=%.4f\n", rep.ptype.accuracy,
                        rep.ptype.macro_f1);
            std::printf("fireproof: acc=%.4f macro_f1=%.4f\n", rep.fireproof.accuracy,
                        rep.fireproof.macro_f1);
            std::cout << "report: " << eval_out << "\n";
            return 0;
        }

        if (predict_cmd->parsed()) {
            const MultiTaskModel model = load_checkpoint(predict_ckpt);
            const Image img = decode_image(predict_image);
            const Prediction p = predict(model, img);
            std::printf("year=%.2f structure=%s ptype=%s fireproof=%s\n", p.year,
                        to_string(p.structure).c_str(), to_string(p.ptype).c_str(),
                        to_string(p.fireproof).c_str());
            return 0;
        }

        if (pipe_cmd->parsed()) {
            PipelineConfig cfg = base_config(pipe_config);
            if (pipe_cmd->count("--out")) cfg.out_dir = pipe_out;
            run_pipeline(cfg, std::cout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
