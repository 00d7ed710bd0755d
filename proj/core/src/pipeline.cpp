#include "facaderisk/pipeline.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "facaderisk/checkpoint.hpp"
#include "facaderisk/dedup.hpp"
#include "facaderisk/error.hpp"
#include "facaderisk/evaluate.hpp"
#include "facaderisk/hashutil.hpp"
#include "facaderisk/ingest.hpp"

namespace facaderisk {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void PipelineConfig::validate() const {
    if (out_dir.empty()) throw Error("pipeline: out_dir must be set");
    if (!use_synth) {
        if (corpus_properties.empty() || corpus_images.empty()) {
            throw Error("pipeline: external corpus requires corpus_properties and corpus_images");
        }
        if (!fs::exists(corpus_properties)) {
            throw Error("pipeline: missing property manifest: " + corpus_properties.string());
        }
        if (!fs::exists(corpus_images)) {
            throw Error("pipeline: missing image manifest: " + corpus_images.string());
        }
    }
    if (dedup_threshold < 0 || dedup_threshold > 64) {
        throw Error("pipeline: dedup threshold must be in [0, 64]");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error("pipeline: train_fraction must be in (0, 1)");
    }
    if (train.epochs < 0 || train.batch_size < 1 || !(train.learning_rate > 0.0)) {
        throw Error("pipeline: invalid training configuration");
    }
    if (category_filter != "heuristic" && category_filter != "none") {
        throw Error("pipeline: unknown category filter: " + category_filter);
    }
    model.validate();
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config file: " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::exception& e) {
        throw Error("config parse error in " + path.string() + ": " + e.what());
    }

    PipelineConfig cfg;
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        if (s.contains("enabled")) cfg.use_synth = s.at("enabled").get<bool>();
        if (s.contains("n_properties")) cfg.synth.n_properties = s.at("n_properties").get<int>();
        if (s.contains("min_images")) cfg.synth.images_per_property_min = s.at("min_images").get<int>();
        if (s.contains("max_images")) cfg.synth.images_per_property_max = s.at("max_images").get<int>();
        if (s.contains("year_min")) cfg.synth.year_min = s.at("year_min").get<int>();
        if (s.contains("year_max")) cfg.synth.year_max = s.at("year_max").get<int>();
        if (s.contains("cue_strength")) cfg.synth.cue_strength = s.at("cue_strength").get<double>();
        if (s.contains("seed")) cfg.synth.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("image_size")) cfg.synth.image_size = s.at("image_size").get<int>();
        if (s.contains("render_images")) cfg.synth.render_images = s.at("render_images").get<bool>();
        if (s.contains("class_mix")) {
            const auto mix = s.at("class_mix").get<std::vector<double>>();
            if (mix.size() != cfg.synth.class_mix.size()) {
                throw Error("config: class_mix must have 6 weights");
            }
            std::copy(mix.begin(), mix.end(), cfg.synth.class_mix.begin());
        }
    }
    if (j.contains("corpus")) {
        const auto& c = j.at("corpus");
        if (c.contains("properties")) cfg.corpus_properties = c.at("properties").get<std::string>();
        if (c.contains("images")) cfg.corpus_images = c.at("images").get<std::string>();
    }
    if (j.contains("dedup")) {
        const auto& d = j.at("dedup");
        if (d.contains("threshold")) cfg.dedup_threshold = d.at("threshold").get<int>();
        if (d.contains("filter")) cfg.category_filter = d.at("filter").get<std::string>();
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        if (s.contains("seed")) cfg.split_seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("train_fraction")) cfg.train_fraction = s.at("train_fraction").get<double>();
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        if (t.contains("lr")) cfg.train.learning_rate = t.at("lr").get<double>();
        if (t.contains("epochs")) cfg.train.epochs = t.at("epochs").get<int>();
        if (t.contains("batch_size")) cfg.train.batch_size = t.at("batch_size").get<int>();
        if (t.contains("seed")) cfg.train.seed = t.at("seed").get<std::uint64_t>();
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        if (m.contains("input_size")) cfg.model.input_size = m.at("input_size").get<int>();
        if (m.contains("year_anchor")) cfg.model.year_anchor = m.at("year_anchor").get<float>();
        if (m.contains("year_scale")) cfg.model.year_scale = m.at("year_scale").get<float>();
    }
    return cfg;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    ordered_json j;
    j["out_dir"] = cfg.out_dir.generic_string();
    j["synth"] = {
        {"enabled", cfg.use_synth},
        {"n_properties", cfg.synth.n_properties},
        {"min_images", cfg.synth.images_per_property_min},
        {"max_images", cfg.synth.images_per_property_max},
        {"year_min", cfg.synth.year_min},
        {"year_max", cfg.synth.year_max},
        {"cue_strength", cfg.synth.cue_strength},
        {"seed", cfg.synth.seed},
        {"image_size", cfg.synth.image_size},
        {"render_images", cfg.synth.render_images},
        {"class_mix", cfg.synth.class_mix},
    };
    j["corpus"] = {
        {"properties", cfg.corpus_properties.generic_string()},
        {"images", cfg.corpus_images.generic_string()},
    };
    j["dedup"] = {{"threshold", cfg.dedup_threshold}, {"filter", cfg.category_filter}};
    j["split"] = {{"seed", cfg.split_seed}, {"train_fraction", cfg.train_fraction}};
    j["train"] = {
        {"lr", cfg.train.learning_rate},
        {"epochs", cfg.train.epochs},
        {"batch_size", cfg.train.batch_size},
        {"seed", cfg.train.seed},
    };
    j["model"] = {
        {"input_size", cfg.model.input_size},
        {"year_anchor", cfg.model.year_anchor},
        {"year_scale", cfg.model.year_scale},
    };
    return j.dump(2) + "\n";
}

namespace {

// Content-hash stamp of a stage: config subset plus input file hashes.
// A stage is skipped when the stamp matches and its outputs exist.
class Stage {
public:
    Stage(std::string name, fs::path dir) : name_(std::move(name)), dir_(std::move(dir)) {}

    void add_config(const std::string& text) {
        keys_.emplace_back("config", to_hex16(fnv1a64(text)));
    }
    void add_input(const fs::path& file) {
        keys_.emplace_back(file.filename().string(), to_hex16(hash_file(file)));
    }
    void add_output(const fs::path& file) { outputs_.push_back(file); }

    bool up_to_date() const {
        std::ifstream in(dir_ / ".stamp");
        if (!in) return false;
        std::ostringstream existing;
        existing << in.rdbuf();
        if (existing.str() != stamp_text()) return false;
        for (const auto& o : outputs_) {
            if (!fs::exists(o)) return false;
        }
        return true;
    }

    void commit() const {
        std::ofstream out(dir_ / ".stamp");
        if (!out) throw Error("cannot write stamp for stage " + name_);
        out << stamp_text();
    }

    const fs::path& dir() const { return dir_; }

private:
    std::string stamp_text() const {
        std::string s;
        for (const auto& [k, v] : keys_) s += k + '\t' + v + '\n';
        return s;
    }

    std::string name_;
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> keys_;
    std::vector<fs::path> outputs_;
};

void echo_config(const fs::path& dir, const std::string& resolved) {
    std::ofstream out(dir / "config.resolved.json");
    if (out) out << resolved;
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    const std::string resolved = pipeline_config_to_json(cfg);
    echo_config(cfg.out_dir, resolved);

    auto stage_dir = [&](const char* name) {
        const fs::path d = cfg.out_dir / name;
        fs::create_directories(d);
        echo_config(d, resolved);
        return d;
    };

    // ---- corpus -----------------------------------------------------
    fs::path properties_in = cfg.corpus_properties;
    fs::path images_in = cfg.corpus_images;
    if (cfg.use_synth) {
        const fs::path dir = stage_dir("corpus");
        Stage st("corpus", dir);
        {
            ordered_json sj;
            sj["n_properties"] = cfg.synth.n_properties;
            sj["min_images"] = cfg.synth.images_per_property_min;
            sj["max_images"] = cfg.synth.images_per_property_max;
            sj["year_min"] = cfg.synth.year_min;
            sj["year_max"] = cfg.synth.year_max;
            sj["cue_strength"] = cfg.synth.cue_strength;
            sj["seed"] = cfg.synth.seed;
            sj["image_size"] = cfg.synth.image_size;
            sj["render_images"] = cfg.synth.render_images;
            sj["class_mix"] = cfg.synth.class_mix;
            st.add_config(sj.dump());
        }
        st.add_output(dir / "properties.jsonl");
        st.add_output(dir / "images.jsonl");
        if (st.up_to_date()) {
            log << "[pipeline] corpus: skipped (up to date)\n";
        } else {
            log << "[pipeline] corpus: generating " << cfg.synth.n_properties
                << " synthetic properties\n";
            generate(cfg.synth, dir);
            st.commit();
        }
        properties_in = dir / "properties.jsonl";
        images_in = dir / "images.jsonl";
    }

    // ---- ingest -----------------------------------------------------
    const fs::path ingest_dir = stage_dir("ingest");
    {
        Stage st("ingest", ingest_dir);
        st.add_config("ingest-v1");
        st.add_input(properties_in);
        st.add_input(images_in);
        st.add_output(ingest_dir / "properties.jsonl");
        st.add_output(ingest_dir / "images.jsonl");
        if (st.up_to_date()) {
            log << "[pipeline] ingest: skipped (up to date)\n";
        } else {
            const auto s = run_ingest(properties_in, images_in, ingest_dir);
            log << "[pipeline] ingest: retained " << s.properties_retained << "/"
                << s.properties_in << " properties, " << s.images_retained << "/"
                << s.images_in << " images\n";
            st.commit();
        }
    }

    // ---- dedup ------------------------------------------------------
    const fs::path dedup_dir = stage_dir("dedup");
    {
        Stage st("dedup", dedup_dir);
        st.add_config("threshold=" + std::to_string(cfg.dedup_threshold) +
                      ";filter=" + cfg.category_filter);
        st.add_input(ingest_dir / "images.jsonl");
        st.add_output(dedup_dir / "images.jsonl");
        st.add_output(dedup_dir / "hashes.tsv");
        if (st.up_to_date()) {
            log << "[pipeline] dedup: skipped (up to date)\n";
        } else {
            const auto filter = make_category_filter(cfg.category_filter);
            const auto s = run_dedup(ingest_dir / "images.jsonl",
                                     dedup_dir / "images.jsonl",
                                     cfg.dedup_threshold, *filter);
            log << "[pipeline] dedup: retained " << s.images_retained << "/" << s.images_in
                << " images (" << s.duplicate_drops << " near-duplicates, "
                << s.category_drops << " category drops)\n";
            st.commit();
        }
    }

    // ---- split ------------------------------------------------------
    const fs::path split_dir = stage_dir("split");
    {
        Stage st("split", split_dir);
        st.add_config("seed=" + std::to_string(cfg.split_seed) +
                      ";fraction=" + std::to_string(cfg.train_fraction));
        st.add_input(ingest_dir / "properties.jsonl");
        st.add_output(split_dir / "split.tsv");
        if (st.up_to_date()) {
            log << "[pipeline] split: skipped (up to date)\n";
        } else {
            const auto props = load_property_manifest(ingest_dir / "properties.jsonl");
            const auto split = split_properties(props.records, cfg.split_seed,
                                                cfg.train_fraction);
            save_split(split_dir / "split.tsv", split);
            std::size_t train_n = 0;
            for (const auto& [id, s] : split.by_property) {
                if (s == Split::Train) ++train_n;
            }
            log << "[pipeline] split: " << train_n << " train / "
                << (split.by_property.size() - train_n) << " test properties\n";
            st.commit();
        }
    }

    // ---- train ------------------------------------------------------
    const fs::path train_dir = stage_dir("train");
    {
        Stage st("train", train_dir);
        {
            ordered_json tj;
            tj["lr"] = cfg.train.learning_rate;
            tj["epochs"] = cfg.train.epochs;
            tj["batch_size"] = cfg.train.batch_size;
            tj["seed"] = cfg.train.seed;
            tj["input_size"] = cfg.model.input_size;
            tj["year_anchor"] = cfg.model.year_anchor;
            tj["year_scale"] = cfg.model.year_scale;
            st.add_config(tj.dump());
        }
        st.add_input(ingest_dir / "properties.jsonl");
        st.add_input(dedup_dir / "images.jsonl");
        st.add_input(split_dir / "split.tsv");
        st.add_output(train_dir / "model.ckpt");
        st.add_output(train_dir / "loss_trace.tsv");
        if (st.up_to_date()) {
            log << "[pipeline] train: skipped (up to date)\n";
        } else {
            const auto split = load_split(split_dir / "split.tsv");
            const Dataset data =
                load_dataset(ingest_dir / "properties.jsonl", dedup_dir / "images.jsonl",
                             split, Split::Train, cfg.model);
            log << "[pipeline] train: " << data.samples.size() << " images, "
                << cfg.train.epochs << " epochs\n";
            MultiTaskModel model(cfg.model);
            model.init_parameters(cfg.train.seed);
            const TrainStats stats = train_model(model, data, cfg.train);
            save_checkpoint(train_dir / "model.ckpt", model);
            save_loss_trace(train_dir / "loss_trace.tsv", stats);
            if (!stats.epochs.empty()) {
                log << "[pipeline] train: combined loss " << stats.epochs.front().combined
                    << " -> " << stats.epochs.back().combined << "\n";
            }
            st.commit();
        }
    }

    // ---- eval -------------------------------------------------------
    const fs::path eval_dir = stage_dir("eval");
    {
        Stage st("eval", eval_dir);
        st.add_config("eval-v1");
        st.add_input(train_dir / "model.ckpt");
        st.add_input(ingest_dir / "properties.jsonl");
        st.add_input(dedup_dir / "images.jsonl");
        st.add_input(split_dir / "split.tsv");
        st.add_output(eval_dir / "report.jsonl");
        if (st.up_to_date()) {
            log << "[pipeline] eval: skipped (up to date)\n";
        } else {
            const MultiTaskModel model = load_checkpoint(train_dir / "model.ckpt");
            const auto split = load_split(split_dir / "split.tsv");
            const EvaluationReport rep =
                evaluate_run(model, ingest_dir / "properties.jsonl",
                             dedup_dir / "images.jsonl", split, Split::Test);
            write_evaluation_report(eval_dir / "report.jsonl", rep);
            log << "[pipeline] eval: " << rep.n_images << " test images, fireproof accuracy "
                << rep.fireproof.accuracy << "\n";
            st.commit();
        }
    }
}

}  // namespace facaderisk
