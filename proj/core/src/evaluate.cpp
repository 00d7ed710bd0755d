#include "facaderisk/evaluate.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "facaderisk/error.hpp"
#include "facaderisk/train.hpp"

namespace facaderisk {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

EvaluationReport evaluate_run(const MultiTaskModel& model,
                              const fs::path& properties_path,
                              const fs::path& images_path,
                              const SplitAssignment& split,
                              std::optional<Split> want) {
    const ModelConfig& cfg = model.config();
    const Dataset data = load_dataset(properties_path, images_path, split, want, cfg);
    if (data.samples.empty()) {
        throw Error("evaluate_run: no evaluable images in the selected split");
    }

    const std::size_t n = data.samples.size();
    std::vector<double> year_pred(n), year_true(n);
    std::vector<std::string> s_pred(n), s_true(n), p_pred(n), p_true(n);
    std::vector<std::string> f_pred(n), f_true(n);
    std::vector<std::pair<BuildingStructure, PropertyType>> pair_pred(n), pair_true(n);

    const std::size_t plane = static_cast<std::size_t>(cfg.input_size) * cfg.input_size;
    constexpr std::size_t kEvalBatch = 64;
    Batch batch;
    batch.size = cfg.input_size;
    for (std::size_t start = 0; start < n; start += kEvalBatch) {
        const std::size_t bs = std::min(kEvalBatch, n - start);
        batch.n = static_cast<int>(bs);
        batch.pixels.resize(bs * 3 * plane);
        for (std::size_t b = 0; b < bs; ++b) {
            const auto& rgb = data.samples[start + b].rgb;
            float* dst = batch.pixels.data() + b * 3 * plane;
            for (std::size_t p = 0; p < plane; ++p) {
                dst[p] = rgb[p * 3 + 0] / 255.0f;
                dst[plane + p] = rgb[p * 3 + 1] / 255.0f;
                dst[2 * plane + p] = rgb[p * 3 + 2] / 255.0f;
            }
        }
        const HeadOutputs out = model.forward(batch);
        for (std::size_t b = 0; b < bs; ++b) {
            const std::size_t i = start + b;
            const auto pred = decide_prediction(
                out.year[b],
                std::span<const float>(out.structure_probs)
                    .subspan(b * static_cast<std::size_t>(cfg.n_structure),
                             static_cast<std::size_t>(cfg.n_structure)),
                std::span<const float>(out.ptype_probs)
                    .subspan(b * static_cast<std::size_t>(cfg.n_ptype),
                             static_cast<std::size_t>(cfg.n_ptype)),
                cfg);

            const auto& sample = data.samples[i];
            const auto truth_structure = static_cast<BuildingStructure>(sample.structure);
            const auto truth_ptype = static_cast<PropertyType>(sample.ptype);

            year_pred[i] = pred.year;
            year_true[i] = std::round(static_cast<double>(sample.year_norm) * cfg.year_scale +
                                      cfg.year_anchor);
            s_pred[i] = to_string(pred.structure);
            s_true[i] = to_string(truth_structure);
            p_pred[i] = to_string(pred.ptype);
            p_true[i] = to_string(truth_ptype);
            f_pred[i] = to_string(pred.fireproof);
            f_true[i] = to_string(fireproof_class(truth_structure, truth_ptype));
            pair_pred[i] = {pred.structure, pred.ptype};
            pair_true[i] = {truth_structure, truth_ptype};
        }
    }

    std::vector<std::string> structure_classes, ptype_classes, fireproof_classes;
    for (auto s : kAllStructures) structure_classes.push_back(to_string(s));
    for (auto p : kAllPropertyTypes) ptype_classes.push_back(to_string(p));
    for (auto f : kAllFireproofClasses) fireproof_classes.push_back(to_string(f));

    EvaluationReport rep;
    rep.n_images = n;
    rep.n_excluded = data.excluded;
    rep.excluded_ids = data.excluded_ids;
    rep.year = regression_metrics(year_pred, year_true);
    rep.structure = classification_metrics(s_pred, s_true, structure_classes);
    rep.ptype = classification_metrics(p_pred, p_true, ptype_classes);
    rep.fireproof = classification_metrics(f_pred, f_true, fireproof_classes);
    rep.propagation = propagation_analysis(pair_pred, pair_true);
    return rep;
}

namespace {

ordered_json classification_json(const char* task, const ClassificationReport& r) {
    ordered_json j;
    j["section"] = "classification";
    j["task"] = task;
    j["n"] = r.n;
    j["accuracy"] = r.accuracy;
    j["macro_precision"] = r.macro_precision;
    j["macro_recall"] = r.macro_recall;
    j["macro_f1"] = r.macro_f1;
    j["weighted_f1"] = r.weighted_f1;
    ordered_json per;
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
        per[r.classes[c]] = r.per_class_f1[c];
    }
    j["per_class_f1"] = per;
    return j;
}

void write_confusion_tsv(const fs::path& path, const ClassificationReport& r) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write confusion matrix: " + path.string());
    for (const auto& c : r.classes) out << '\t' << c;
    out << '\n';
    for (std::size_t row = 0; row < r.classes.size(); ++row) {
        out << r.classes[row];
        for (std::size_t col = 0; col < r.classes.size(); ++col) {
            out << '\t' << r.confusion[row][col];
        }
        out << '\n';
    }
}

}  // namespace

void write_evaluation_report(const fs::path& report_path, const EvaluationReport& report) {
    std::ofstream out(report_path);
    if (!out) throw Error("cannot write report: " + report_path.string());

    {
        ordered_json j;
        j["section"] = "meta";
        j["granularity"] = "per_image";
        j["n_images"] = report.n_images;
        j["n_excluded"] = report.n_excluded;
        if (!report.excluded_ids.empty()) j["excluded_ids"] = report.excluded_ids;
        out << j.dump() << '\n';
    }
    {
        ordered_json j;
        j["section"] = "year_regression";
        j["n"] = report.year.n;
        j["mae"] = report.year.mae;
        j["rmse"] = report.year.rmse;
        j["medae"] = report.year.medae;
        out << j.dump() << '\n';
    }
    out << classification_json("structure", report.structure).dump() << '\n';
    out << classification_json("ptype", report.ptype).dump() << '\n';
    out << classification_json("fireproof", report.fireproof).dump() << '\n';
    {
        const auto& p = report.propagation;
        ordered_json j;
        j["section"] = "propagation";
        j["n"] = p.n;
        j["n_fireproof_correct"] = p.n_fireproof_correct;
        j["n_correct_despite_intermediate_error"] = p.n_correct_despite_intermediate_error;
        j["fraction_of_correct"] = p.fraction_of_correct;
        j["fraction_of_all"] = p.fraction_of_all;
        out << j.dump() << '\n';
    }

    const fs::path dir = report_path.parent_path();
    write_confusion_tsv(dir / "confusion_structure.tsv", report.structure);
    write_confusion_tsv(dir / "confusion_ptype.tsv", report.ptype);
    write_confusion_tsv(dir / "confusion_fireproof.tsv", report.fireproof);
}

}  // namespace facaderisk
