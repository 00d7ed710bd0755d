#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "facaderisk/error.hpp"
#include "facaderisk/evaluate.hpp"
#include "facaderisk/synth.hpp"
#include "test_support.hpp"

using namespace facaderisk;

namespace {

struct EvalFixture {
    std::filesystem::path dir;
    ModelConfig cfg;
    MultiTaskModel model{ModelConfig{}};
    SplitAssignment split;
};

EvalFixture make_fixture(const std::string& name) {
    EvalFixture fx;
    fx.dir = test_support::scratch_dir(name);
    SynthSpec spec;
    spec.n_properties = 40;
    spec.images_per_property_min = 1;
    spec.images_per_property_max = 2;
    spec.seed = 77;
    generate(spec, fx.dir);

    fx.cfg.input_size = 32;
    fx.model = MultiTaskModel(fx.cfg);
    fx.model.init_parameters(5);

    const auto props = load_property_manifest(fx.dir / "properties.jsonl");
    fx.split = split_properties(props.records, 9, 0.5);
    return fx;
}

}  // namespace

TEST_CASE("evaluate_run produces consistent per-image reports") {
    auto fx = make_fixture("eval_run");
    const auto rep = evaluate_run(fx.model, fx.dir / "properties.jsonl",
                                  fx.dir / "images.jsonl", fx.split, Split::Test);
    CHECK(rep.n_images > 0);
    CHECK(rep.year.n == rep.n_images);
    CHECK(rep.structure.n == rep.n_images);
    CHECK(rep.fireproof.n == rep.n_images);
    CHECK(rep.propagation.n == rep.n_images);
    CHECK(rep.year.mae <= rep.year.rmse);

    // confusion row sums equal the per-class true counts in the manifest
    const auto props = load_property_manifest(fx.dir / "properties.jsonl");
    const auto images = load_image_manifest(fx.dir / "images.jsonl");
    std::map<std::string, const PropertyRecord*> by_id;
    for (const auto& p : props.records) by_id[p.property_id] = &p;
    std::map<std::string, long> true_counts;
    for (const auto& img : images.records) {
        const auto* prop = by_id.at(img.property_id);
        if (fx.split.of(img.property_id) == Split::Test) {
            ++true_counts[to_string(prop->structure)];
        }
    }
    for (std::size_t row = 0; row < rep.structure.classes.size(); ++row) {
        long sum = 0;
        for (long v : rep.structure.confusion[row]) sum += v;
        CHECK(sum == true_counts[rep.structure.classes[row]]);
    }
}

TEST_CASE("an empty evaluation slice is an error") {
    auto fx = make_fixture("eval_empty");
    // a split with every property in train leaves nothing to evaluate
    SplitAssignment all_train;
    for (const auto& [id, s] : fx.split.by_property) {
        all_train.by_property[id] = Split::Train;
    }
    CHECK_THROWS_AS(evaluate_run(fx.model, fx.dir / "properties.jsonl",
                                 fx.dir / "images.jsonl", all_train, Split::Test),
                    Error);
}

TEST_CASE("undecodable images are excluded and counted") {
    auto fx = make_fixture("eval_excluded");
    // truncate one test image so it no longer decodes
    const auto images = load_image_manifest(fx.dir / "images.jsonl");
    std::size_t broken = 0;
    for (const auto& img : images.records) {
        if (fx.split.of(img.property_id) == Split::Test) {
            std::ofstream out(resolve_image_path(fx.dir / "images.jsonl", img),
                              std::ios::binary | std::ios::trunc);
            out << "corrupt";
            ++broken;
            break;
        }
    }
    REQUIRE(broken == 1);
    const auto rep = evaluate_run(fx.model, fx.dir / "properties.jsonl",
                                  fx.dir / "images.jsonl", fx.split, Split::Test);
    CHECK(rep.n_excluded == 1);
}

TEST_CASE("the report file carries every section and the confusion grids exist") {
    auto fx = make_fixture("eval_report");
    const auto rep = evaluate_run(fx.model, fx.dir / "properties.jsonl",
                                  fx.dir / "images.jsonl", fx.split, Split::Test);
    const auto out = fx.dir / "report.jsonl";
    write_evaluation_report(out, rep);

    std::ifstream in(out);
    std::string line;
    std::vector<std::string> sections;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        sections.push_back(j.at("section").get<std::string>());
    }
    CHECK(sections == std::vector<std::string>{"meta", "year_regression", "classification",
                                               "classification", "classification",
                                               "propagation"});
    for (const char* name :
         {"confusion_structure.tsv", "confusion_ptype.tsv", "confusion_fireproof.tsv"}) {
        CHECK(std::filesystem::exists(fx.dir / name));
    }

    // grid shape: header + one row per class, all tab-separated
    std::ifstream tsv(fx.dir / "confusion_fireproof.tsv");
    std::vector<std::string> rows;
    while (std::getline(tsv, line)) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "\tH\tT\tM");
    CHECK(rows[1].rfind("H\t", 0) == 0);
}
