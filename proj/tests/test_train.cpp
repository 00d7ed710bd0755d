#include <doctest.h>

#include "facaderisk/error.hpp"
#include "facaderisk/split.hpp"
#include "facaderisk/synth.hpp"
#include "facaderisk/train.hpp"
#include "test_support.hpp"

using namespace facaderisk;

namespace {

// small high-cue corpus shared across the cases in this file
struct Fixture {
    std::filesystem::path dir;
    ModelConfig cfg;
    Dataset data;
};

const Fixture& fixture() {
    static Fixture f = [] {
        Fixture fx;
        fx.dir = test_support::scratch_dir("train_corpus");
        SynthSpec spec;
        spec.n_properties = 200;
        spec.images_per_property_min = 1;
        spec.images_per_property_max = 1;
        spec.seed = 303;
        spec.cue_strength = 1.0;
        generate(spec, fx.dir);

        fx.cfg.input_size = 64;  // quarter the compute of the full model
        const auto props = load_property_manifest(fx.dir / "properties.jsonl");
        const auto split = split_properties(props.records, 1, 0.999);  // ~all train
        fx.data = load_dataset(fx.dir / "properties.jsonl", fx.dir / "images.jsonl", split,
                               Split::Train, fx.cfg);
        return fx;
    }();
    return f;
}

}  // namespace

TEST_CASE("five epochs on a learnable corpus reduce the combined loss") {
    const Fixture& fx = fixture();
    REQUIRE(fx.data.samples.size() >= 190);

    MultiTaskModel model(fx.cfg);
    model.init_parameters(1);
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.epochs = 5;
    tc.batch_size = 32;
    tc.seed = 1;
    const TrainStats stats = train_model(model, fx.data, tc);
    REQUIRE(stats.epochs.size() == 5);
    CHECK(stats.epochs.back().combined < stats.epochs.front().combined);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const Fixture& fx = fixture();
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.epochs = 2;
    tc.batch_size = 16;
    tc.seed = 7;

    const auto dir = test_support::scratch_dir("train_determinism");
    MultiTaskModel a(fx.cfg);
    a.init_parameters(tc.seed);
    save_loss_trace(dir / "a.tsv", train_model(a, fx.data, tc));

    MultiTaskModel b(fx.cfg);
    b.init_parameters(tc.seed);
    save_loss_trace(dir / "b.tsv", train_model(b, fx.data, tc));

    CHECK(test_support::read_file(dir / "a.tsv") == test_support::read_file(dir / "b.tsv"));
    const auto pa = a.parameters();
    const auto pb = b.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("the lower paper preset cannot beat the higher one on an equal budget") {
    const Fixture& fx = fixture();
    TrainConfig tc;
    tc.epochs = 2;
    tc.batch_size = 32;
    tc.seed = 5;

    auto run = [&](double lr) {
        MultiTaskModel model(fx.cfg);
        model.init_parameters(tc.seed);
        TrainConfig c = tc;
        c.learning_rate = lr;
        return train_model(model, fx.data, c).epochs.back().combined;
    };
    CHECK(run(kLrPresetPaperLow) >= run(kLrPresetPaperHigh));
}

TEST_CASE("lr presets resolve by name") {
    CHECK(lr_preset("paper_high") == kLrPresetPaperHigh);
    CHECK(lr_preset("paper_low") == kLrPresetPaperLow);
    CHECK_FALSE(lr_preset("warp_speed").has_value());
}

TEST_CASE("invalid training inputs are rejected") {
    const Fixture& fx = fixture();
    MultiTaskModel model(fx.cfg);
    model.init_parameters(2);

    Dataset empty;
    empty.image_size = fx.cfg.input_size;
    TrainConfig tc;
    CHECK_THROWS_AS(train_model(model, empty, tc), Error);

    TrainConfig bad_batch;
    bad_batch.batch_size = 0;
    CHECK_THROWS_AS(train_model(model, fx.data, bad_batch), Error);

    TrainConfig bad_lr;
    bad_lr.learning_rate = 0.0;
    CHECK_THROWS_AS(train_model(model, fx.data, bad_lr), Error);
}
