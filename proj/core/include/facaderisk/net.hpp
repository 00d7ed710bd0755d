#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "facaderisk/image.hpp"
#include "facaderisk/labels.hpp"

namespace facaderisk {

/// Architecture and target-encoding hyperparameters. The backbone is a
/// compact 4-block CNN (3x3 conv, ReLU, 2x max pool per block) followed
/// by global average pooling into a shared feature that feeds all three
/// heads. input_size must be divisible by 16.
struct ModelConfig {
    int input_size = 128;
    std::array<int, 4> channels = {16, 32, 64, 128};
    int n_structure = kNumStructures;
    int n_ptype = kNumPropertyTypes;
    // regression target encoding: (year - anchor) / scale
    float year_anchor = 1970.0f;
    float year_scale = 50.0f;

    int feature_dim() const { return channels[3]; }
    void validate() const;
    bool operator==(const ModelConfig&) const = default;
};

/// Mini-batch of normalized images: CHW float planes per sample, values
/// in [0, 1].
struct Batch {
    int n = 0;
    int size = 0;  // spatial side
    std::vector<float> pixels;  // n * 3 * size * size
};

Batch make_batch(std::span<const Image> images, int input_size);

/// Per-sample head outputs. Probability rows live on their simplices.
struct HeadOutputs {
    int n = 0;
    std::vector<float> year;             // normalized regression output
    std::vector<float> structure_probs;  // n * n_structure
    std::vector<float> ptype_probs;      // n * n_ptype
};

struct Prediction {
    double year = 0.0;  // Gregorian
    BuildingStructure structure = BuildingStructure::ConcreteLike;
    PropertyType ptype = PropertyType::Communal;
    FireproofClass fireproof = FireproofClass::M;
};

/// Task indices into the log-variance tail of the parameter vector.
enum class Task { Year = 0, Structure = 1, Ptype = 2 };
inline constexpr int kNumTasks = 3;

/// Shared-backbone multi-task network. All parameters, including the
/// per-task log-variances, live in one flat float vector in a fixed
/// declared order (conv blocks, year head, structure head, ptype head,
/// log-variances); the checkpoint format serializes exactly that order.
class MultiTaskModel {
public:
    explicit MultiTaskModel(ModelConfig cfg = {});

    /// He-initialized weights, zero biases, zero log-variances.
    void init_parameters(std::uint64_t seed);

    const ModelConfig& config() const { return cfg_; }

    /// Inference over a batch; throws on shape mismatch. An empty batch
    /// yields empty outputs.
    HeadOutputs forward(const Batch& batch) const;

    float log_var(Task t) const;
    void set_log_var(Task t, float v);

    std::span<float> parameters() { return params_; }
    std::span<const float> parameters() const { return params_; }
    std::size_t parameter_count() const { return params_.size(); }

private:
    ModelConfig cfg_;
    std::vector<float> params_;
};

/// Argmax decision plus rule-based fireproof derivation. The fireproof
/// output is always fireproof_class(structure, ptype); there is no
/// independent fireproof head.
Prediction decide_prediction(float year_norm, std::span<const float> structure_probs,
                             std::span<const float> ptype_probs, const ModelConfig& cfg);

/// Full single-image path: resize to the model input, forward, decide.
Prediction predict(const MultiTaskModel& model, const Image& img);

}  // namespace facaderisk
