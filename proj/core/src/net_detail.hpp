#pragma once

// Layer-level internals shared by the forward pass and the trainer.
// Everything here operates on one sample at a time; batching, threading
// and gradient reduction are the trainer's concern.

#include <array>
#include <cstdint>
#include <vector>

#include "facaderisk/net.hpp"

namespace facaderisk::detail {

inline constexpr int kKernel = 3;  // 3x3 conv, pad 1, stride 1

/// Spatial geometry of each block for a given config.
struct LayerDims {
    std::array<int, 5> side;     // input side per block + final side
    std::array<int, 5> chan;     // channels entering each block + feature
};
LayerDims layer_dims(const ModelConfig& cfg);

/// Offsets into the flat parameter vector (declared order: conv w/b per
/// block, year head, structure head, ptype head, log-variances).
struct ParamLayout {
    std::array<std::size_t, 4> conv_w, conv_b;
    std::size_t year_w, year_b;
    std::size_t structure_w, structure_b;
    std::size_t ptype_w, ptype_b;
    std::size_t log_vars;
    std::size_t total;
};
ParamLayout param_layout(const ModelConfig& cfg);

/// Per-sample activation record kept for backprop, plus scratch buffers.
struct SampleTape {
    std::vector<float> input;                  // 3 x S x S copy
    std::array<std::vector<float>, 4> conv_out;   // post-ReLU
    std::array<std::vector<float>, 4> pool_out;
    std::array<std::vector<std::uint8_t>, 4> pool_idx;  // argmax in 2x2 window
    std::vector<float> feature;                // after global average pool
    std::vector<float> col;                    // im2col scratch
    std::vector<float> dcol;                   // backward scratch
    std::vector<float> dbuf_a, dbuf_b;         // activation gradients

    void resize(const ModelConfig& cfg);
};

struct SampleHeads {
    float year = 0.0f;
    std::array<float, kNumStructures> structure_probs{};
    std::array<float, kNumPropertyTypes> ptype_probs{};
};

/// Gradient of the loss w.r.t. the head outputs of one sample
/// (year prediction and pre-softmax logits).
struct HeadGrad {
    float dyear = 0.0f;
    std::array<float, kNumStructures> dstructure_logits{};
    std::array<float, kNumPropertyTypes> dptype_logits{};
};

/// input: CHW float plane, values [0,1]. Fills the tape.
SampleHeads forward_sample(const ModelConfig& cfg, const ParamLayout& layout,
                           const float* params, const float* input,
                           SampleTape& tape);

/// Accumulates parameter gradients for one sample into grad (same layout
/// and length as the parameter vector; log-variance slots untouched).
/// Reads the tape's stored activations and reuses its scratch buffers.
void backward_sample(const ModelConfig& cfg, const ParamLayout& layout,
                     const float* params, SampleTape& tape,
                     const HeadGrad& hg, float* grad);

}  // namespace facaderisk::detail
