#include "facaderisk/net.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

#include "facaderisk/error.hpp"
#include "facaderisk/rng.hpp"
#include "net_detail.hpp"

namespace facaderisk {

namespace detail {

LayerDims layer_dims(const ModelConfig& cfg) {
    LayerDims d;
    d.side[0] = cfg.input_size;
    d.chan[0] = 3;
    for (int k = 0; k < 4; ++k) {
        d.side[k + 1] = d.side[k] / 2;
        d.chan[k + 1] = cfg.channels[static_cast<std::size_t>(k)];
    }
    return d;
}

ParamLayout param_layout(const ModelConfig& cfg) {
    const LayerDims d = layer_dims(cfg);
    ParamLayout l{};
    std::size_t off = 0;
    for (int k = 0; k < 4; ++k) {
        const auto out_c = static_cast<std::size_t>(d.chan[k + 1]);
        const auto in_c = static_cast<std::size_t>(d.chan[k]);
        l.conv_w[static_cast<std::size_t>(k)] = off;
        off += out_c * in_c * kKernel * kKernel;
        l.conv_b[static_cast<std::size_t>(k)] = off;
        off += out_c;
    }
    const auto feat = static_cast<std::size_t>(cfg.feature_dim());
    l.year_w = off; off += feat;
    l.year_b = off; off += 1;
    l.structure_w = off; off += static_cast<std::size_t>(cfg.n_structure) * feat;
    l.structure_b = off; off += static_cast<std::size_t>(cfg.n_structure);
    l.ptype_w = off; off += static_cast<std::size_t>(cfg.n_ptype) * feat;
    l.ptype_b = off; off += static_cast<std::size_t>(cfg.n_ptype);
    l.log_vars = off; off += kNumTasks;
    l.total = off;
    return l;
}

void SampleTape::resize(const ModelConfig& cfg) {
    const LayerDims d = layer_dims(cfg);
    input.resize(static_cast<std::size_t>(3) * d.side[0] * d.side[0]);
    std::size_t max_col = 0, max_act = 0;
    for (int k = 0; k < 4; ++k) {
        const auto s = static_cast<std::size_t>(d.side[k]);
        const auto in_c = static_cast<std::size_t>(d.chan[k]);
        const auto out_c = static_cast<std::size_t>(d.chan[k + 1]);
        conv_out[static_cast<std::size_t>(k)].resize(out_c * s * s);
        pool_out[static_cast<std::size_t>(k)].resize(out_c * (s / 2) * (s / 2));
        pool_idx[static_cast<std::size_t>(k)].resize(out_c * (s / 2) * (s / 2));
        max_col = std::max(max_col, in_c * kKernel * kKernel * s * s);
        max_act = std::max(max_act, std::max(in_c, out_c) * s * s);
    }
    feature.resize(static_cast<std::size_t>(cfg.feature_dim()));
    col.resize(max_col);
    dcol.resize(max_col);
    dbuf_a.resize(max_act);
    dbuf_b.resize(max_act);
}

namespace {

// col is (C*9) x (H*W), row-major; 3x3 kernel, pad 1, stride 1.
void im2col3x3(const float* in, int C, int side, float* col) {
    const int hw = side * side;
    for (int c = 0; c < C; ++c) {
        const float* plane = in + static_cast<std::size_t>(c) * hw;
        for (int ky = 0; ky < kKernel; ++ky) {
            for (int kx = 0; kx < kKernel; ++kx) {
                float* row = col + (static_cast<std::size_t>(c) * 9 +
                                    static_cast<std::size_t>(ky) * 3 + kx) * hw;
                for (int y = 0; y < side; ++y) {
                    const int sy = y + ky - 1;
                    float* dst = row + static_cast<std::size_t>(y) * side;
                    if (sy < 0 || sy >= side) {
                        std::memset(dst, 0, sizeof(float) * static_cast<std::size_t>(side));
                        continue;
                    }
                    const float* src = plane + static_cast<std::size_t>(sy) * side;
                    for (int x = 0; x < side; ++x) {
                        const int sx = x + kx - 1;
                        dst[x] = (sx < 0 || sx >= side) ? 0.0f : src[sx];
                    }
                }
            }
        }
    }
}

// scatter-add the col gradient back onto the input plane
void col2im3x3(const float* col, int C, int side, float* din) {
    const int hw = side * side;
    std::memset(din, 0, sizeof(float) * static_cast<std::size_t>(C) * hw);
    for (int c = 0; c < C; ++c) {
        float* plane = din + static_cast<std::size_t>(c) * hw;
        for (int ky = 0; ky < kKernel; ++ky) {
            for (int kx = 0; kx < kKernel; ++kx) {
                const float* row = col + (static_cast<std::size_t>(c) * 9 +
                                          static_cast<std::size_t>(ky) * 3 + kx) * hw;
                for (int y = 0; y < side; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= side) continue;
                    float* dst = plane + static_cast<std::size_t>(sy) * side;
                    const float* src = row + static_cast<std::size_t>(y) * side;
                    for (int x = 0; x < side; ++x) {
                        const int sx = x + kx - 1;
                        if (sx < 0 || sx >= side) continue;
                        dst[sx] += src[x];
                    }
                }
            }
        }
    }
}

void maxpool2x2(const float* in, int C, int side, float* out, std::uint8_t* idx) {
    const int os = side / 2;
    for (int c = 0; c < C; ++c) {
        const float* plane = in + static_cast<std::size_t>(c) * side * side;
        float* oplane = out + static_cast<std::size_t>(c) * os * os;
        std::uint8_t* iplane = idx + static_cast<std::size_t>(c) * os * os;
        for (int y = 0; y < os; ++y) {
            for (int x = 0; x < os; ++x) {
                const int sy = y * 2, sx = x * 2;
                float best = plane[static_cast<std::size_t>(sy) * side + sx];
                std::uint8_t bi = 0;
                const std::array<std::pair<int, int>, 4> cand = {
                    std::pair{sy, sx}, {sy, sx + 1}, {sy + 1, sx}, {sy + 1, sx + 1}};
                for (std::uint8_t i = 1; i < 4; ++i) {
                    const float v = plane[static_cast<std::size_t>(cand[i].first) * side +
                                          cand[i].second];
                    if (v > best) { best = v; bi = i; }
                }
                oplane[static_cast<std::size_t>(y) * os + x] = best;
                iplane[static_cast<std::size_t>(y) * os + x] = bi;
            }
        }
    }
}

void softmax(const float* logits, int n, float* probs) {
    float mx = logits[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
    float sum = 0.0f;
    for (int i = 0; i < n; ++i) {
        probs[i] = std::exp(logits[i] - mx);
        sum += probs[i];
    }
    for (int i = 0; i < n; ++i) probs[i] /= sum;
}

}  // namespace

SampleHeads forward_sample(const ModelConfig& cfg, const ParamLayout& layout,
                           const float* params, const float* input,
                           SampleTape& tape) {
    const LayerDims d = layer_dims(cfg);
    std::memcpy(tape.input.data(), input, sizeof(float) * tape.input.size());

    const float* x = tape.input.data();
    for (int k = 0; k < 4; ++k) {
        const int side = d.side[k];
        const int hw = side * side;
        const int in_c = d.chan[k];
        const int out_c = d.chan[k + 1];
        const int kk = in_c * kKernel * kKernel;
        auto& out = tape.conv_out[static_cast<std::size_t>(k)];

        im2col3x3(x, in_c, side, tape.col.data());
        // out[out_c x hw] = W[out_c x kk] * col[kk x hw]
        cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, out_c, hw, kk, 1.0f,
                    params + layout.conv_w[static_cast<std::size_t>(k)], kk,
                    tape.col.data(), hw, 0.0f, out.data(), hw);
        const float* bias = params + layout.conv_b[static_cast<std::size_t>(k)];
        for (int c = 0; c < out_c; ++c) {
            float* plane = out.data() + static_cast<std::size_t>(c) * hw;
            const float b = bias[c];
            for (int i = 0; i < hw; ++i) plane[i] = std::max(0.0f, plane[i] + b);
        }
        maxpool2x2(out.data(), out_c, side,
                   tape.pool_out[static_cast<std::size_t>(k)].data(),
                   tape.pool_idx[static_cast<std::size_t>(k)].data());
        x = tape.pool_out[static_cast<std::size_t>(k)].data();
    }

    // global average pool
    const int feat_n = cfg.feature_dim();
    const int fs = d.side[4];
    const int fhw = fs * fs;
    for (int c = 0; c < feat_n; ++c) {
        const float* plane = tape.pool_out[3].data() + static_cast<std::size_t>(c) * fhw;
        float acc = 0.0f;
        for (int i = 0; i < fhw; ++i) acc += plane[i];
        tape.feature[static_cast<std::size_t>(c)] = acc / static_cast<float>(fhw);
    }

    SampleHeads heads;
    const float* f = tape.feature.data();
    {
        const float* w = params + layout.year_w;
        float acc = params[layout.year_b];
        for (int j = 0; j < feat_n; ++j) acc += w[j] * f[j];
        heads.year = acc;
    }
    {
        float logits[kNumStructures];
        for (int c = 0; c < cfg.n_structure; ++c) {
            const float* w = params + layout.structure_w + static_cast<std::size_t>(c) * feat_n;
            float acc = params[layout.structure_b + static_cast<std::size_t>(c)];
            for (int j = 0; j < feat_n; ++j) acc += w[j] * f[j];
            logits[c] = acc;
        }
        softmax(logits, cfg.n_structure, heads.structure_probs.data());
    }
    {
        float logits[kNumPropertyTypes];
        for (int c = 0; c < cfg.n_ptype; ++c) {
            const float* w = params + layout.ptype_w + static_cast<std::size_t>(c) * feat_n;
            float acc = params[layout.ptype_b + static_cast<std::size_t>(c)];
            for (int j = 0; j < feat_n; ++j) acc += w[j] * f[j];
            logits[c] = acc;
        }
        softmax(logits, cfg.n_ptype, heads.ptype_probs.data());
    }
    return heads;
}

void backward_sample(const ModelConfig& cfg, const ParamLayout& layout,
                     const float* params, SampleTape& tape,
                     const HeadGrad& hg, float* grad) {
    const LayerDims d = layer_dims(cfg);
    const int feat_n = cfg.feature_dim();
    const float* f = tape.feature.data();

    // heads -> feature gradient
    std::vector<float> dfeat(static_cast<std::size_t>(feat_n), 0.0f);
    {
        float* gw = grad + layout.year_w;
        for (int j = 0; j < feat_n; ++j) {
            gw[j] += hg.dyear * f[j];
            dfeat[static_cast<std::size_t>(j)] += hg.dyear * params[layout.year_w + j];
        }
        grad[layout.year_b] += hg.dyear;
    }
    for (int c = 0; c < cfg.n_structure; ++c) {
        const float g = hg.dstructure_logits[static_cast<std::size_t>(c)];
        float* gw = grad + layout.structure_w + static_cast<std::size_t>(c) * feat_n;
        const float* w = params + layout.structure_w + static_cast<std::size_t>(c) * feat_n;
        for (int j = 0; j < feat_n; ++j) {
            gw[j] += g * f[j];
            dfeat[static_cast<std::size_t>(j)] += g * w[j];
        }
        grad[layout.structure_b + static_cast<std::size_t>(c)] += g;
    }
    for (int c = 0; c < cfg.n_ptype; ++c) {
        const float g = hg.dptype_logits[static_cast<std::size_t>(c)];
        float* gw = grad + layout.ptype_w + static_cast<std::size_t>(c) * feat_n;
        const float* w = params + layout.ptype_w + static_cast<std::size_t>(c) * feat_n;
        for (int j = 0; j < feat_n; ++j) {
            gw[j] += g * f[j];
            dfeat[static_cast<std::size_t>(j)] += g * w[j];
        }
        grad[layout.ptype_b + static_cast<std::size_t>(c)] += g;
    }

    // GAP backward into the last pool output
    const int fs = d.side[4];
    const int fhw = fs * fs;
    std::vector<float>& dpool = tape.dbuf_a;
    std::vector<float>& dnext = tape.dbuf_b;
    const float inv = 1.0f / static_cast<float>(fhw);
    for (int c = 0; c < feat_n; ++c) {
        const float g = dfeat[static_cast<std::size_t>(c)] * inv;
        float* plane = dpool.data() + static_cast<std::size_t>(c) * fhw;
        for (int i = 0; i < fhw; ++i) plane[i] = g;
    }

    for (int k = 3; k >= 0; --k) {
        const int side = d.side[k];
        const int hw = side * side;
        const int os = side / 2;
        const int in_c = d.chan[k];
        const int out_c = d.chan[k + 1];
        const int kk = in_c * kKernel * kKernel;

        // pool backward: dpool (out_c x os x os) -> dconv (out_c x side x side)
        float* dconv = dnext.data();
        std::memset(dconv, 0, sizeof(float) * static_cast<std::size_t>(out_c) * hw);
        const auto& idx = tape.pool_idx[static_cast<std::size_t>(k)];
        for (int c = 0; c < out_c; ++c) {
            const float* gplane = dpool.data() + static_cast<std::size_t>(c) * os * os;
            float* dplane = dconv + static_cast<std::size_t>(c) * hw;
            const std::uint8_t* iplane = idx.data() + static_cast<std::size_t>(c) * os * os;
            for (int y = 0; y < os; ++y) {
                for (int x = 0; x < os; ++x) {
                    const std::uint8_t bi = iplane[static_cast<std::size_t>(y) * os + x];
                    const int sy = y * 2 + (bi >> 1);
                    const int sx = x * 2 + (bi & 1);
                    dplane[static_cast<std::size_t>(sy) * side + sx] +=
                        gplane[static_cast<std::size_t>(y) * os + x];
                }
            }
        }

        // ReLU mask from the stored post-activation output
        const auto& out = tape.conv_out[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < static_cast<std::size_t>(out_c) * hw; ++i) {
            if (out[i] <= 0.0f) dconv[i] = 0.0f;
        }

        // rebuild col of this layer's input
        const float* x = (k == 0) ? tape.input.data()
                                  : tape.pool_out[static_cast<std::size_t>(k - 1)].data();
        float* col = tape.col.data();
        im2col3x3(x, in_c, side, col);

        // dW += dconv * col^T ; db += row sums
        cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasTrans, out_c, kk, hw, 1.0f,
                    dconv, hw, col, hw, 1.0f,
                    grad + layout.conv_w[static_cast<std::size_t>(k)], kk);
        float* gb = grad + layout.conv_b[static_cast<std::size_t>(k)];
        for (int c = 0; c < out_c; ++c) {
            const float* row = dconv + static_cast<std::size_t>(c) * hw;
            float acc = 0.0f;
            for (int i = 0; i < hw; ++i) acc += row[i];
            gb[c] += acc;
        }

        if (k > 0) {
            // dcol = W^T * dconv, then scatter back to the input planes
            float* dcol = tape.dcol.data();
            cblas_sgemm(CblasRowMajor, CblasTrans, CblasNoTrans, kk, hw, out_c, 1.0f,
                        params + layout.conv_w[static_cast<std::size_t>(k)], kk,
                        dconv, hw, 0.0f, dcol, hw);
            col2im3x3(dcol, in_c, side, dpool.data());
            // dpool now holds the gradient of this layer's input, which is
            // the previous block's pool output
        }
    }
}

}  // namespace detail

void ModelConfig::validate() const {
    if (input_size < 16 || input_size % 16 != 0) {
        throw Error("input_size must be a positive multiple of 16");
    }
    for (int c : channels) {
        if (c <= 0) throw Error("channel counts must be positive");
    }
    if (n_structure != kNumStructures || n_ptype != kNumPropertyTypes) {
        throw Error("head widths must match the label taxonomies");
    }
    if (!(year_scale > 0.0f)) throw Error("year_scale must be positive");
}

MultiTaskModel::MultiTaskModel(ModelConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    params_.assign(detail::param_layout(cfg_).total, 0.0f);
}

void MultiTaskModel::init_parameters(std::uint64_t seed) {
    const detail::LayerDims d = detail::layer_dims(cfg_);
    const detail::ParamLayout l = detail::param_layout(cfg_);
    Rng rng(derive_seed(seed, 0x1417ULL));

    std::fill(params_.begin(), params_.end(), 0.0f);
    for (int k = 0; k < 4; ++k) {
        const int fan_in = d.chan[k] * detail::kKernel * detail::kKernel;
        const double std_dev = std::sqrt(2.0 / fan_in);
        const std::size_t n = static_cast<std::size_t>(d.chan[k + 1]) * fan_in;
        float* w = params_.data() + l.conv_w[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = static_cast<float>(rng.normal() * std_dev);
        }
    }
    const int feat_n = cfg_.feature_dim();
    const double head_std = std::sqrt(1.0 / feat_n);
    auto init_head = [&](std::size_t off, std::size_t n) {
        float* w = params_.data() + off;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = static_cast<float>(rng.normal() * head_std);
        }
    };
    init_head(l.year_w, static_cast<std::size_t>(feat_n));
    init_head(l.structure_w, static_cast<std::size_t>(cfg_.n_structure) * feat_n);
    init_head(l.ptype_w, static_cast<std::size_t>(cfg_.n_ptype) * feat_n);
    // biases and log-variances stay zero (sigma = 1)
}

float MultiTaskModel::log_var(Task t) const {
    const detail::ParamLayout l = detail::param_layout(cfg_);
    return params_[l.log_vars + static_cast<std::size_t>(t)];
}

void MultiTaskModel::set_log_var(Task t, float v) {
    const detail::ParamLayout l = detail::param_layout(cfg_);
    params_[l.log_vars + static_cast<std::size_t>(t)] = v;
}

HeadOutputs MultiTaskModel::forward(const Batch& batch) const {
    HeadOutputs out;
    out.n = batch.n;
    if (batch.n == 0) return out;
    if (batch.size != cfg_.input_size ||
        batch.pixels.size() != static_cast<std::size_t>(batch.n) * 3 *
                                   cfg_.input_size * cfg_.input_size) {
        throw Error("forward: batch shape mismatch");
    }

    out.year.resize(static_cast<std::size_t>(batch.n));
    out.structure_probs.resize(static_cast<std::size_t>(batch.n) * cfg_.n_structure);
    out.ptype_probs.resize(static_cast<std::size_t>(batch.n) * cfg_.n_ptype);

    const detail::ParamLayout layout = detail::param_layout(cfg_);
    const std::size_t plane = static_cast<std::size_t>(3) * cfg_.input_size * cfg_.input_size;

#pragma omp parallel
    {
        detail::SampleTape tape;
        tape.resize(cfg_);
#pragma omp for schedule(static)
        for (int i = 0; i < batch.n; ++i) {
            const auto heads = detail::forward_sample(
                cfg_, layout, params_.data(), batch.pixels.data() + plane * i, tape);
            out.year[static_cast<std::size_t>(i)] = heads.year;
            std::copy(heads.structure_probs.begin(), heads.structure_probs.end(),
                      out.structure_probs.begin() +
                          static_cast<std::size_t>(i) * cfg_.n_structure);
            std::copy(heads.ptype_probs.begin(), heads.ptype_probs.end(),
                      out.ptype_probs.begin() + static_cast<std::size_t>(i) * cfg_.n_ptype);
        }
    }
    return out;
}

Batch make_batch(std::span<const Image> images, int input_size) {
    Batch b;
    b.n = static_cast<int>(images.size());
    b.size = input_size;
    const std::size_t plane = static_cast<std::size_t>(input_size) * input_size;
    b.pixels.resize(static_cast<std::size_t>(b.n) * 3 * plane);
    for (int i = 0; i < b.n; ++i) {
        const Image img = resize_rgb(images[static_cast<std::size_t>(i)], input_size, input_size);
        float* dst = b.pixels.data() + static_cast<std::size_t>(i) * 3 * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            dst[p] = img.rgb[p * 3 + 0] / 255.0f;
            dst[plane + p] = img.rgb[p * 3 + 1] / 255.0f;
            dst[2 * plane + p] = img.rgb[p * 3 + 2] / 255.0f;
        }
    }
    return b;
}

Prediction decide_prediction(float year_norm, std::span<const float> structure_probs,
                             std::span<const float> ptype_probs, const ModelConfig& cfg) {
    if (structure_probs.size() != static_cast<std::size_t>(cfg.n_structure) ||
        ptype_probs.size() != static_cast<std::size_t>(cfg.n_ptype)) {
        throw Error("decide_prediction: probability vector size mismatch");
    }
    Prediction p;
    p.year = static_cast<double>(year_norm) * cfg.year_scale + cfg.year_anchor;
    const auto s_it = std::max_element(structure_probs.begin(), structure_probs.end());
    const auto p_it = std::max_element(ptype_probs.begin(), ptype_probs.end());
    p.structure = static_cast<BuildingStructure>(s_it - structure_probs.begin());
    p.ptype = static_cast<PropertyType>(p_it - ptype_probs.begin());
    p.fireproof = fireproof_class(p.structure, p.ptype);
    return p;
}

Prediction predict(const MultiTaskModel& model, const Image& img) {
    if (img.empty()) throw Error("predict: empty image");
    const std::array<Image, 1> one = {img};
    const Batch b = make_batch(one, model.config().input_size);
    const HeadOutputs out = model.forward(b);
    return decide_prediction(out.year[0],
                             std::span<const float>(out.structure_probs),
                             std::span<const float>(out.ptype_probs), model.config());
}

}  // namespace facaderisk
