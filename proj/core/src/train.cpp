#include "facaderisk/train.hpp"

#include <cblas.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "facaderisk/error.hpp"
#include "facaderisk/image.hpp"
#include "facaderisk/loss.hpp"
#include "facaderisk/manifest.hpp"
#include "facaderisk/rng.hpp"
#include "net_detail.hpp"

namespace facaderisk {

std::optional<double> lr_preset(const std::string& name) {
    if (name == "paper_high") return kLrPresetPaperHigh;
    if (name == "paper_low") return kLrPresetPaperLow;
    return std::nullopt;
}

Dataset load_dataset(const std::filesystem::path& properties_path,
                     const std::filesystem::path& images_path,
                     const SplitAssignment& split, std::optional<Split> want,
                     const ModelConfig& cfg) {
    const auto props = load_property_manifest(properties_path);
    const auto images = load_image_manifest(images_path);

    std::unordered_map<std::string, const PropertyRecord*> by_id;
    by_id.reserve(props.records.size());
    for (const auto& r : props.records) by_id[r.property_id] = &r;

    Dataset out;
    out.image_size = cfg.input_size;
    for (const auto& img : images.records) {
        auto it = by_id.find(img.property_id);
        if (it == by_id.end()) continue;
        const PropertyRecord& prop = *it->second;
        if (!prop.ptype) continue;
        if (want) {
            auto sit = split.by_property.find(img.property_id);
            if (sit == split.by_property.end() || sit->second != *want) continue;
        }
        Image raster;
        try {
            raster = decode_image(resolve_image_path(images_path, img));
        } catch (const std::exception&) {
            ++out.excluded;
            out.excluded_ids.push_back(img.image_id);
            continue;
        }
        raster = resize_rgb(raster, cfg.input_size, cfg.input_size);

        LabeledImage sample;
        sample.image_id = img.image_id;
        sample.rgb = std::move(raster.rgb);
        sample.year_norm =
            (static_cast<float>(prop.construction_year) - cfg.year_anchor) / cfg.year_scale;
        sample.structure = static_cast<int>(prop.structure);
        sample.ptype = static_cast<int>(*prop.ptype);
        out.samples.push_back(std::move(sample));
    }
    return out;
}

namespace {

void fill_input(const LabeledImage& s, int size, float* dst) {
    const std::size_t plane = static_cast<std::size_t>(size) * size;
    for (std::size_t p = 0; p < plane; ++p) {
        dst[p] = s.rgb[p * 3 + 0] / 255.0f;
        dst[plane + p] = s.rgb[p * 3 + 1] / 255.0f;
        dst[2 * plane + p] = s.rgb[p * 3 + 2] / 255.0f;
    }
}

}  // namespace

TrainStats train_model(MultiTaskModel& model, const Dataset& data,
                       const TrainConfig& config) {
    if (data.samples.empty()) throw Error("train: empty dataset");
    if (config.batch_size < 1) throw Error("train: batch_size must be >= 1");
    if (!(config.learning_rate > 0.0)) throw Error("train: learning_rate must be positive");
    if (data.image_size != model.config().input_size) {
        throw Error("train: dataset resolution does not match the model input");
    }

    // sample-level parallelism below provides the concurrency; avoid
    // nested BLAS threading inside it
    openblas_set_num_threads(1);

    const ModelConfig& cfg = model.config();
    const detail::ParamLayout layout = detail::param_layout(cfg);
    float* params = model.parameters().data();
    const std::size_t n_params = model.parameter_count();

    // Adam state
    std::vector<float> m(n_params, 0.0f), v(n_params, 0.0f);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    const int n = static_cast<int>(data.samples.size());
    const int batch = config.batch_size;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

    // full step size for the first three quarters of the budget, cosine
    // tail over the rest; a constant rate leaves the regression head
    // oscillating around its minimum and makes the final state a lottery
    // draw from that oscillation, while decaying too early starves the
    // slower classification tasks
    const long steps_per_epoch = (n + batch - 1) / batch;
    const long total_steps = std::max(1L, steps_per_epoch * config.epochs);
    const long hold_steps = (total_steps * 3) / 4;
    constexpr double kPi = 3.14159265358979323846;

    // per-sample gradient slots keep the reduction order fixed no matter
    // how many threads run
    std::vector<std::vector<float>> sample_grads(static_cast<std::size_t>(batch));
    std::vector<detail::SampleTape> tapes;
    std::vector<std::vector<float>> inputs(static_cast<std::size_t>(batch));
    const std::size_t input_len = static_cast<std::size_t>(3) * cfg.input_size * cfg.input_size;
#ifdef _OPENMP
    const int n_threads = std::max(1, omp_get_max_threads());
#else
    const int n_threads = 1;
#endif
    tapes.resize(static_cast<std::size_t>(n_threads));
    for (auto& t : tapes) t.resize(cfg);
    for (auto& g : sample_grads) g.assign(n_params, 0.0f);
    for (auto& in : inputs) in.resize(input_len);

    std::vector<float> grad(n_params, 0.0f);
    TrainStats stats;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(config.seed, 0xE90CULL, static_cast<std::uint64_t>(epoch)));
        for (int i = n - 1; i > 0; --i) {
            const int j = shuffle_rng.uniform_int(0, i);
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }

        double ep_year = 0.0, ep_struct = 0.0, ep_ptype = 0.0, ep_combined = 0.0;
        long ep_samples = 0;

        for (int start = 0, batch_no = 0; start < n; start += batch, ++batch_no) {
            const int bs = std::min(batch, n - start);
            const double s_year = params[layout.log_vars + 0];
            const double s_struct = params[layout.log_vars + 1];
            const double s_ptype = params[layout.log_vars + 2];
            const double w_year = task_weight(s_year);
            const double w_struct = task_weight(s_struct);
            const double w_ptype = task_weight(s_ptype);

            std::vector<double> year_sq(static_cast<std::size_t>(bs), 0.0);
            std::vector<double> struct_nll(static_cast<std::size_t>(bs), 0.0);
            std::vector<double> ptype_nll(static_cast<std::size_t>(bs), 0.0);

#pragma omp parallel for schedule(static)
            for (int b = 0; b < bs; ++b) {
#ifdef _OPENMP
                detail::SampleTape& tape = tapes[static_cast<std::size_t>(omp_get_thread_num())];
#else
                detail::SampleTape& tape = tapes[0];
#endif
                const LabeledImage& sample =
                    data.samples[static_cast<std::size_t>(order[static_cast<std::size_t>(start + b)])];
                float* input = inputs[static_cast<std::size_t>(b)].data();
                fill_input(sample, cfg.input_size, input);

                const auto heads =
                    detail::forward_sample(cfg, layout, params, input, tape);

                const double err = static_cast<double>(heads.year) - sample.year_norm;
                year_sq[static_cast<std::size_t>(b)] = err * err;
                const double p_s = std::max(
                    static_cast<double>(
                        heads.structure_probs[static_cast<std::size_t>(sample.structure)]),
                    1e-30);
                const double p_p = std::max(
                    static_cast<double>(
                        heads.ptype_probs[static_cast<std::size_t>(sample.ptype)]),
                    1e-30);
                struct_nll[static_cast<std::size_t>(b)] = -std::log(p_s);
                ptype_nll[static_cast<std::size_t>(b)] = -std::log(p_p);

                detail::HeadGrad hg;
                hg.dyear = static_cast<float>(w_year * 2.0 * err / bs);
                for (int c = 0; c < cfg.n_structure; ++c) {
                    const double p = heads.structure_probs[static_cast<std::size_t>(c)];
                    const double t = (c == sample.structure) ? 1.0 : 0.0;
                    hg.dstructure_logits[static_cast<std::size_t>(c)] =
                        static_cast<float>(w_struct * (p - t) / bs);
                }
                for (int c = 0; c < cfg.n_ptype; ++c) {
                    const double p = heads.ptype_probs[static_cast<std::size_t>(c)];
                    const double t = (c == sample.ptype) ? 1.0 : 0.0;
                    hg.dptype_logits[static_cast<std::size_t>(c)] =
                        static_cast<float>(w_ptype * (p - t) / bs);
                }

                auto& slot = sample_grads[static_cast<std::size_t>(b)];
                std::fill(slot.begin(), slot.end(), 0.0f);
                detail::backward_sample(cfg, layout, params, tape, hg, slot.data());
            }

            // deterministic reduction in sample order
            std::fill(grad.begin(), grad.end(), 0.0f);
            for (int b = 0; b < bs; ++b) {
                const auto& slot = sample_grads[static_cast<std::size_t>(b)];
                for (std::size_t i = 0; i < n_params; ++i) grad[i] += slot[i];
            }

            double l_year = 0.0, l_struct = 0.0, l_ptype = 0.0;
            for (int b = 0; b < bs; ++b) {
                l_year += year_sq[static_cast<std::size_t>(b)];
                l_struct += struct_nll[static_cast<std::size_t>(b)];
                l_ptype += ptype_nll[static_cast<std::size_t>(b)];
            }
            l_year /= bs;
            l_struct /= bs;
            l_ptype /= bs;

            const std::array<double, 3> task_losses = {l_year, l_struct, l_ptype};
            const std::array<double, 3> log_vars = {s_year, s_struct, s_ptype};
            const double combined = combined_loss(task_losses, log_vars);
            if (!std::isfinite(combined)) {
                throw Error("train: non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_no));
            }

            grad[layout.log_vars + 0] =
                static_cast<float>(combined_loss_grad_log_var(l_year, s_year));
            grad[layout.log_vars + 1] =
                static_cast<float>(combined_loss_grad_log_var(l_struct, s_struct));
            grad[layout.log_vars + 2] =
                static_cast<float>(combined_loss_grad_log_var(l_ptype, s_ptype));

            // Adam step
            ++step;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            double lr = config.learning_rate;
            if (step > hold_steps && total_steps > hold_steps) {
                const double progress = static_cast<double>(step - hold_steps) /
                                        static_cast<double>(total_steps - hold_steps);
                lr *= 0.5 * (1.0 + std::cos(kPi * progress));
            }
            for (std::size_t i = 0; i < n_params; ++i) {
                const double g = grad[i];
                const double mi = beta1 * m[i] + (1.0 - beta1) * g;
                const double vi = beta2 * v[i] + (1.0 - beta2) * g * g;
                m[i] = static_cast<float>(mi);
                v[i] = static_cast<float>(vi);
                params[i] -= static_cast<float>(lr * (mi / bc1) /
                                                (std::sqrt(vi / bc2) + eps));
            }

            ep_year += l_year * bs;
            ep_struct += l_struct * bs;
            ep_ptype += l_ptype * bs;
            ep_combined += combined * bs;
            ep_samples += bs;
        }

        EpochStats es;
        es.epoch = epoch;
        es.year_mse = ep_year / static_cast<double>(ep_samples);
        es.structure_ce = ep_struct / static_cast<double>(ep_samples);
        es.ptype_ce = ep_ptype / static_cast<double>(ep_samples);
        es.combined = ep_combined / static_cast<double>(ep_samples);
        for (int t = 0; t < kNumTasks; ++t) {
            es.log_vars[static_cast<std::size_t>(t)] =
                params[layout.log_vars + static_cast<std::size_t>(t)];
        }
        stats.epochs.push_back(es);
    }
    return stats;
}

void save_loss_trace(const std::filesystem::path& path, const TrainStats& stats) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write loss trace: " + path.string());
    out << "epoch\tcombined\tyear_mse\tstructure_ce\tptype_ce\ts_year\ts_structure\ts_ptype\n";
    char buf[256];
    for (const auto& e : stats.epochs) {
        std::snprintf(buf, sizeof(buf),
                      "%d\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\n", e.epoch,
                      e.combined, e.year_mse, e.structure_ce, e.ptype_ce,
                      e.log_vars[0], e.log_vars[1], e.log_vars[2]);
        out << buf;
    }
}

}  // namespace facaderisk
