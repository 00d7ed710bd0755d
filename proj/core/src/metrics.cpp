#include "facaderisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "facaderisk/error.hpp"

namespace facaderisk {

RegressionReport regression_metrics(std::span<const double> preds,
                                    std::span<const double> truths) {
    if (preds.size() != truths.size()) throw Error("regression_metrics: length mismatch");
    if (preds.empty()) throw Error("regression_metrics: empty input");

    const std::size_t n = preds.size();
    std::vector<double> abs_err(n);
    double sum_abs = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = preds[i] - truths[i];
        abs_err[i] = std::abs(e);
        sum_abs += abs_err[i];
        sum_sq += e * e;
    }
    std::sort(abs_err.begin(), abs_err.end());

    RegressionReport r;
    r.n = n;
    r.mae = sum_abs / static_cast<double>(n);
    r.rmse = std::sqrt(sum_sq / static_cast<double>(n));
    r.medae = (n % 2 == 1) ? abs_err[n / 2]
                           : 0.5 * (abs_err[n / 2 - 1] + abs_err[n / 2]);
    return r;
}

ClassificationReport classification_metrics(const std::vector<std::string>& preds,
                                            const std::vector<std::string>& truths,
                                            const std::vector<std::string>& classes) {
    if (preds.size() != truths.size()) throw Error("classification_metrics: length mismatch");
    if (preds.empty()) throw Error("classification_metrics: empty input");
    if (classes.empty()) throw Error("classification_metrics: empty class set");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;
    if (index.size() != classes.size()) {
        throw Error("classification_metrics: duplicate class label");
    }

    const std::size_t k = classes.size();
    ClassificationReport r;
    r.classes = classes;
    r.n = preds.size();
    r.confusion.assign(k, std::vector<long>(k, 0));

    for (std::size_t i = 0; i < preds.size(); ++i) {
        auto t = index.find(truths[i]);
        auto p = index.find(preds[i]);
        if (t == index.end()) throw Error("classification_metrics: unknown label '" + truths[i] + "'");
        if (p == index.end()) throw Error("classification_metrics: unknown label '" + preds[i] + "'");
        ++r.confusion[t->second][p->second];
    }

    long trace = 0;
    for (std::size_t c = 0; c < k; ++c) trace += r.confusion[c][c];
    r.accuracy = static_cast<double>(trace) / static_cast<double>(r.n);

    r.per_class_precision.assign(k, 0.0);
    r.per_class_recall.assign(k, 0.0);
    r.per_class_f1.assign(k, 0.0);

    double macro_p = 0.0, macro_r = 0.0, macro_f = 0.0, weighted_f = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        long tp = r.confusion[c][c];
        long fn = 0, fp = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == c) continue;
            fn += r.confusion[c][j];
            fp += r.confusion[j][c];
        }
        const double prec = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double rec = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        r.per_class_precision[c] = prec;
        r.per_class_recall[c] = rec;
        r.per_class_f1[c] = f1;
        macro_p += prec;
        macro_r += rec;
        macro_f += f1;
        weighted_f += f1 * static_cast<double>(tp + fn);  // support = true count
    }
    r.macro_precision = macro_p / static_cast<double>(k);
    r.macro_recall = macro_r / static_cast<double>(k);
    r.macro_f1 = macro_f / static_cast<double>(k);
    r.weighted_f1 = weighted_f / static_cast<double>(r.n);
    return r;
}

PropagationReport propagation_analysis(
    std::span<const std::pair<BuildingStructure, PropertyType>> preds,
    std::span<const std::pair<BuildingStructure, PropertyType>> truths) {
    if (preds.size() != truths.size()) throw Error("propagation_analysis: length mismatch");

    PropagationReport r;
    r.n = preds.size();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const FireproofClass fp_pred = fireproof_class(preds[i].first, preds[i].second);
        const FireproofClass fp_true = fireproof_class(truths[i].first, truths[i].second);
        if (fp_pred != fp_true) continue;
        ++r.n_fireproof_correct;
        if (preds[i] != truths[i]) ++r.n_correct_despite_intermediate_error;
    }
    r.fraction_of_correct =
        r.n_fireproof_correct > 0
            ? static_cast<double>(r.n_correct_despite_intermediate_error) /
                  static_cast<double>(r.n_fireproof_correct)
            : 0.0;
    r.fraction_of_all = r.n > 0 ? static_cast<double>(r.n_correct_despite_intermediate_error) /
                                      static_cast<double>(r.n)
                                : 0.0;
    return r;
}

}  // namespace facaderisk
