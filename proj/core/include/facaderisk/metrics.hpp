#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facaderisk/labels.hpp"

namespace facaderisk {

struct RegressionReport {
    double mae = 0.0;
    double rmse = 0.0;
    double medae = 0.0;
    std::size_t n = 0;
};

/// MAE = mean |e|, RMSE = sqrt(mean e^2), MedAE = median |e| (mean of the
/// two central values for even n). Throws on empty or mismatched inputs.
RegressionReport regression_metrics(std::span<const double> preds,
                                    std::span<const double> truths);

struct ClassificationReport {
    std::vector<std::string> classes;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
    std::vector<double> per_class_f1;
    std::vector<std::vector<long>> confusion;  // rows = true, cols = predicted
    std::size_t n = 0;
};

/// Per-class precision/recall/F1 with the 0/0 convention = 0. Macro
/// averages are unweighted means over ALL classes in `classes`, including
/// ones with zero support; weighted F1 weights by true-class counts.
/// Throws on labels outside `classes` or mismatched/empty inputs.
ClassificationReport classification_metrics(const std::vector<std::string>& preds,
                                            const std::vector<std::string>& truths,
                                            const std::vector<std::string>& classes);

struct PropagationReport {
    std::size_t n = 0;
    std::size_t n_fireproof_correct = 0;
    std::size_t n_correct_despite_intermediate_error = 0;
    double fraction_of_correct = 0.0;  // share of correct fireproof predictions
    double fraction_of_all = 0.0;      // share of all samples
};

/// Counts samples whose derived fireproof class matches while structure
/// or property type is wrong — the error-compensation effect of the
/// hierarchical mapping.
PropagationReport propagation_analysis(
    std::span<const std::pair<BuildingStructure, PropertyType>> preds,
    std::span<const std::pair<BuildingStructure, PropertyType>> truths);

}  // namespace facaderisk
