#pragma once

#include <filesystem>
#include <optional>

#include "facaderisk/metrics.hpp"
#include "facaderisk/net.hpp"
#include "facaderisk/split.hpp"

namespace facaderisk {

/// Everything measured over one evaluation pass. Accounting is
/// per-image: every image of a property contributes one sample.
struct EvaluationReport {
    std::size_t n_images = 0;
    std::size_t n_excluded = 0;  // undecodable images, logged and skipped
    std::vector<std::string> excluded_ids;
    RegressionReport year;
    ClassificationReport structure;
    ClassificationReport ptype;
    ClassificationReport fireproof;
    PropagationReport propagation;
};

/// Runs predict over the images of `want` (entire manifest when nullopt)
/// and computes every task metric plus the propagation analysis. Throws
/// if the selected slice is empty.
EvaluationReport evaluate_run(const MultiTaskModel& model,
                              const std::filesystem::path& properties_path,
                              const std::filesystem::path& images_path,
                              const SplitAssignment& split,
                              std::optional<Split> want);

/// Writes the machine-readable report (JSON lines, one section per line)
/// and `confusion_structure.tsv`, `confusion_ptype.tsv`,
/// `confusion_fireproof.tsv` next to it (tab-separated counts with a
/// header row/column of class names).
void write_evaluation_report(const std::filesystem::path& report_path,
                             const EvaluationReport& report);

}  // namespace facaderisk
