#include "facaderisk/loss.hpp"

#include <cmath>

#include "facaderisk/error.hpp"

namespace facaderisk {

double combined_loss_term(double task_loss, double log_var) {
    if (!std::isfinite(task_loss) || !std::isfinite(log_var)) {
        throw Error("combined_loss: non-finite input");
    }
    return task_loss * std::exp(-log_var) * 0.5 + log_var * 0.5;
}

double combined_loss(std::span<const double> task_losses,
                     std::span<const double> log_vars) {
    if (task_losses.size() != log_vars.size()) {
        throw Error("combined_loss: task/weight count mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < task_losses.size(); ++i) {
        total += combined_loss_term(task_losses[i], log_vars[i]);
    }
    return total;
}

double combined_loss_grad_log_var(double task_loss, double log_var) {
    if (!std::isfinite(task_loss) || !std::isfinite(log_var)) {
        throw Error("combined_loss gradient: non-finite input");
    }
    return -task_loss * std::exp(-log_var) * 0.5 + 0.5;
}

double task_weight(double log_var) { return std::exp(-log_var) * 0.5; }

double optimal_sigma(double task_loss) {
    if (!(task_loss > 0.0)) {
        throw Error("optimal_sigma requires a strictly positive loss");
    }
    return std::sqrt(task_loss);
}

}  // namespace facaderisk
