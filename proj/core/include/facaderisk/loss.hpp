#pragma once

#include <span>

namespace facaderisk {

/// Uncertainty-weighted multi-task loss. Each task carries a learnable
/// log-variance s_i with sigma_i^2 = exp(s_i); the combined objective is
///
///   sum_i [ L_i / (2 sigma_i^2) + log sigma_i ]
///   = sum_i [ L_i * exp(-s_i) / 2 + s_i / 2 ]
///
/// The log-variance parameterization keeps sigma positive for every
/// finite s_i.

/// One task's contribution. Throws on non-finite inputs.
double combined_loss_term(double task_loss, double log_var);

/// Total over tasks; spans must have equal length.
double combined_loss(std::span<const double> task_losses,
                     std::span<const double> log_vars);

/// d(combined)/d(s_i) = -L_i * exp(-s_i) / 2 + 1/2.
double combined_loss_grad_log_var(double task_loss, double log_var);

/// Weight applied to a task's gradient: d(combined)/d(L_i) = exp(-s_i)/2.
double task_weight(double log_var);

/// Unique minimizer of L/(2 sigma^2) + log sigma over sigma > 0, i.e.
/// sqrt(L). Throws for L <= 0 (the minimizer diverges at 0).
double optimal_sigma(double task_loss);

}  // namespace facaderisk
