#pragma once

// Experiment scenarios. Each returns a Report whose rows use the fixed
// result columns; scenario-specific values go to row extras and the summary.

#include "weakmeas/cli/config.hpp"
#include "weakmeas/cli/report.hpp"

namespace weakmeas::cli
{

/// Dispatch on config.scenario.
Report run(const ExperimentConfig& config);

/// Numeric, closed-form, traditional, complex AAV and projective values side
/// by side, plus a Monte Carlo estimate of E_eps(B|f)/eps and the disturbance
/// at the sampling eps when mc.n_trials > 0.
Report run_weak_value(const ExperimentConfig& config);

/// One weak-value row per entry of meter.rho_list, sorted by rho. The summary
/// carries the least-squares slope of wv_closed against rho and 2 Im w.
/// ConfigError on an empty list.
Report run_sweep_rho(const ExperimentConfig& config);

/// Meter reading ⟨r,(I ⊗ B)r⟩/eps per scheduled eps (wv_numeric) against
/// ⟨s,As⟩ (wv_closed), then an eps = 0 row with the extrapolant. Observed
/// convergence orders of the reading and of E_eps(B|f)/eps are in the summary.
Report run_limit_check(const ExperimentConfig& config);

/// Monte Carlo of the full procedure at the sampling eps, normalized by eps,
/// with the exact table and a chi-square check.
Report run_sample(const ExperimentConfig& config);

/// Disturbance and disturbance/eps per scheduled eps.
Report run_disturbance(const ExperimentConfig& config);

/// Grid meter calibration moments, chirp residual and a weak-value row with
/// the grid meter, compared with the two-level meter closed form.
Report run_aav_grid(const ExperimentConfig& config);

/// Unconditional meter limit vs ⟨s,As⟩, and conditional meter limit vs the
/// projective conditional expectation, each with a Monte Carlo confirmation.
Report run_compare(const ExperimentConfig& config);

} // namespace weakmeas::cli
