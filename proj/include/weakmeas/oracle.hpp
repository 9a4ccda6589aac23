#pragma once

// Ground truth for the protocol: the exact joint distribution of (meter
// eigenvalue, postselection outcome), and an event-by-event Monte Carlo
// simulation of the physical procedure.

#include "weakmeas/protocol.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace weakmeas::oracle
{

/// SplitMix64 stream keyed by (seed, trial). Every trial owns an independent
/// substream, so sharded and serial runs produce identical outcomes.
class TrialStream
{
public:
	using result_type = std::uint64_t;

	TrialStream(std::uint64_t seed, std::uint64_t trial);

	static constexpr result_type min() { return 0; }
	static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

	result_type operator()();
	/// Uniform on [0, 1) with 53 random bits.
	double uniform();

private:
	std::uint64_t state_;
};

struct OutcomeCell
{
	/// Eigenvalue of B (one per eigenspace).
	double b_value;
	/// ‖(P_f ⊗ P_Q) r‖²
	double joint_prob_success;
	/// ‖(I ⊗ P_Q) r‖²
	double branch_prob;
};

struct OutcomeTable
{
	std::vector<OutcomeCell> entries;
	double total_success_prob;
	/// Σ b p / total_success_prob
	double conditional_mean;
};

struct Outcome
{
	double b_value;
	bool postselected;
};

struct EstimateWithError
{
	/// Empty when no trial succeeded.
	std::optional<double> mean;
	/// sample standard deviation / √n_success; empty for fewer than two successes.
	std::optional<double> std_error;
	std::uint64_t n_success = 0;
	std::uint64_t n_trials = 0;
	std::uint64_t seed = 0;

	bool empty() const { return n_success == 0; }
};

OutcomeTable exact_outcome_distribution(const WeakSetup& setup, double eps);

/// Read-out of I ⊗ B followed by postselection onto f, with the branch
/// probabilities and post-collapse success probabilities precomputed.
class MeasurementSampler
{
public:
	MeasurementSampler(const WeakSetup& setup, double eps);

	Outcome draw(TrialStream& rng) const;

	std::size_t branch_count() const { return values_.size(); }
	double branch_value(std::size_t i) const { return values_[i]; }
	/// P(read eigenspace i)
	double branch_probability(std::size_t i) const { return branch_probs_[i]; }
	/// P(postselection succeeds | read eigenspace i)
	double success_probability(std::size_t i) const { return success_probs_[i]; }

	std::size_t draw_branch(TrialStream& rng) const;

private:
	std::vector<double> values_;
	std::vector<double> branch_probs_;
	std::vector<double> success_probs_;
};

/// One run of the procedure: couple, read the meter, postselect.
Outcome sample_run(const WeakSetup& setup, double eps, TrialStream& rng);

/// Per-branch tallies of n seeded trials; merging shards is order-independent.
struct SampleCounts
{
	std::vector<std::uint64_t> success;
	std::vector<std::uint64_t> failure;
	std::uint64_t n_trials = 0;

	std::uint64_t total_success() const;
	void merge(const SampleCounts& other);
};

/// Trial t uses TrialStream(seed, t). `threads` = 0 picks the hardware count.
SampleCounts sample_counts(const MeasurementSampler& sampler, std::uint64_t n_trials,
	std::uint64_t seed, unsigned threads = 0);

/// Mean of b over trials whose postselection succeeded (E_eps(B|f), not
/// divided by eps).
EstimateWithError monte_carlo_conditional_mean(const WeakSetup& setup, double eps,
	std::uint64_t n_trials, std::uint64_t seed);

/// Mean of b over all trials (⟨r,(I ⊗ B) r⟩, not divided by eps).
EstimateWithError monte_carlo_unconditional_mean(const WeakSetup& setup, double eps,
	std::uint64_t n_trials, std::uint64_t seed);

EstimateWithError conditional_estimate(const MeasurementSampler& sampler, const SampleCounts& counts,
	std::uint64_t seed);
EstimateWithError unconditional_estimate(const MeasurementSampler& sampler, const SampleCounts& counts,
	std::uint64_t seed);

/// Direct projective measurement of A on s, then postselection onto f; the
/// mean over successes estimates projective_conditional_expectation.
EstimateWithError projective_A_oracle(const Observable& a, const StateVector& s,
	const StateVector& f, std::uint64_t n_trials, std::uint64_t seed);

struct ChiSquareResult
{
	double statistic;
	int degrees_of_freedom;
	double p_value;
};

/// Pearson goodness-of-fit of the joint (branch, success) tallies against the
/// exact table. Cells expecting fewer than 5 counts are pooled.
ChiSquareResult chi_square_test(const SampleCounts& counts, const OutcomeTable& table);

} // namespace weakmeas::oracle
