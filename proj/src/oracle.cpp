#include "weakmeas/oracle.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace weakmeas::oracle
{

namespace
{

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z)
{
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

void require_trials(std::uint64_t n_trials)
{
	if(n_trials < 1)
	{
		throw ScheduleError("Monte Carlo needs at least one trial");
	}
}

EstimateWithError estimate_from_tallies(const std::vector<double>& values,
	const std::vector<std::uint64_t>& hits, std::uint64_t n_trials, std::uint64_t seed)
{
	EstimateWithError out;
	out.n_trials = n_trials;
	out.seed = seed;
	for(std::uint64_t h : hits)
	{
		out.n_success += h;
	}
	if(out.n_success == 0)
	{
		return out;
	}
	const double n = static_cast<double>(out.n_success);
	double sum = 0.0;
	for(std::size_t i = 0; i < values.size(); ++i)
	{
		sum += static_cast<double>(hits[i]) * values[i];
	}
	const double mean = sum / n;
	out.mean = mean;
	if(out.n_success >= 2)
	{
		double squares = 0.0;
		for(std::size_t i = 0; i < values.size(); ++i)
		{
			const double d = values[i] - mean;
			squares += static_cast<double>(hits[i]) * d * d;
		}
		out.std_error = std::sqrt(squares / (n - 1.0) / n);
	}
	return out;
}

} // namespace

// ---------------------------------------------------------------- TrialStream

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t trial)
	: state_(mix64(seed + golden_gamma) ^ mix64(trial * golden_gamma + 0x632be59bd9b4e019ULL))
{
}

TrialStream::result_type TrialStream::operator()()
{
	state_ += golden_gamma;
	return mix64(state_);
}

double TrialStream::uniform()
{
	return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

// --------------------------------------------------------------- exact tables

OutcomeTable exact_outcome_distribution(const WeakSetup& setup, double eps)
{
	if(!(eps > 0.0))
	{
		throw ScheduleError("exact_outcome_distribution requires eps > 0");
	}
	const StateVector r = coupled_state(setup, eps);
	const Eigen::MatrixXcd coeffs = coefficient_matrix(r, setup.dim_system(), setup.dim_meter());
	const auto spectrum = setup.meter().reading_spectrum();
	const Eigen::MatrixXcd& u = spectrum->eigenvectors();
	const Eigen::VectorXcd f = setup.postselected().amps();

	OutcomeTable table{{}, 0.0, 0.0};
	double weighted = 0.0;
	for(const Eigenspace& group : spectrum->groups())
	{
		OutcomeCell cell{group.value, 0.0, 0.0};
		for(Index k = group.first; k < group.first + group.count; ++k)
		{
			// ⟨x ⊗ u, r⟩ = x† V conj(u)
			const Eigen::VectorXcd along_u = coeffs * u.col(k).conjugate();
			cell.branch_prob += along_u.squaredNorm();
			cell.joint_prob_success += std::norm(f.dot(along_u));
		}
		table.total_success_prob += cell.joint_prob_success;
		weighted += cell.b_value * cell.joint_prob_success;
		table.entries.push_back(cell);
	}
	if(!(table.total_success_prob >= empty_condition_cutoff))
	{
		throw EmptyCondition("postselection probability is numerically zero");
	}
	table.conditional_mean = weighted / table.total_success_prob;
	return table;
}

// ---------------------------------------------------------- MeasurementSampler

MeasurementSampler::MeasurementSampler(const WeakSetup& setup, double eps)
{
	if(!(eps > 0.0))
	{
		throw ScheduleError("sampling requires eps > 0");
	}
	const StateVector r = coupled_state(setup, eps);
	const Eigen::MatrixXcd coeffs = coefficient_matrix(r, setup.dim_system(), setup.dim_meter());
	const auto spectrum = setup.meter().reading_spectrum();
	const Eigen::RowVectorXcd f_adjoint = setup.postselected().amps().adjoint();

	// ⟨x ⊗ u_k, r⟩ = x† V conj(u_k): column k holds r along the k-th eigenvector of B
	const Eigen::MatrixXcd along = coeffs * spectrum->eigenvectors().conjugate();
	const Eigen::RowVectorXcd f_along = f_adjoint * along;

	for(const Eigenspace& group : spectrum->groups())
	{
		// ‖(I ⊗ P_Q) r‖² and ‖(P_f ⊗ P_Q) r‖²
		const double p = along.middleCols(group.first, group.count).squaredNorm();
		const double joint = f_along.segment(group.first, group.count).squaredNorm();
		values_.push_back(group.value);
		branch_probs_.push_back(p);
		// success probability of the renormalized branch
		success_probs_.push_back(p > 0.0 ? std::clamp(joint / p, 0.0, 1.0) : 0.0);
	}
}

std::size_t MeasurementSampler::draw_branch(TrialStream& rng) const
{
	const double u = rng.uniform();
	double cumulative = 0.0;
	std::size_t last_possible = 0;
	for(std::size_t i = 0; i < branch_probs_.size(); ++i)
	{
		if(branch_probs_[i] <= 0.0)
		{
			continue;
		}
		cumulative += branch_probs_[i];
		last_possible = i;
		if(u < cumulative)
		{
			return i;
		}
	}
	// rounding left the cumulative sum slightly below one
	return last_possible;
}

Outcome MeasurementSampler::draw(TrialStream& rng) const
{
	const std::size_t branch = draw_branch(rng);
	const bool success = rng.uniform() < success_probs_[branch];
	return Outcome{values_[branch], success};
}

Outcome sample_run(const WeakSetup& setup, double eps, TrialStream& rng)
{
	return MeasurementSampler(setup, eps).draw(rng);
}

// --------------------------------------------------------------- SampleCounts

std::uint64_t SampleCounts::total_success() const
{
	std::uint64_t total = 0;
	for(std::uint64_t c : success)
	{
		total += c;
	}
	return total;
}

void SampleCounts::merge(const SampleCounts& other)
{
	success.resize(std::max(success.size(), other.success.size()), 0);
	failure.resize(std::max(failure.size(), other.failure.size()), 0);
	for(std::size_t i = 0; i < other.success.size(); ++i)
	{
		success[i] += other.success[i];
		failure[i] += other.failure[i];
	}
	n_trials += other.n_trials;
}

SampleCounts sample_counts(const MeasurementSampler& sampler, std::uint64_t n_trials,
	std::uint64_t seed, unsigned threads)
{
	const std::size_t branches = sampler.branch_count();
	auto run_shard = [&sampler, branches, seed](std::uint64_t begin, std::uint64_t end) {
		SampleCounts counts{std::vector<std::uint64_t>(branches, 0),
			std::vector<std::uint64_t>(branches, 0), end - begin};
		for(std::uint64_t t = begin; t < end; ++t)
		{
			TrialStream rng(seed, t);
			const std::size_t branch = sampler.draw_branch(rng);
			if(rng.uniform() < sampler.success_probability(branch))
			{
				++counts.success[branch];
			}
			else
			{
				++counts.failure[branch];
			}
		}
		return counts;
	};

	if(threads == 0)
	{
		threads = std::max(1u, std::thread::hardware_concurrency());
	}
	const std::uint64_t shards = std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, n_trials / 4096));
	if(shards <= 1)
	{
		return run_shard(0, n_trials);
	}
	std::vector<std::future<SampleCounts>> parts;
	for(std::uint64_t k = 0; k < shards; ++k)
	{
		const std::uint64_t begin = n_trials * k / shards;
		const std::uint64_t end = n_trials * (k + 1) / shards;
		parts.push_back(std::async(std::launch::async, run_shard, begin, end));
	}
	SampleCounts total{std::vector<std::uint64_t>(branches, 0), std::vector<std::uint64_t>(branches, 0), 0};
	for(auto& part : parts)
	{
		total.merge(part.get());
	}
	return total;
}

EstimateWithError conditional_estimate(const MeasurementSampler& sampler, const SampleCounts& counts,
	std::uint64_t seed)
{
	std::vector<double> values;
	for(std::size_t i = 0; i < sampler.branch_count(); ++i)
	{
		values.push_back(sampler.branch_value(i));
	}
	return estimate_from_tallies(values, counts.success, counts.n_trials, seed);
}

EstimateWithError unconditional_estimate(const MeasurementSampler& sampler, const SampleCounts& counts,
	std::uint64_t seed)
{
	std::vector<double> values;
	std::vector<std::uint64_t> all;
	for(std::size_t i = 0; i < sampler.branch_count(); ++i)
	{
		values.push_back(sampler.branch_value(i));
		all.push_back(counts.success[i] + counts.failure[i]);
	}
	return estimate_from_tallies(values, all, counts.n_trials, seed);
}

EstimateWithError monte_carlo_conditional_mean(const WeakSetup& setup, double eps,
	std::uint64_t n_trials, std::uint64_t seed)
{
	require_trials(n_trials);
	const MeasurementSampler sampler(setup, eps);
	return conditional_estimate(sampler, sample_counts(sampler, n_trials, seed), seed);
}

EstimateWithError monte_carlo_unconditional_mean(const WeakSetup& setup, double eps,
	std::uint64_t n_trials, std::uint64_t seed)
{
	require_trials(n_trials);
	const MeasurementSampler sampler(setup, eps);
	return unconditional_estimate(sampler, sample_counts(sampler, n_trials, seed), seed);
}

// ------------------------------------------------------ projective A oracle

EstimateWithError projective_A_oracle(const Observable& a, const StateVector& s,
	const StateVector& f, std::uint64_t n_trials, std::uint64_t seed)
{
	require_trials(n_trials);
	if(s.dim() != a.dim() || f.dim() != a.dim())
	{
		throw DimensionError("projective_A_oracle: dimension mismatch");
	}
	const SpectralDecomposition spectrum = eig_hermitian(a);
	const Eigen::VectorXcd s_unit = s.amps() / s.norm();
	const Eigen::VectorXcd f_unit = f.amps() / f.norm();

	std::vector<double> values;
	std::vector<double> branch_probs;
	std::vector<double> success_probs;
	for(const Eigenspace& group : spectrum.groups())
	{
		const Eigen::VectorXcd projected = spectrum.projector(group) * s_unit;
		const double p = projected.squaredNorm();
		values.push_back(group.value);
		branch_probs.push_back(p);
		success_probs.push_back(p > 0.0 ? std::norm(f_unit.dot(projected / std::sqrt(p))) : 0.0);
	}

	std::vector<std::uint64_t> hits(values.size(), 0);
	for(std::uint64_t t = 0; t < n_trials; ++t)
	{
		TrialStream rng(seed, t);
		const double u = rng.uniform();
		double cumulative = 0.0;
		std::size_t branch = values.size() - 1;
		for(std::size_t i = 0; i < values.size(); ++i)
		{
			cumulative += branch_probs[i];
			if(u < cumulative && branch_probs[i] > 0.0)
			{
				branch = i;
				break;
			}
		}
		if(rng.uniform() < success_probs[branch])
		{
			++hits[branch];
		}
	}
	return estimate_from_tallies(values, hits, n_trials, seed);
}

// ----------------------------------------------------------------- chi-square

ChiSquareResult chi_square_test(const SampleCounts& counts, const OutcomeTable& table)
{
	if(counts.success.size() != table.entries.size())
	{
		throw DimensionError("chi_square_test: counts and table disagree on branch count");
	}
	const double n = static_cast<double>(counts.n_trials);
	std::vector<std::pair<double, double>> cells; // (observed, expected)
	double pooled_observed = 0.0;
	double pooled_expected = 0.0;
	auto add = [&](double observed, double probability) {
		const double expected = n * std::max(probability, 0.0);
		if(expected < 5.0)
		{
			pooled_observed += observed;
			pooled_expected += expected;
		}
		else
		{
			cells.emplace_back(observed, expected);
		}
	};
	for(std::size_t i = 0; i < table.entries.size(); ++i)
	{
		const OutcomeCell& cell = table.entries[i];
		add(static_cast<double>(counts.success[i]), cell.joint_prob_success);
		add(static_cast<double>(counts.failure[i]), cell.branch_prob - cell.joint_prob_success);
	}
	if(pooled_expected > 0.0)
	{
		cells.emplace_back(pooled_observed, pooled_expected);
	}
	else if(pooled_observed > 0.0)
	{
		return ChiSquareResult{std::numeric_limits<double>::infinity(), 0, 0.0};
	}

	double statistic = 0.0;
	for(const auto& [observed, expected] : cells)
	{
		statistic += (observed - expected) * (observed - expected) / expected;
	}
	const int dof = static_cast<int>(cells.size()) - 1;
	const double p_value = dof > 0 ? boost::math::gamma_q(dof / 2.0, statistic / 2.0) : 1.0;
	return ChiSquareResult{statistic, dof, p_value};
}

} // namespace weakmeas::oracle
