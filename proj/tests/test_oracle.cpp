#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

#include "weakmeas/errors.hpp"
#include "weakmeas/oracle.hpp"

#include <algorithm>
#include <cmath>

using namespace weakmeas;
using namespace weakmeas::testing;
using namespace weakmeas::oracle;

namespace
{

/// Joint (B outcome, success) probabilities from the dense composite state and
/// a separately computed eigenbasis of B: one entry per eigenvector.
struct DenseJoint
{
	std::vector<double> b;
	std::vector<double> joint;
	std::vector<double> branch;
};

DenseJoint dense_joint(const WeakSetup& setup, double eps)
{
	const Eigen::VectorXcd r = dense_coupled_state(setup, eps);
	const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(setup.meter().reading().matrix());
	const Eigen::VectorXcd f = setup.postselected().amps();
	const Index ds = setup.dim_system();
	const Index dm = setup.dim_meter();

	DenseJoint out;
	for(Index k = 0; k < dm; ++k)
	{
		const Eigen::VectorXcd u = solver.eigenvectors().col(k).normalized();
		out.b.push_back(solver.eigenvalues()[k].real());
		out.joint.push_back(std::norm(kron(f, u).dot(r)));
		double branch = 0.0;
		for(Index i = 0; i < ds; ++i)
		{
			branch += std::norm(kron(Eigen::VectorXcd(Eigen::VectorXcd::Unit(ds, i)), u).dot(r));
		}
		out.branch.push_back(branch);
	}
	return out;
}

/// Qubit system with a deliberately sizeable coupling so outcome frequencies
/// differ visibly from the uncoupled ones.
WeakSetup sampling_setup()
{
	return WeakSetup(Observable(pauli_y() + 0.3 * pauli_z()), StateVector{Complex{1.0, 0.0}, Complex{0.3, 0.2}},
		StateVector{Complex{0.2, 0.0}, Complex{1.0, -0.5}}, meters::qubit_meter(0.7));
}

} // namespace

TEST_CASE("exact table against the dense composite state")
{
	Random rng(2024);
	for(int trial = 0; trial < 100; ++trial)
	{
		const WeakSetup setup = random_qubit_setup(rng, 5, 0.05);
		const double eps = rng.uniform(1e-3, 0.3);
		const OutcomeTable table = exact_outcome_distribution(setup, eps);
		const DenseJoint dense = dense_joint(setup, eps);

		double dense_success = 0.0;
		double dense_weighted = 0.0;
		for(std::size_t k = 0; k < dense.b.size(); ++k)
		{
			dense_success += dense.joint[k];
			dense_weighted += dense.b[k] * dense.joint[k];
		}
		CHECK(table.total_success_prob == doctest::Approx(dense_success).epsilon(1e-12));
		CHECK(std::abs(table.conditional_mean - dense_weighted / dense_success) < 1e-12);
		CHECK(std::abs(table.conditional_mean - conditional_expectation(setup, eps)) < 1e-12);
		CHECK(std::abs(table.conditional_mean - dense_conditional_expectation(setup, eps)) < 1e-12);

		double branches = 0.0;
		for(const OutcomeCell& cell : table.entries)
		{
			branches += cell.branch_prob;
			CHECK(cell.joint_prob_success <= cell.branch_prob + 1e-15);
		}
		CHECK(branches == doctest::Approx(1.0).epsilon(1e-12));
	}
}

TEST_CASE("success probability tends to |⟨f,s⟩|²")
{
	Random rng(5);
	const WeakSetup setup = random_qubit_setup(rng, 4, 0.2);
	const double target = std::norm(setup.overlap());
	double previous = 1.0;
	for(double eps : {1e-1, 1e-2, 1e-3, 1e-4})
	{
		const double gap = std::abs(exact_outcome_distribution(setup, eps).total_success_prob - target);
		CHECK(gap < previous);
		previous = gap;
	}
	CHECK(previous < 1e-3);
}

TEST_CASE("identity observable leaves the postselection untouched")
{
	Random rng(17);
	const StateVector s = rng.state(3);
	const StateVector f = rng.postselection(s, 0.3);
	const WeakSetup setup(Observable::identity(3), s, f, meters::qubit_meter(2.0));
	const OutcomeTable table = exact_outcome_distribution(setup, 0.05);
	CHECK(table.total_success_prob == doctest::Approx(std::norm(inner(f, s))).epsilon(1e-13));
	// the meter alone evolves under exp(-i eps G)
	const Eigen::VectorXcd m = dense_propagator(pauli_x(), 0.05) * setup.meter().state().amps();
	const double expected = m.dot(setup.meter().reading().matrix() * m).real();
	CHECK(std::abs(table.conditional_mean - expected) < 1e-13);
}

TEST_CASE("trial streams are reproducible and distinct")
{
	TrialStream a(7, 3);
	TrialStream b(7, 3);
	TrialStream c(7, 4);
	TrialStream d(8, 3);
	for(int k = 0; k < 10; ++k)
	{
		const auto x = a();
		CHECK(x == b());
		CHECK(x != c());
		CHECK(x != d());
	}
	TrialStream u(1, 1);
	double sum = 0.0;
	double lo = 1.0;
	double hi = 0.0;
	for(int k = 0; k < 100000; ++k)
	{
		const double v = u.uniform();
		lo = std::min(lo, v);
		hi = std::max(hi, v);
		sum += v;
	}
	CHECK(lo >= 0.0);
	CHECK(hi < 1.0);
	CHECK(std::abs(sum / 100000.0 - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST_CASE("sharded sampling equals serial sampling")
{
	const MeasurementSampler sampler(sampling_setup(), 0.2);
	const SampleCounts serial = sample_counts(sampler, 50000, 99, 1);
	const SampleCounts sharded = sample_counts(sampler, 50000, 99, 7);
	CHECK(serial.success == sharded.success);
	CHECK(serial.failure == sharded.failure);
	CHECK(serial.n_trials == sharded.n_trials);
	CHECK(sample_counts(sampler, 50000, 100, 1).success != serial.success);
}

TEST_CASE("sampled frequencies follow the exact table")
{
	const WeakSetup setup = sampling_setup();
	const double eps = 0.2;
	const std::uint64_t n = 1000000;
	const MeasurementSampler sampler(setup, eps);
	const OutcomeTable table = exact_outcome_distribution(setup, eps);
	const SampleCounts counts = sample_counts(sampler, n, 12345);

	REQUIRE(counts.success.size() == table.entries.size());
	for(std::size_t i = 0; i < table.entries.size(); ++i)
	{
		const double p_success = table.entries[i].joint_prob_success;
		const double p_failure = table.entries[i].branch_prob - p_success;
		const double nn = static_cast<double>(n);
		CHECK(std::abs(counts.success[i] / nn - p_success) <= 4.0 * std::sqrt(p_success * (1 - p_success) / nn));
		CHECK(std::abs(counts.failure[i] / nn - p_failure) <= 4.0 * std::sqrt(p_failure * (1 - p_failure) / nn));
	}

	const ChiSquareResult chi = chi_square_test(counts, table);
	CHECK(chi.degrees_of_freedom == 3);
	CHECK(chi.p_value > 1e-4);

	const EstimateWithError mean = conditional_estimate(sampler, counts, 12345);
	REQUIRE(mean.mean.has_value());
	REQUIRE(mean.std_error.has_value());
	CHECK(std::abs(*mean.mean - table.conditional_mean) <= 4.0 * *mean.std_error);
	CHECK(mean.n_trials == n);
}

TEST_CASE("chi-square rejects a wrong table")
{
	const MeasurementSampler sampler(sampling_setup(), 0.2);
	const SampleCounts counts = sample_counts(sampler, 200000, 3);
	const OutcomeTable wrong = exact_outcome_distribution(sampling_setup(), 0.3);
	CHECK(chi_square_test(counts, wrong).p_value < 1e-6);
}

TEST_CASE("tiny coupling samples the bare postselection rate")
{
	const WeakSetup setup = sampling_setup();
	const std::uint64_t n = 400000;
	const MeasurementSampler sampler(setup, 1e-8);
	const SampleCounts counts = sample_counts(sampler, n, 8);
	const double p = std::norm(setup.overlap());
	const double freq = static_cast<double>(counts.total_success()) / static_cast<double>(n);
	CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1 - p) / static_cast<double>(n)));
}

TEST_CASE("Monte Carlo estimates")
{
	const WeakSetup setup = sampling_setup();
	const double eps = 0.1;

	SUBCASE("conditional mean within four standard errors")
	{
		const EstimateWithError e = monte_carlo_conditional_mean(setup, eps, 300000, 42);
		REQUIRE(e.std_error.has_value());
		CHECK(std::abs(*e.mean - conditional_expectation(setup, eps)) <= 4.0 * *e.std_error);
	}
	SUBCASE("unconditional mean within four standard errors")
	{
		const EstimateWithError e = monte_carlo_unconditional_mean(setup, eps, 300000, 42);
		REQUIRE(e.std_error.has_value());
		CHECK(e.n_success == e.n_trials);
		CHECK(std::abs(*e.mean - eps * meter_reading(setup, eps)) <= 4.0 * *e.std_error);
	}
	SUBCASE("standard error shrinks like 1/√n")
	{
		const auto small = monte_carlo_conditional_mean(setup, eps, 100000, 1);
		const auto large = monte_carlo_conditional_mean(setup, eps, 400000, 1);
		CHECK(*small.std_error / *large.std_error == doctest::Approx(2.0).epsilon(0.05));
	}
	SUBCASE("a single trial has no error bar")
	{
		const EstimateWithError e = monte_carlo_unconditional_mean(setup, eps, 1, 5);
		CHECK(e.mean.has_value());
		CHECK_FALSE(e.std_error.has_value());
	}
	SUBCASE("same seed, same estimate")
	{
		const auto a = monte_carlo_conditional_mean(setup, eps, 20000, 77);
		const auto b = monte_carlo_conditional_mean(setup, eps, 20000, 77);
		CHECK(*a.mean == *b.mean);
		CHECK(a.n_success == b.n_success);
		CHECK(a.seed == 77);
	}
	SUBCASE("zero trials")
	{
		CHECK_THROWS_AS(monte_carlo_conditional_mean(setup, eps, 0, 1), ScheduleError);
	}
}

TEST_CASE("an orthogonal postselection never succeeds")
{
	const WeakSetup setup(Observable::identity(2), StateVector::basis(2, 0), StateVector::basis(2, 1),
		meters::qubit_meter(0.0));
	const EstimateWithError e = monte_carlo_conditional_mean(setup, 0.1, 5000, 1);
	CHECK(e.empty());
	CHECK_FALSE(e.mean.has_value());
	CHECK_THROWS_AS(exact_outcome_distribution(setup, 0.1), EmptyCondition);
}

TEST_CASE("projective oracle")
{
	SUBCASE("postselecting an eigenvector pins the outcome")
	{
		Random rng(3);
		const Observable a = rng.hermitian(4);
		const SpectralDecomposition spectrum = eig_hermitian(a);
		const StateVector f(spectrum.eigenvector(1));
		const StateVector s = rng.postselection(f, 0.3);
		const EstimateWithError e = projective_A_oracle(a, s, f, 20000, 4);
		CHECK(*e.mean == doctest::Approx(spectrum.groups()[1].value).epsilon(1e-12));
		CHECK(*e.std_error == doctest::Approx(0.0));
	}
	SUBCASE("canonical setup averages to zero")
	{
		const EstimateWithError e = projective_A_oracle(Observable(pauli_x()), plus_i_state(),
			StateVector::basis(2, 0), 400000, 9);
		CHECK(std::abs(*e.mean) <= 4.0 * *e.std_error);
		CHECK(projective_conditional_expectation(Observable(pauli_x()), plus_i_state(), StateVector::basis(2, 0))
			== doctest::Approx(0.0).epsilon(1e-15));
	}
	SUBCASE("agrees with the Lüders formula and stays in the spectrum")
	{
		Random rng(11);
		for(int trial = 0; trial < 5; ++trial)
		{
			const WeakSetup setup = random_qubit_setup(rng, 4, 0.3);
			const auto& a = setup.observable();
			const EstimateWithError e = projective_A_oracle(a, setup.preselected(), setup.postselected(), 200000, 100 + trial);
			const double exact = projective_conditional_expectation(a, setup.preselected(), setup.postselected());
			CHECK(std::abs(*e.mean - exact) <= 4.0 * *e.std_error);
			const SpectralDecomposition spectrum = eig_hermitian(a);
			CHECK(*e.mean >= spectrum.groups().front().value);
			CHECK(*e.mean <= spectrum.groups().back().value);
		}
	}
}

TEST_CASE("weak and projective conditioning disagree on the strange setup")
{
	const WeakSetup setup = strange_setup(0.0);
	const EpsSchedule fine({1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6});
	const double weak = weak_value_numeric(setup, fine).value;
	CHECK(weak == doctest::Approx(100.0).epsilon(1e-6));

	const EstimateWithError projective = projective_A_oracle(setup.observable(), setup.preselected(),
		setup.postselected(), 1000000, 2);
	REQUIRE(projective.mean.has_value());
	CHECK(std::abs(*projective.mean) < 0.1);
	CHECK(*projective.mean >= -1.0);
	CHECK(std::abs(weak - *projective.mean) > 99.0);
}
