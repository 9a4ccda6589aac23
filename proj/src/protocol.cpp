#include "weakmeas/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

namespace weakmeas
{

namespace
{

void require_positive_eps(double eps, const char* what)
{
	if(!(eps > 0.0) || !std::isfinite(eps))
	{
		throw ScheduleError(std::string(what) + " requires eps > 0");
	}
}

void require_defined(const WeakSetup& setup)
{
	if(!setup.postselection_defined())
	{
		throw UndefinedWeakValue("weak value undefined: <f,s> is numerically zero");
	}
}

void require_defined(const StateVector& s, const StateVector& f)
{
	if(std::abs(inner(f, s)) <= orthogonality_cutoff)
	{
		throw UndefinedWeakValue("weak value undefined: <f,s> is numerically zero");
	}
}

// ⟨a, b⟩ for coefficient matrices of composite vectors.
Complex frobenius_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
	return (a.conjugate().cwiseProduct(b)).sum();
}

// Meter vector y = Σ_i conj(f_i) V_i. (P_f ⊗ X) r has coefficients f (X y)ᵀ, so
// ⟨r,(P_f ⊗ X) r⟩ = ⟨y, X y⟩.
Eigen::VectorXcd postselected_meter_vector(const WeakSetup& setup, const StateVector& r)
{
	const Eigen::MatrixXcd coeffs = coefficient_matrix(r, setup.dim_system(), setup.dim_meter());
	return coeffs.transpose() * setup.postselected().amps().conjugate();
}

} // namespace

// ------------------------------------------------------------------ MeterSpec

struct MeterSpec::Cache
{
	std::once_flag coupling_once;
	std::once_flag reading_once;
	std::shared_ptr<const SpectralDecomposition> coupling;
	std::shared_ptr<const SpectralDecomposition> reading;
};

MeterSpec::MeterSpec(StateVector m, Observable reading, Observable coupling)
	: state_(std::move(m)), reading_(std::move(reading)), coupling_(std::move(coupling)),
	  cache_(std::make_shared<Cache>())
{
	if(reading_.dim() != state_.dim() || coupling_.dim() != state_.dim())
	{
		throw DimensionError("meter: state, reading and coupling dimensions differ");
	}
	if(!state_.is_normalized())
	{
		throw StateError("meter state must be normalized");
	}
	const Eigen::VectorXcd bm = reading_.matrix() * state_.amps();
	zero_moment_ = state_.amps().dot(bm);
	coupling_moment_ = state_.amps().dot(reading_.matrix() * (coupling_.matrix() * state_.amps()));
}

MeterSpec MeterSpec::uncalibrated(StateVector m, Observable reading, Observable coupling)
{
	return MeterSpec(std::move(m), std::move(reading), std::move(coupling));
}

MeterSpec MeterSpec::calibrated(StateVector m, Observable reading, Observable coupling)
{
	MeterSpec meter(std::move(m), std::move(reading), std::move(coupling));
	if(std::abs(meter.zero_moment()) > zero_reading_tolerance)
	{
		throw CalibrationError("meter does not read zero: |<m,Bm>| = "
			+ std::to_string(std::abs(meter.zero_moment())));
	}
	if(std::abs(meter.gain() - 1.0) > gain_tolerance)
	{
		throw CalibrationError("meter gain 2 Im<m,BGm> = " + std::to_string(meter.gain())
			+ " differs from 1");
	}
	return meter;
}

bool MeterSpec::is_calibrated() const
{
	return std::abs(zero_moment_) <= zero_reading_tolerance
		&& std::abs(gain() - 1.0) <= gain_tolerance;
}

std::shared_ptr<const SpectralDecomposition> MeterSpec::coupling_spectrum() const
{
	std::call_once(cache_->coupling_once, [this] {
		cache_->coupling = std::make_shared<const SpectralDecomposition>(eig_hermitian(coupling_));
	});
	return cache_->coupling;
}

std::shared_ptr<const SpectralDecomposition> MeterSpec::reading_spectrum() const
{
	std::call_once(cache_->reading_once, [this] {
		cache_->reading = std::make_shared<const SpectralDecomposition>(eig_hermitian(reading_));
	});
	return cache_->reading;
}

// ------------------------------------------------------------------ WeakSetup

WeakSetup::WeakSetup(Observable a, StateVector s, StateVector f, MeterSpec meter)
	: a_(std::move(a)), s_(std::move(s)), f_(std::move(f)), meter_(std::move(meter))
{
	if(s_.dim() != a_.dim() || f_.dim() != a_.dim())
	{
		throw DimensionError("setup: A, s and f dimensions differ");
	}
	if(!s_.is_normalized() || !f_.is_normalized())
	{
		throw StateError("setup: s and f must be normalized");
	}
	spectrum_ = std::make_shared<const SpectralDecomposition>(eig_hermitian(a_));
}

Complex WeakSetup::overlap() const
{
	return inner(f_, s_);
}

bool WeakSetup::postselection_defined() const
{
	return std::abs(overlap()) > orthogonality_cutoff;
}

CouplingPropagator WeakSetup::propagator() const
{
	return CouplingPropagator(spectrum_, meter_.coupling_spectrum());
}

WeakSetup WeakSetup::with_meter(MeterSpec meter) const
{
	WeakSetup out = *this;
	out.meter_ = std::move(meter);
	return out;
}

// ---------------------------------------------------------------- EpsSchedule

EpsSchedule::EpsSchedule(std::vector<double> eps_values, int extrapolation_order)
	: eps_(std::move(eps_values)), order_(extrapolation_order)
{
	if(eps_.size() < 2)
	{
		throw ScheduleError("eps schedule needs at least two values");
	}
	if(order_ < 1)
	{
		throw ScheduleError("extrapolation order must be at least 1");
	}
	for(std::size_t i = 0; i < eps_.size(); ++i)
	{
		if(!(eps_[i] > 0.0 && eps_[i] <= 0.5))
		{
			throw ScheduleError("eps values must lie in (0, 0.5]");
		}
		if(i > 0 && !(eps_[i] < eps_[i - 1]))
		{
			throw ScheduleError("eps values must be strictly descending");
		}
	}
}

EpsSchedule EpsSchedule::standard()
{
	return EpsSchedule({1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4});
}

bool WeakValueReport::numeric_agrees() const
{
	return std::abs(numeric.value - closed_form) <= tolerance;
}

// ----------------------------------------------------------------- operations

StateVector coupled_state(const WeakSetup& setup, double eps)
{
	if(!(eps >= 0.0))
	{
		throw ScheduleError("coupled_state requires eps >= 0");
	}
	const StateVector product = tensor_state(setup.preselected(), setup.meter().state());
	if(eps == 0.0)
	{
		return product;
	}
	return setup.propagator().apply(eps, product);
}

double meter_reading(const WeakSetup& setup, double eps)
{
	require_positive_eps(eps, "meter_reading");
	const StateVector r = coupled_state(setup, eps);
	const Eigen::MatrixXcd coeffs = coefficient_matrix(r, setup.dim_system(), setup.dim_meter());
	const Eigen::MatrixXcd image = coeffs * setup.meter().reading().matrix().transpose();
	return frobenius_inner(coeffs, image).real() / eps;
}

Extrapolation unconditional_limit(const WeakSetup& setup, const EpsSchedule& schedule)
{
	std::vector<double> readings;
	readings.reserve(schedule.values().size());
	for(double eps : schedule.values())
	{
		readings.push_back(meter_reading(setup, eps));
	}
	return richardson_extrapolate(schedule.values(), readings, schedule.extrapolation_order());
}

double postselection_probability(const WeakSetup& setup, double eps)
{
	const StateVector r = coupled_state(setup, eps);
	return postselected_meter_vector(setup, r).squaredNorm();
}

double conditional_expectation(const WeakSetup& setup, double eps)
{
	require_positive_eps(eps, "conditional_expectation");
	require_defined(setup);
	const StateVector r = coupled_state(setup, eps);
	const Eigen::VectorXcd y = postselected_meter_vector(setup, r);
	const double probability = y.squaredNorm();
	if(!(probability >= empty_condition_cutoff))
	{
		throw EmptyCondition("postselection probability is numerically zero");
	}
	return y.dot(setup.meter().reading().matrix() * y).real() / probability;
}

Extrapolation weak_value_numeric(const WeakSetup& setup, const EpsSchedule& schedule)
{
	require_defined(setup);
	std::vector<double> normalized;
	normalized.reserve(schedule.values().size());
	for(double eps : schedule.values())
	{
		normalized.push_back(conditional_expectation(setup, eps) / eps);
	}
	return richardson_extrapolate(schedule.values(), normalized, schedule.extrapolation_order());
}

Complex aav_complex_weak_value(const Observable& a, const StateVector& s, const StateVector& f)
{
	require_defined(s, f);
	return inner(f, a.apply(s)) / inner(f, s);
}

double traditional_weak_value(const Observable& a, const StateVector& s, const StateVector& f)
{
	return aav_complex_weak_value(a, s, f).real();
}

double weak_value_closed_form(const WeakSetup& setup)
{
	require_defined(setup);
	const Complex ratio = aav_complex_weak_value(setup.observable(), setup.preselected(),
		setup.postselected());
	return 2.0 * (ratio * setup.meter().coupling_moment()).imag();
}

double projective_conditional_expectation(const Observable& a, const StateVector& s,
	const StateVector& f)
{
	if(s.dim() != a.dim() || f.dim() != a.dim())
	{
		throw DimensionError("projective_conditional_expectation: dimension mismatch");
	}
	const SpectralDecomposition spectrum = eig_hermitian(a);
	double weighted = 0.0;
	double total = 0.0;
	for(const Eigenspace& group : spectrum.groups())
	{
		const Eigen::VectorXcd projected = spectrum.projector(group) * s.amps();
		const double weight = std::norm(f.amps().dot(projected));
		weighted += group.value * weight;
		total += weight;
	}
	if(!(total > empty_condition_cutoff))
	{
		throw EmptyCondition("postselection after measuring A never succeeds");
	}
	return weighted / total;
}

DensityMatrix post_measurement_system_state(const WeakSetup& setup, double eps)
{
	const StateVector r = coupled_state(setup, eps);
	const Eigen::MatrixXcd coeffs = coefficient_matrix(r, setup.dim_system(), setup.dim_meter());
	const auto spectrum = setup.meter().reading_spectrum();
	// Column u of `branches` is V conj(u): (I ⊗ P_u) r has coefficients y_u uᵀ.
	const Eigen::MatrixXcd branches = coeffs * spectrum->eigenvectors().conjugate();

	const Index ds = setup.dim_system();
	Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Zero(ds, ds);
	for(const Eigenspace& group : spectrum->groups())
	{
		const auto cols = branches.middleCols(group.first, group.count);
		const Eigen::MatrixXcd unnormalized = cols * cols.adjoint();
		const double weight = unnormalized.trace().real();
		if(weight <= 0.0)
		{
			continue;
		}
		// p_Q times the normalized branch state
		mixed += weight * (unnormalized / weight);
	}
	return DensityMatrix(mixed);
}

double disturbance(const WeakSetup& setup, double eps)
{
	const DensityMatrix after = post_measurement_system_state(setup, eps);
	return trace_distance(after.matrix(), DensityMatrix::pure(setup.preselected()).matrix());
}

WeakValueReport weak_value_report(const WeakSetup& setup, const EpsSchedule& schedule)
{
	const Observable& a = setup.observable();
	const Complex ratio = aav_complex_weak_value(a, setup.preselected(), setup.postselected());
	WeakValueReport report{
		weak_value_numeric(setup, schedule),
		weak_value_closed_form(setup),
		ratio.real(),
		ratio,
		projective_conditional_expectation(a, setup.preselected(), setup.postselected()),
		setup.meter().rho(),
		1e-5,
	};
	return report;
}

} // namespace weakmeas
