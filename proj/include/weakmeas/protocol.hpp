#pragma once

// The weak measurement protocol: a system S in state s is coupled to a meter
// M in state m through r(eps) = exp(-i eps A ⊗ G)(s ⊗ m); the meter observable
// I ⊗ B is then read, optionally followed by postselection onto f.

#include "weakmeas/extrapolation.hpp"
#include "weakmeas/hilbert.hpp"

#include <memory>
#include <vector>

namespace weakmeas
{

inline constexpr double zero_reading_tolerance = 1e-10;
inline constexpr double gain_tolerance = 1e-8;
/// |⟨f,s⟩| at or below this makes every postselected quantity undefined.
inline constexpr double orthogonality_cutoff = 1e-12;
inline constexpr double empty_condition_cutoff = 1e-20;

/// Meter package (m, B, G). A calibrated meter reads zero on average,
/// ⟨m,Bm⟩ = 0, and has unit gain, 2 Im⟨m,BGm⟩ = 1.
class MeterSpec
{
public:
	/// Throws CalibrationError unless both calibration conditions hold.
	static MeterSpec calibrated(StateVector m, Observable reading, Observable coupling);
	/// Structural checks only; used to study deliberately mis-calibrated meters.
	static MeterSpec uncalibrated(StateVector m, Observable reading, Observable coupling);

	Index dim() const { return state_.dim(); }
	const StateVector& state() const { return state_; }
	/// B
	const Observable& reading() const { return reading_; }
	/// G
	const Observable& coupling() const { return coupling_; }

	/// ⟨m, Bm⟩
	Complex zero_moment() const { return zero_moment_; }
	/// ⟨m, BGm⟩ = rho + i gain/2
	Complex coupling_moment() const { return coupling_moment_; }
	double gain() const { return 2.0 * coupling_moment_.imag(); }
	double rho() const { return coupling_moment_.real(); }
	bool is_calibrated() const;

	/// Spectral decompositions are computed on first use and shared between
	/// copies; they are the expensive part of a large grid meter.
	std::shared_ptr<const SpectralDecomposition> coupling_spectrum() const;
	std::shared_ptr<const SpectralDecomposition> reading_spectrum() const;

private:
	struct Cache;

	MeterSpec(StateVector m, Observable reading, Observable coupling);

	StateVector state_;
	Observable reading_;
	Observable coupling_;
	Complex zero_moment_;
	Complex coupling_moment_;
	std::shared_ptr<Cache> cache_;
};

/// System observable A, preselected state s, postselected state f and a meter.
class WeakSetup
{
public:
	WeakSetup(Observable a, StateVector s, StateVector f, MeterSpec meter);

	const Observable& observable() const { return a_; }
	const StateVector& preselected() const { return s_; }
	const StateVector& postselected() const { return f_; }
	const MeterSpec& meter() const { return meter_; }

	Index dim_system() const { return a_.dim(); }
	Index dim_meter() const { return meter_.dim(); }

	/// ⟨f, s⟩
	Complex overlap() const;
	bool postselection_defined() const;

	const std::shared_ptr<const SpectralDecomposition>& system_spectrum() const { return spectrum_; }
	CouplingPropagator propagator() const;

	WeakSetup with_meter(MeterSpec meter) const;

private:
	Observable a_;
	StateVector s_;
	StateVector f_;
	MeterSpec meter_;
	std::shared_ptr<const SpectralDecomposition> spectrum_;
};

/// Descending coupling strengths at which eps-dependent quantities are
/// sampled before extrapolating to eps -> 0.
class EpsSchedule
{
public:
	static constexpr int default_order = 2;

	explicit EpsSchedule(std::vector<double> eps_values, int extrapolation_order = default_order);

	/// {1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4}
	static EpsSchedule standard();

	const std::vector<double>& values() const { return eps_; }
	int extrapolation_order() const { return order_; }

private:
	std::vector<double> eps_;
	int order_;
};

struct WeakValueReport
{
	/// Extrapolated lim E_eps(B|f)/eps.
	Extrapolation numeric;
	double closed_form;
	double traditional;
	Complex aav_complex;
	double projective_conditional;
	/// Re⟨m,BGm⟩
	double rho_effective;
	/// Declared agreement tolerance between numeric and closed form.
	double tolerance;

	bool numeric_agrees() const;
};

// r(eps) = exp(-i eps A ⊗ G)(s ⊗ m)
StateVector coupled_state(const WeakSetup& setup, double eps);

/// ⟨r, (I ⊗ B) r⟩ / eps
double meter_reading(const WeakSetup& setup, double eps);

/// lim_{eps->0} of meter_reading; equals 2 Im⟨m,BGm⟩ ⟨s,As⟩ = gain * ⟨s,As⟩.
Extrapolation unconditional_limit(const WeakSetup& setup, const EpsSchedule& schedule);

/// ⟨r, (P_f ⊗ I) r⟩
double postselection_probability(const WeakSetup& setup, double eps);

/// E_eps(B|f) = ⟨r, (P_f ⊗ B) r⟩ / ⟨r, (P_f ⊗ I) r⟩, not divided by eps.
double conditional_expectation(const WeakSetup& setup, double eps);

/// lim_{eps->0} E_eps(B|f)/eps by extrapolation over the schedule.
Extrapolation weak_value_numeric(const WeakSetup& setup, const EpsSchedule& schedule);

/// 2 Im[⟨f,As⟩⟨m,BGm⟩/⟨f,s⟩]; for a calibrated meter this is
/// Re(w) + 2 rho Im(w) with w the complex AAV ratio and rho = Re⟨m,BGm⟩.
double weak_value_closed_form(const WeakSetup& setup);

/// ⟨f,As⟩/⟨f,s⟩
Complex aav_complex_weak_value(const Observable& a, const StateVector& s, const StateVector& f);
/// Re(⟨f,As⟩/⟨f,s⟩)
double traditional_weak_value(const Observable& a, const StateVector& s, const StateVector& f);

/// Conditional expectation of a projective measurement of A given that a
/// subsequent postselection onto f succeeds: Σ α_i w_i / Σ w_i with
/// w_i = |⟨f, P_i s⟩|² over the eigenspaces P_i of A. A convex combination of
/// the eigenvalues.
double projective_conditional_expectation(const Observable& a, const StateVector& s,
	const StateVector& f);

/// State of S after one full read-out of I ⊗ B on r(eps), averaged over
/// outcomes: Σ_Q p_Q tr_M(P_{r_Q}) with r_Q the normalized branch (I ⊗ P_Q) r.
DensityMatrix post_measurement_system_state(const WeakSetup& setup, double eps);

/// Trace distance between post_measurement_system_state and P_s.
double disturbance(const WeakSetup& setup, double eps);

WeakValueReport weak_value_report(const WeakSetup& setup, const EpsSchedule& schedule);

} // namespace weakmeas
