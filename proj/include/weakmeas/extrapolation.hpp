#pragma once

#include <span>
#include <vector>

namespace weakmeas
{

/// Result of extrapolating a sequence v(h_k) to h = 0.
struct Extrapolation
{
	double value;
	/// |T(last window) - T(previous window)| at the working order, or the
	/// order-to-order difference when only one window is available.
	double error_estimate;
	/// False when the error estimate grew between the last two windows.
	bool converged;
	/// Order actually used (limited by the number of samples).
	int order;
};

/// Polynomial (Richardson/Neville) extrapolation to h = 0 of samples taken at
/// distinct step sizes h. Order p eliminates the error terms h, ..., h^p and
/// uses p + 1 consecutive samples; with h halving, order 1 is the classic
/// 2 v(h/2) - v(h). Throws ScheduleError for fewer than two samples.
Extrapolation richardson_extrapolate(std::span<const double> steps, std::span<const double> values,
	int order);

/// Observed convergence order log(e_k / e_{k+1}) / log(h_k / h_{k+1}) for each
/// successive pair, given errors e_k against a known limit.
std::vector<double> observed_orders(std::span<const double> steps, std::span<const double> errors);

} // namespace weakmeas
