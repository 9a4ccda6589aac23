#pragma once

// Concrete meters: the two-level family reaching any weak value, and a
// periodic-grid discretization of the Gaussian position/momentum meter.

#include "weakmeas/protocol.hpp"

namespace weakmeas::meters
{

/// dim M = 2, m = e1, G = σ_x, B = [[0, ρ + i/2], [ρ - i/2, 0]], so that
/// ⟨m, BGm⟩ = ρ + i/2.
MeterSpec qubit_meter(double rho);

/// Copy of `meter` with B scaled by `gain`, so 2 Im⟨m,BGm⟩ = gain × original.
/// The result is uncalibrated unless gain == 1.
MeterSpec with_gain(const MeterSpec& meter, double gain);

/// Uniform periodic grid on [-L, L) with n points; Gaussian widths are unity.
class GridSpec
{
public:
	static constexpr Index default_points = 1024;
	static constexpr double default_half_width = 20.0;
	static constexpr Index min_points = 128;
	static constexpr double min_half_width = 10.0;

	/// Throws CalibrationError when n is not a power of two, n < 128 or L < 10:
	/// such grids cannot hold the unit Gaussian meter to calibration accuracy.
	GridSpec(Index n_points = default_points, double half_width = default_half_width);

	Index n_points() const { return n_; }
	double half_width() const { return half_width_; }
	double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
	/// q_k = -L + k h
	double point(Index k) const { return -half_width_ + static_cast<double>(k) * spacing(); }
	Eigen::VectorXd points() const;
	/// 2πk/(2L) for the k-th Fourier mode, k in [-n/2, n/2).
	double wavenumber(Index k) const;

private:
	Index n_;
	double half_width_;
};

/// Q = diag(q_k)
Observable position_operator(const GridSpec& grid);

/// P = -i d/dq by periodic spectral differentiation. The matrix is circulant:
/// P_{jl} = (1/n) Σ_k κ_k exp(2πi k (j - l)/n).
Observable momentum_operator(const GridSpec& grid);

/// Samples of m(q) = (2π)^{-1/4} exp(-q²/4), renormalized on the grid.
StateVector gaussian_state(const GridSpec& grid);

/// m as above, B = Q, G = P + ρ Q; ⟨m,BGm⟩ = ρ + i/2. Throws CalibrationError
/// if the discretization misses either calibration condition.
MeterSpec gaussian_grid_meter(const GridSpec& grid, double rho);

/// q ↦ exp(+i q² ρ/2) m(q). Conjugating by this phase maps P to P + ρQ, so the
/// meter (m_chirped, Q, P) has the same ⟨m,BGm⟩ as (m, Q, P + ρQ).
StateVector chirped_gaussian_state(const GridSpec& grid, double rho);

/// |⟨c, Q P c⟩ - ⟨m, Q (P + ρQ) m⟩| with c the chirped state.
double chirp_equivalence_residual(const GridSpec& grid, double rho);

} // namespace weakmeas::meters
