#include "weakmeas/meters.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace weakmeas::meters
{

MeterSpec qubit_meter(double rho)
{
	Eigen::MatrixXcd g(2, 2);
	g << 0.0, 1.0,
		1.0, 0.0;
	Eigen::MatrixXcd b(2, 2);
	b << Complex{0.0, 0.0}, Complex{rho, 0.5},
		Complex{rho, -0.5}, Complex{0.0, 0.0};
	return MeterSpec::calibrated(StateVector::basis(2, 0), Observable(b), Observable(g));
}

MeterSpec with_gain(const MeterSpec& meter, double gain)
{
	return MeterSpec::uncalibrated(meter.state(), Observable(gain * meter.reading().matrix()),
		meter.coupling());
}

// ------------------------------------------------------------------- GridSpec

GridSpec::GridSpec(Index n_points, double half_width)
	: n_(n_points), half_width_(half_width)
{
	const bool power_of_two = n_ > 0 && (n_ & (n_ - 1)) == 0;
	if(!power_of_two || n_ < min_points || !(half_width_ >= min_half_width))
	{
		throw CalibrationError("grid too coarse or narrow for the Gaussian meter (n = "
			+ std::to_string(n_) + ", L = " + std::to_string(half_width_)
			+ "; need a power of two n >= 128 and L >= 10)");
	}
}

Eigen::VectorXd GridSpec::points() const
{
	Eigen::VectorXd q(n_);
	for(Index k = 0; k < n_; ++k)
	{
		q[k] = point(k);
	}
	return q;
}

double GridSpec::wavenumber(Index k) const
{
	return std::numbers::pi * static_cast<double>(k) / half_width_;
}

Observable position_operator(const GridSpec& grid)
{
	return Observable::diagonal(grid.points());
}

Observable momentum_operator(const GridSpec& grid)
{
	const Index n = grid.n_points();
	const double two_pi_over_n = 2.0 * std::numbers::pi / static_cast<double>(n);
	Eigen::VectorXcd column(n);
	for(Index d = 0; d < n; ++d)
	{
		Complex sum{0.0, 0.0};
		for(Index k = -n / 2; k < n / 2; ++k)
		{
			// k d mod n keeps the phase argument small
			const Index phase_index = ((k * d) % n + n) % n;
			sum += grid.wavenumber(k) * std::polar(1.0, two_pi_over_n * static_cast<double>(phase_index));
		}
		column[d] = sum / static_cast<double>(n);
	}
	Eigen::MatrixXcd p(n, n);
	for(Index l = 0; l < n; ++l)
	{
		for(Index j = 0; j < n; ++j)
		{
			p(j, l) = column[(j - l + n) % n];
		}
	}
	return Observable(p);
}

StateVector gaussian_state(const GridSpec& grid)
{
	const Eigen::VectorXd q = grid.points();
	const double norm = std::pow(2.0 * std::numbers::pi, -0.25);
	Eigen::VectorXcd amps(q.size());
	for(Index k = 0; k < q.size(); ++k)
	{
		amps[k] = norm * std::exp(-q[k] * q[k] / 4.0) * std::sqrt(grid.spacing());
	}
	return StateVector(std::move(amps));
}

MeterSpec gaussian_grid_meter(const GridSpec& grid, double rho)
{
	const Observable q = position_operator(grid);
	const Observable p = momentum_operator(grid);
	return MeterSpec::calibrated(gaussian_state(grid), q, Observable(p.matrix() + rho * q.matrix()));
}

StateVector chirped_gaussian_state(const GridSpec& grid, double rho)
{
	const StateVector m = gaussian_state(grid);
	Eigen::VectorXcd amps = m.amps();
	for(Index k = 0; k < amps.size(); ++k)
	{
		const double q = grid.point(k);
		amps[k] *= std::polar(1.0, q * q * rho / 2.0);
	}
	return StateVector(std::move(amps));
}

double chirp_equivalence_residual(const GridSpec& grid, double rho)
{
	const Eigen::MatrixXcd q = position_operator(grid).matrix();
	const Eigen::MatrixXcd p = momentum_operator(grid).matrix();
	const Eigen::VectorXcd m = gaussian_state(grid).amps();
	const Eigen::VectorXcd c = chirped_gaussian_state(grid, rho).amps();
	const Complex chirped = c.dot(q * (p * c));
	const Complex shifted = m.dot(q * ((p + rho * q) * m));
	return std::abs(chirped - shifted);
}

} // namespace weakmeas::meters
