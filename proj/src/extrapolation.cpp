#include "weakmeas/extrapolation.hpp"

#include "weakmeas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace weakmeas
{

namespace
{

// Neville tableau entry of the given order ending at sample `last`.
double neville(std::span<const double> h, std::span<const double> v, std::size_t last, int order)
{
	const std::size_t first = last - static_cast<std::size_t>(order);
	std::vector<double> t(v.begin() + static_cast<std::ptrdiff_t>(first),
		v.begin() + static_cast<std::ptrdiff_t>(last) + 1);
	for(int k = 1; k <= order; ++k)
	{
		for(std::size_t i = t.size() - 1; i >= static_cast<std::size_t>(k); --i)
		{
			const double hi = h[first + i];
			const double hk = h[first + i - static_cast<std::size_t>(k)];
			t[i] = (hk * t[i] - hi * t[i - 1]) / (hk - hi);
		}
	}
	return t.back();
}

} // namespace

Extrapolation richardson_extrapolate(std::span<const double> steps, std::span<const double> values,
	int order)
{
	if(steps.size() != values.size())
	{
		throw ScheduleError("extrapolation: steps and values differ in length");
	}
	if(steps.size() < 2)
	{
		throw ScheduleError("extrapolation needs at least two step sizes");
	}
	if(order < 1)
	{
		throw ScheduleError("extrapolation order must be at least 1");
	}
	for(std::size_t i = 1; i < steps.size(); ++i)
	{
		if(steps[i] == steps[i - 1])
		{
			throw ScheduleError("extrapolation step sizes must be distinct");
		}
	}

	const std::size_t n = steps.size();
	const int p = std::min(order, static_cast<int>(n) - 1);
	const std::size_t last = n - 1;
	const double value = neville(steps, values, last, p);

	Extrapolation out{value, 0.0, true, p};
	if(last >= static_cast<std::size_t>(p) + 1)
	{
		const double previous = neville(steps, values, last - 1, p);
		out.error_estimate = std::abs(value - previous);
		if(last >= static_cast<std::size_t>(p) + 2)
		{
			const double before = neville(steps, values, last - 2, p);
			const double previous_error = std::abs(previous - before);
			const double floor = 1e-9 * std::max(1.0, std::abs(value));
			out.converged = out.error_estimate <= previous_error || out.error_estimate <= floor;
		}
	}
	else
	{
		out.error_estimate = p > 1 ? std::abs(value - neville(steps, values, last, p - 1))
								   : std::abs(values[last] - value);
	}
	return out;
}

std::vector<double> observed_orders(std::span<const double> steps, std::span<const double> errors)
{
	if(steps.size() != errors.size())
	{
		throw ScheduleError("observed_orders: length mismatch");
	}
	std::vector<double> orders;
	for(std::size_t i = 0; i + 1 < steps.size(); ++i)
	{
		orders.push_back(std::log(std::abs(errors[i]) / std::abs(errors[i + 1]))
			/ std::log(steps[i] / steps[i + 1]));
	}
	return orders;
}

} // namespace weakmeas
