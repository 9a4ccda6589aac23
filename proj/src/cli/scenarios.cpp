#include "weakmeas/cli/scenarios.hpp"

#include "weakmeas/errors.hpp"
#include "weakmeas/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace weakmeas::cli
{

namespace
{

using nlohmann::json;

json finite_or_null(double x)
{
	return std::isfinite(x) ? json(x) : json(nullptr);
}

json finite_list(const std::vector<double>& xs)
{
	json out = json::array();
	for(double x : xs)
	{
		out.push_back(finite_or_null(x));
	}
	return out;
}

ResultRow blank_row(const ExperimentConfig& config, double rho)
{
	ResultRow row;
	row.scenario = std::string(to_string(config.scenario));
	row.rho = rho;
	return row;
}

/// Conditional Monte Carlo at eps, scaled by 1/eps, into the mc_* columns.
void attach_conditional_mc(ResultRow& row, const WeakSetup& setup, const ExperimentConfig& config, double eps)
{
	const oracle::EstimateWithError e = oracle::monte_carlo_conditional_mean(setup, eps, config.mc.n_trials, config.mc.seed);
	row.mc_n_success = e.n_success;
	if(e.mean)
	{
		row.mc_mean = *e.mean / eps;
	}
	if(e.std_error)
	{
		row.mc_stderr = *e.std_error / eps;
	}
}

ResultRow weak_value_row(const ExperimentConfig& config, const WeakSetup& setup, double rho)
{
	ResultRow row = blank_row(config, rho);
	if(!setup.postselection_defined())
	{
		row.status = status_undefined;
		return row;
	}
	const WeakValueReport report = weak_value_report(setup, config.schedule());
	row.wv_numeric = report.numeric.value;
	row.wv_closed = report.closed_form;
	row.wv_traditional = report.traditional;
	row.wv_aav_re = report.aav_complex.real();
	row.wv_aav_im = report.aav_complex.imag();
	row.projective_cond = report.projective_conditional;
	row.extras["error_estimate"] = report.numeric.error_estimate;
	row.extras["extrapolation_order"] = report.numeric.order;
	row.extras["rho_effective"] = report.rho_effective;
	row.extras["gain"] = setup.meter().gain();
	if(!report.numeric.converged)
	{
		row.status = status_unconverged;
	}
	else if(!report.numeric_agrees())
	{
		row.status = status_mismatch;
	}

	if(config.mc.n_trials > 0)
	{
		const double eps = config.sampling_eps();
		row.eps = eps;
		attach_conditional_mc(row, setup, config, eps);
		row.extras["exact_conditional"] = conditional_expectation(setup, eps) / eps;
		row.disturbance = disturbance(setup, eps);
	}
	return row;
}

Report make_report(const ExperimentConfig& config)
{
	Report report;
	report.scenario = config.scenario;
	report.generated_at = utc_timestamp();
	return report;
}

/// Least-squares slope and intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
	const auto n = static_cast<double>(x.size());
	double mx = 0.0;
	double my = 0.0;
	for(std::size_t i = 0; i < x.size(); ++i)
	{
		mx += x[i];
		my += y[i];
	}
	mx /= n;
	my /= n;
	double sxy = 0.0;
	double sxx = 0.0;
	for(std::size_t i = 0; i < x.size(); ++i)
	{
		sxy += (x[i] - mx) * (y[i] - my);
		sxx += (x[i] - mx) * (x[i] - mx);
	}
	const double slope = sxy / sxx;
	return {slope, my - slope * mx};
}

} // namespace

Report run(const ExperimentConfig& config)
{
	switch(config.scenario)
	{
	case Scenario::weak_value:
		return run_weak_value(config);
	case Scenario::sweep_rho:
		return run_sweep_rho(config);
	case Scenario::limit_check:
		return run_limit_check(config);
	case Scenario::sample:
		return run_sample(config);
	case Scenario::disturbance:
		return run_disturbance(config);
	case Scenario::aav_grid:
		return run_aav_grid(config);
	case Scenario::compare:
		return run_compare(config);
	}
	throw ConfigError("unhandled scenario");
}

Report run_weak_value(const ExperimentConfig& config)
{
	Report report = make_report(config);
	const WeakSetup setup = build_setup(config);
	report.rows.push_back(weak_value_row(config, setup, config.meter.rho));
	const Complex overlap = setup.overlap();
	report.summary["overlap"] = {overlap.real(), overlap.imag()};
	report.summary["expectation_A"] = expectation(setup.observable(), setup.preselected());
	return report;
}

Report run_sweep_rho(const ExperimentConfig& config)
{
	if(config.meter.rho_list.empty())
	{
		throw ConfigError("sweep-rho needs a non-empty meter.rho_list");
	}
	Report report = make_report(config);

	std::vector<double> rhos = config.meter.rho_list;
	std::sort(rhos.begin(), rhos.end());
	std::vector<std::future<ResultRow>> pending;
	for(double rho : rhos)
	{
		pending.push_back(std::async(std::launch::async,
			[&config, rho] { return weak_value_row(config, build_setup(config, rho), rho); }));
	}
	for(auto& p : pending)
	{
		report.rows.push_back(p.get());
	}

	const Observable a(config.a);
	const StateVector s(config.s);
	const StateVector f(config.f);
	if(std::abs(inner(f, s)) <= orthogonality_cutoff)
	{
		return report;
	}
	const Complex ratio = aav_complex_weak_value(a, s, f);
	report.summary["aav_re"] = ratio.real();
	report.summary["aav_im"] = ratio.imag();
	report.summary["expected_slope"] = 2.0 * ratio.imag();

	std::vector<double> x;
	std::vector<double> y;
	for(const ResultRow& row : report.rows)
	{
		x.push_back(*row.rho);
		y.push_back(*row.wv_closed);
	}
	std::vector<double> distinct = x;
	distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
	if(distinct.size() >= 2)
	{
		const auto [slope, intercept] = linear_fit(x, y);
		report.summary["fitted_slope"] = slope;
		report.summary["intercept"] = intercept;
		report.summary["slope_error"] = std::abs(slope - 2.0 * ratio.imag());
	}
	return report;
}

Report run_limit_check(const ExperimentConfig& config)
{
	Report report = make_report(config);
	const WeakSetup setup = build_setup(config);
	const EpsSchedule schedule = config.schedule();
	const double expected = expectation(setup.observable(), setup.preselected());
	const bool conditional = setup.postselection_defined();
	const double weak_closed = conditional ? weak_value_closed_form(setup) : 0.0;

	std::vector<double> reading_errors;
	std::vector<double> conditional_errors;
	for(double eps : schedule.values())
	{
		ResultRow row = blank_row(config, config.meter.rho);
		row.eps = eps;
		const double reading = meter_reading(setup, eps);
		row.wv_numeric = reading;
		row.wv_closed = expected;
		row.extras["abs_error"] = std::abs(reading - expected);
		reading_errors.push_back(reading - expected);
		if(conditional)
		{
			const double value = conditional_expectation(setup, eps) / eps;
			row.extras["conditional_reading"] = value;
			row.extras["conditional_abs_error"] = std::abs(value - weak_closed);
			conditional_errors.push_back(value - weak_closed);
		}
		report.rows.push_back(std::move(row));
	}

	const Extrapolation limit = unconditional_limit(setup, schedule);
	ResultRow final_row = blank_row(config, config.meter.rho);
	final_row.eps = 0.0;
	final_row.wv_numeric = limit.value;
	final_row.wv_closed = expected;
	final_row.extras["abs_error"] = std::abs(limit.value - expected);
	final_row.extras["error_estimate"] = limit.error_estimate;
	final_row.extras["extrapolation_order"] = limit.order;
	if(!limit.converged)
	{
		final_row.status = status_unconverged;
	}
	report.rows.push_back(std::move(final_row));

	const std::vector<double> orders = observed_orders(schedule.values(), reading_errors);
	report.summary["expectation_A"] = expected;
	report.summary["extrapolant"] = limit.value;
	report.summary["extrapolant_abs_error"] = std::abs(limit.value - expected);
	report.summary["reading_observed_orders"] = finite_list(orders);
	report.summary["reading_order"] = finite_or_null(orders.back());
	if(conditional)
	{
		const std::vector<double> c_orders = observed_orders(schedule.values(), conditional_errors);
		report.summary["conditional_closed_form"] = weak_closed;
		report.summary["conditional_observed_orders"] = finite_list(c_orders);
		report.summary["conditional_order"] = finite_or_null(c_orders.back());
	}
	return report;
}

Report run_sample(const ExperimentConfig& config)
{
	if(config.mc.n_trials == 0)
	{
		throw ConfigError("sample needs mc.n_trials > 0");
	}
	Report report = make_report(config);
	const WeakSetup setup = build_setup(config);
	const double eps = config.sampling_eps();
	const oracle::MeasurementSampler sampler(setup, eps);
	const oracle::SampleCounts counts = oracle::sample_counts(sampler, config.mc.n_trials, config.mc.seed);

	ResultRow row = blank_row(config, config.meter.rho);
	row.eps = eps;
	const oracle::EstimateWithError all = oracle::unconditional_estimate(sampler, counts, config.mc.seed);
	row.extras["unconditional_mc_mean"] = *all.mean / eps;
	if(all.std_error)
	{
		row.extras["unconditional_mc_stderr"] = *all.std_error / eps;
	}
	row.extras["unconditional_exact"] = meter_reading(setup, eps);
	row.extras["success_fraction"]
		= static_cast<double>(counts.total_success()) / static_cast<double>(counts.n_trials);

	if(!setup.postselection_defined())
	{
		row.status = status_undefined;
		report.rows.push_back(std::move(row));
		return report;
	}

	const oracle::OutcomeTable table = oracle::exact_outcome_distribution(setup, eps);
	const oracle::EstimateWithError conditional = oracle::conditional_estimate(sampler, counts, config.mc.seed);
	row.mc_n_success = conditional.n_success;
	if(conditional.mean)
	{
		row.mc_mean = *conditional.mean / eps;
	}
	if(conditional.std_error)
	{
		row.mc_stderr = *conditional.std_error / eps;
		row.extras["mc_z"] = (*conditional.mean - table.conditional_mean) / *conditional.std_error;
	}
	row.wv_numeric = table.conditional_mean / eps;
	row.wv_closed = weak_value_closed_form(setup);
	const Complex ratio = aav_complex_weak_value(setup.observable(), setup.preselected(), setup.postselected());
	row.wv_traditional = ratio.real();
	row.wv_aav_re = ratio.real();
	row.wv_aav_im = ratio.imag();
	row.extras["exact_success_prob"] = table.total_success_prob;

	const oracle::ChiSquareResult chi = oracle::chi_square_test(counts, table);
	report.summary["chi_square"] = chi.statistic;
	report.summary["chi_square_dof"] = chi.degrees_of_freedom;
	report.summary["chi_square_p"] = chi.p_value;
	json cells = json::array();
	for(std::size_t i = 0; i < table.entries.size(); ++i)
	{
		cells.push_back({{"b", table.entries[i].b_value}, {"exact_joint_success", table.entries[i].joint_prob_success},
			{"exact_branch", table.entries[i].branch_prob}, {"success_count", counts.success[i]},
			{"failure_count", counts.failure[i]}});
	}
	report.summary["cells"] = cells;
	report.rows.push_back(std::move(row));
	return report;
}

Report run_disturbance(const ExperimentConfig& config)
{
	Report report = make_report(config);
	const WeakSetup setup = build_setup(config);
	const EpsSchedule schedule = config.schedule();
	double previous_ratio = 0.0;
	double lo = INFINITY;
	double hi = 0.0;
	for(double eps : schedule.values())
	{
		ResultRow row = blank_row(config, config.meter.rho);
		row.eps = eps;
		const double d = disturbance(setup, eps);
		row.disturbance = d;
		row.extras["disturbance_over_eps"] = d / eps;
		if(previous_ratio > 0.0)
		{
			const double halving = (d / eps) / previous_ratio;
			row.extras["successive_ratio"] = halving;
			lo = std::min(lo, halving);
			hi = std::max(hi, halving);
		}
		previous_ratio = d / eps;
		report.rows.push_back(std::move(row));
	}
	if(hi > 0.0)
	{
		report.summary["min_successive_ratio"] = lo;
		report.summary["max_successive_ratio"] = hi;
	}
	return report;
}

Report run_aav_grid(const ExperimentConfig& config)
{
	Report report = make_report(config);
	const meters::GridSpec grid(config.meter.grid.n_points, config.meter.grid.half_width);
	const double rho = config.meter.rho;
	const MeterSpec meter = meters::gaussian_grid_meter(grid, rho);
	const WeakSetup setup(Observable(config.a), StateVector(config.s), StateVector(config.f), meter);

	ResultRow row = weak_value_row(config, setup, rho);
	const Complex zero = meter.zero_moment();
	const Complex moment = meter.coupling_moment();
	const double calibration_error = std::abs(moment - Complex{rho, 0.5});
	const double chirp = meters::chirp_equivalence_residual(grid, rho);
	row.extras["m_B_m_re"] = zero.real();
	row.extras["m_B_m_im"] = zero.imag();
	row.extras["m_BG_m_re"] = moment.real();
	row.extras["m_BG_m_im"] = moment.imag();
	row.extras["calibration_error"] = calibration_error;
	row.extras["chirp_residual"] = chirp;

	report.summary["n_points"] = grid.n_points();
	report.summary["half_width"] = grid.half_width();
	report.summary["m_B_m"] = {zero.real(), zero.imag()};
	report.summary["m_BG_m"] = {moment.real(), moment.imag()};
	report.summary["calibration_error"] = calibration_error;
	report.summary["chirp_residual"] = chirp;
	if(setup.postselection_defined())
	{
		const double qubit = weak_value_closed_form(setup.with_meter(meters::qubit_meter(rho)));
		row.extras["qubit_closed_form"] = qubit;
		row.extras["grid_vs_qubit"] = std::abs(*row.wv_numeric - qubit);
		report.summary["qubit_closed_form"] = qubit;
		report.summary["grid_vs_qubit"] = std::abs(*row.wv_numeric - qubit);
	}
	report.rows.push_back(std::move(row));
	return report;
}

Report run_compare(const ExperimentConfig& config)
{
	Report report = make_report(config);
	const WeakSetup setup = build_setup(config);
	const EpsSchedule schedule = config.schedule();
	const double eps = config.sampling_eps();
	const double expected = expectation(setup.observable(), setup.preselected());
	const Extrapolation unconditional = unconditional_limit(setup, schedule);

	ResultRow row = blank_row(config, config.meter.rho);
	row.extras["expectation_A"] = expected;
	row.extras["unconditional_limit"] = unconditional.value;
	row.extras["unconditional_gap"] = std::abs(unconditional.value - expected);
	json unconditional_part{{"meter_limit", unconditional.value}, {"expectation_A", expected},
		{"gap", std::abs(unconditional.value - expected)}};

	if(config.mc.n_trials > 0)
	{
		row.eps = eps;
		const oracle::EstimateWithError mc
			= oracle::monte_carlo_unconditional_mean(setup, eps, config.mc.n_trials, config.mc.seed);
		row.extras["unconditional_mc_mean"] = *mc.mean / eps;
		unconditional_part["mc_mean"] = *mc.mean / eps;
		if(mc.std_error)
		{
			row.extras["unconditional_mc_stderr"] = *mc.std_error / eps;
			unconditional_part["mc_stderr"] = *mc.std_error / eps;
		}
	}
	report.summary["unconditional"] = unconditional_part;

	if(!setup.postselection_defined())
	{
		row.status = status_undefined;
		report.rows.push_back(std::move(row));
		return report;
	}

	const Extrapolation weak = weak_value_numeric(setup, schedule);
	const Complex ratio = aav_complex_weak_value(setup.observable(), setup.preselected(), setup.postselected());
	const double projective
		= projective_conditional_expectation(setup.observable(), setup.preselected(), setup.postselected());
	row.wv_numeric = weak.value;
	row.wv_closed = weak_value_closed_form(setup);
	row.wv_traditional = ratio.real();
	row.wv_aav_re = ratio.real();
	row.wv_aav_im = ratio.imag();
	row.projective_cond = projective;
	row.extras["conditional_gap"] = std::abs(weak.value - projective);
	if(!weak.converged || !unconditional.converged)
	{
		row.status = status_unconverged;
	}
	json conditional_part{{"meter_limit", weak.value}, {"projective", projective},
		{"gap", std::abs(weak.value - projective)}};

	if(config.mc.n_trials > 0)
	{
		attach_conditional_mc(row, setup, config, eps);
		conditional_part["mc_mean"] = row.mc_mean ? json(*row.mc_mean) : json(nullptr);
		conditional_part["mc_stderr"] = row.mc_stderr ? json(*row.mc_stderr) : json(nullptr);
		const oracle::EstimateWithError p = oracle::projective_A_oracle(setup.observable(), setup.preselected(),
			setup.postselected(), config.mc.n_trials, config.mc.seed);
		if(p.mean)
		{
			row.extras["projective_mc_mean"] = *p.mean;
			conditional_part["projective_mc_mean"] = *p.mean;
		}
		if(p.std_error)
		{
			row.extras["projective_mc_stderr"] = *p.std_error;
			conditional_part["projective_mc_stderr"] = *p.std_error;
		}
	}
	report.summary["conditional"] = conditional_part;
	report.rows.push_back(std::move(row));
	return report;
}

} // namespace weakmeas::cli
