// weakmeas <scenario> (--config <path> | --preset <name>) [overrides]

#include "weakmeas/cli/config.hpp"
#include "weakmeas/cli/report.hpp"
#include "weakmeas/cli/scenarios.hpp"
#include "weakmeas/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{

constexpr int exit_usage = 2;
constexpr int exit_failure = 1;

std::string joined(const std::vector<std::string>& names)
{
	std::string out;
	for(const auto& n : names)
	{
		out += out.empty() ? n : ", " + n;
	}
	return out;
}

} // namespace

int main(int argc, char** argv)
{
	using namespace weakmeas;
	using namespace weakmeas::cli;

	CLI::App app{"Weak measurement experiments: numeric and closed-form weak values, sampling oracles, grid meters."};
	app.set_version_flag("--version", "weakmeas 1.0");

	std::string scenario_name;
	std::string config_path;
	std::string preset_name;
	std::vector<double> rho;
	std::vector<double> eps;
	std::uint64_t trials = 0;
	std::uint64_t seed = 0;
	std::string out_path;
	std::string format;
	Index grid_n = 0;
	double grid_l = 0.0;
	int order = 0;
	bool dump_config = false;

	app.add_option("scenario", scenario_name, "Scenario to run")
		->check(CLI::IsMember(scenario_names()));
	auto* config_opt = app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
	auto* preset_opt = app.add_option("--preset", preset_name, "Built-in config")
						   ->check(CLI::IsMember(preset_names()));
	config_opt->excludes(preset_opt);
	auto* rho_opt = app.add_option("--rho", rho, "Meter rho; a comma list sets the sweep points")->delimiter(',');
	auto* eps_opt = app.add_option("--eps", eps, "Descending coupling schedule, comma separated")->delimiter(',');
	auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials (0 disables optional sampling)");
	auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
	auto* out_opt = app.add_option("--out", out_path, "Output file (default: standard output)");
	auto* format_opt = app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
	auto* grid_n_opt = app.add_option("--grid-n", grid_n, "Grid meter points (power of two, >= 128)");
	auto* grid_l_opt = app.add_option("--grid-L", grid_l, "Grid meter half width (>= 10)");
	auto* order_opt = app.add_option("--order", order, "Richardson extrapolation order");
	auto* meter_opt = app.add_option("--meter", "Meter kind: qubit or grid")->check(CLI::IsMember({"qubit", "grid"}));
	app.add_flag("--dump-config", dump_config, "Print the resolved config as JSON and exit");
	app.add_flag_callback("--list-presets", [] {
		std::cout << joined(preset_names()) << '\n';
		throw CLI::Success();
	}, "List built-in configs");

	try
	{
		app.parse(argc, argv);
	}
	catch(const CLI::ParseError& e)
	{
		return app.exit(e) == 0 ? 0 : exit_usage;
	}

	try
	{
		ExperimentConfig config;
		if(config_opt->count() > 0)
		{
			config = load_config(config_path);
		}
		else if(preset_opt->count() > 0)
		{
			config = preset(preset_name);
		}
		else
		{
			throw ConfigError("one of --config or --preset is required (presets: " + joined(preset_names()) + ")");
		}

		if(!scenario_name.empty())
		{
			config.scenario = parse_scenario(scenario_name);
		}
		if(rho_opt->count() > 0)
		{
			config.meter.rho_list = rho;
			config.meter.rho = rho.front();
			if(rho.size() > 1 && config.scenario != Scenario::sweep_rho)
			{
				throw ConfigError("--rho takes a list only for sweep-rho");
			}
		}
		if(eps_opt->count() > 0)
		{
			config.eps = eps;
		}
		if(order_opt->count() > 0)
		{
			config.extrapolation_order = order;
		}
		if(trials_opt->count() > 0)
		{
			config.mc.n_trials = trials;
		}
		if(seed_opt->count() > 0)
		{
			config.mc.seed = seed;
		}
		if(out_opt->count() > 0)
		{
			config.output.path = out_path;
		}
		if(format_opt->count() > 0)
		{
			config.output.format = parse_output_format(format);
		}
		if(meter_opt->count() > 0)
		{
			config.meter.kind = parse_meter_kind(meter_opt->as<std::string>());
		}
		if(grid_n_opt->count() > 0)
		{
			config.meter.grid.n_points = grid_n;
		}
		if(grid_l_opt->count() > 0)
		{
			config.meter.grid.half_width = grid_l;
		}
		// overrides go through the same validation as a file
		config = config_from_json(to_json(config));

		if(dump_config)
		{
			std::cout << to_json(config).dump(2) << '\n';
			return 0;
		}
		emit(run(config), config, std::cout);
		return 0;
	}
	catch(const ConfigError& e)
	{
		std::cerr << "weakmeas: " << e.what() << '\n';
		return exit_usage;
	}
	catch(const Error& e)
	{
		std::cerr << "weakmeas: " << e.what() << '\n';
		return exit_failure;
	}
}
