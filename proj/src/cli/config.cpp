#include "weakmeas/cli/config.hpp"

#include "weakmeas/errors.hpp"

#include <array>
#include <fstream>
#include <utility>

namespace weakmeas::cli
{

namespace
{

using nlohmann::json;

constexpr std::array<std::pair<Scenario, std::string_view>, 7> scenario_table{{
	{Scenario::weak_value, "weak-value"},
	{Scenario::sweep_rho, "sweep-rho"},
	{Scenario::limit_check, "limit-check"},
	{Scenario::sample, "sample"},
	{Scenario::disturbance, "disturbance"},
	{Scenario::aav_grid, "aav-grid"},
	{Scenario::compare, "compare"},
}};

json complex_to_json(Complex z)
{
	return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j, std::string_view what)
{
	if(j.is_number())
	{
		return {j.get<double>(), 0.0};
	}
	if(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
	{
		return {j[0].get<double>(), j[1].get<double>()};
	}
	throw ConfigError(std::string(what) + ": expected a number or an [re, im] pair");
}

json vector_to_json(const Eigen::VectorXcd& v)
{
	json out = json::array();
	for(Index i = 0; i < v.size(); ++i)
	{
		out.push_back(complex_to_json(v[i]));
	}
	return out;
}

Eigen::VectorXcd vector_from_json(const json& j, std::string_view what)
{
	if(!j.is_array() || j.empty())
	{
		throw ConfigError(std::string(what) + ": expected a non-empty array");
	}
	Eigen::VectorXcd v(static_cast<Index>(j.size()));
	for(std::size_t i = 0; i < j.size(); ++i)
	{
		v[static_cast<Index>(i)] = complex_from_json(j[i], what);
	}
	return v;
}

json matrix_to_json(const Eigen::MatrixXcd& m)
{
	json out = json::array();
	for(Index i = 0; i < m.rows(); ++i)
	{
		out.push_back(vector_to_json(m.row(i).transpose()));
	}
	return out;
}

Eigen::MatrixXcd matrix_from_json(const json& j, std::string_view what)
{
	if(!j.is_array() || j.empty())
	{
		throw ConfigError(std::string(what) + ": expected an array of rows");
	}
	const auto n = static_cast<Index>(j.size());
	Eigen::MatrixXcd m(n, n);
	for(Index i = 0; i < n; ++i)
	{
		const Eigen::VectorXcd row = vector_from_json(j[static_cast<std::size_t>(i)], what);
		if(row.size() != n)
		{
			throw ConfigError(std::string(what) + ": matrix must be square");
		}
		m.row(i) = row.transpose();
	}
	return m;
}

template <class T>
T field(const json& j, const char* key, T fallback)
{
	if(!j.contains(key) || j.at(key).is_null())
	{
		return fallback;
	}
	if constexpr(std::is_unsigned_v<T>)
	{
		if(!j.at(key).is_number_unsigned())
		{
			throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
		}
	}
	try
	{
		return j.at(key).get<T>();
	}
	catch(const json::exception& e)
	{
		throw ConfigError(std::string("field '") + key + "': " + e.what());
	}
}

const json& required(const json& j, const char* key)
{
	if(!j.contains(key))
	{
		throw ConfigError(std::string("missing field '") + key + "'");
	}
	return j.at(key);
}

void validate(const ExperimentConfig& c)
{
	const Index n = c.a.rows();
	if(c.s.size() != n || c.f.size() != n)
	{
		throw ConfigError("system: A, s and f must share one dimension");
	}
	if(n < 1)
	{
		throw ConfigError("system: empty observable");
	}
	// Hermiticity check of the literal
	(void)Observable(c.a);
	if(c.s.norm() == 0.0 || c.f.norm() == 0.0 || !c.s.allFinite() || !c.f.allFinite())
	{
		throw ConfigError("system: s and f must be finite and nonzero");
	}
	(void)c.schedule();
	if(c.mc.eps && !(*c.mc.eps > 0.0 && *c.mc.eps <= 0.5))
	{
		throw ConfigError("mc.eps must lie in (0, 0.5]");
	}
}

ExperimentConfig make_preset(Scenario scenario, Eigen::MatrixXcd a, Eigen::VectorXcd s, Eigen::VectorXcd f,
	double rho, std::vector<double> rho_list)
{
	ExperimentConfig c;
	c.scenario = scenario;
	c.a = std::move(a);
	c.s = std::move(s);
	c.f = std::move(f);
	c.meter.rho = rho;
	c.meter.rho_list = std::move(rho_list);
	return c;
}

Eigen::MatrixXcd sigma_x()
{
	Eigen::MatrixXcd m(2, 2);
	m << 0.0, 1.0, 1.0, 0.0;
	return m;
}

Eigen::MatrixXcd sigma_z()
{
	Eigen::MatrixXcd m(2, 2);
	m << 1.0, 0.0, 0.0, -1.0;
	return m;
}

/// A = σ_z, s = (1, 1), f = (1, -1 + δ), δ = 2/101: real AAV ratio 100.
ExperimentConfig strange_preset(Scenario scenario)
{
	const double delta = 2.0 / 101.0;
	Eigen::VectorXcd s(2);
	s << 1.0, 1.0;
	Eigen::VectorXcd f(2);
	f << 1.0, -1.0 + delta;
	ExperimentConfig c = make_preset(scenario, sigma_z(), s, f, 0.0, {-1.0, 0.0, 1.0});
	// εw ~ 1 at the standard schedule's largest step
	c.eps = {1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6};
	c.mc.eps = 1e-3;
	c.mc.n_trials = 1000000;
	return c;
}

} // namespace

std::string_view to_string(Scenario scenario)
{
	for(const auto& [value, name] : scenario_table)
	{
		if(value == scenario)
		{
			return name;
		}
	}
	return "unknown";
}

std::string_view to_string(MeterKind kind)
{
	return kind == MeterKind::qubit ? "qubit" : "grid";
}

std::string_view to_string(OutputFormat format)
{
	return format == OutputFormat::csv ? "csv" : "json";
}

Scenario parse_scenario(std::string_view name)
{
	for(const auto& [value, known] : scenario_table)
	{
		if(known == name)
		{
			return value;
		}
	}
	throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

MeterKind parse_meter_kind(std::string_view name)
{
	if(name == "qubit")
	{
		return MeterKind::qubit;
	}
	if(name == "grid")
	{
		return MeterKind::grid;
	}
	throw ConfigError("unknown meter kind '" + std::string(name) + "'");
}

OutputFormat parse_output_format(std::string_view name)
{
	if(name == "csv")
	{
		return OutputFormat::csv;
	}
	if(name == "json")
	{
		return OutputFormat::json;
	}
	throw ConfigError("unknown output format '" + std::string(name) + "'");
}

const std::vector<std::string>& scenario_names()
{
	static const std::vector<std::string> names = [] {
		std::vector<std::string> out;
		for(const auto& entry : scenario_table)
		{
			out.emplace_back(entry.second);
		}
		return out;
	}();
	return names;
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const
{
	return scenario == other.scenario && a.rows() == other.a.rows() && a == other.a && s.size() == other.s.size()
		&& s == other.s && f.size() == other.f.size() && f == other.f && meter == other.meter
		&& eps == other.eps && extrapolation_order == other.extrapolation_order && mc == other.mc
		&& output == other.output;
}

EpsSchedule ExperimentConfig::schedule() const
{
	return EpsSchedule(eps, extrapolation_order);
}

double ExperimentConfig::sampling_eps() const
{
	if(mc.eps)
	{
		return *mc.eps;
	}
	if(eps.empty())
	{
		throw ConfigError("no eps value to sample at");
	}
	return eps.front();
}

OutputFormat ExperimentConfig::resolved_format() const
{
	if(output.format)
	{
		return *output.format;
	}
	switch(scenario)
	{
	case Scenario::sweep_rho:
	case Scenario::limit_check:
	case Scenario::disturbance:
		return OutputFormat::csv;
	default:
		return OutputFormat::json;
	}
}

nlohmann::json to_json(const ExperimentConfig& c)
{
	json j;
	j["schema_version"] = ExperimentConfig::schema_version;
	j["scenario"] = to_string(c.scenario);
	j["system"] = {{"A", matrix_to_json(c.a)}, {"s", vector_to_json(c.s)}, {"f", vector_to_json(c.f)}};
	j["meter"] = {
		{"kind", to_string(c.meter.kind)},
		{"rho", c.meter.rho},
		{"rho_list", c.meter.rho_list},
		{"grid", {{"n_points", c.meter.grid.n_points}, {"half_width", c.meter.grid.half_width}}},
	};
	j["eps"] = c.eps;
	j["extrapolation_order"] = c.extrapolation_order;
	j["mc"] = {{"n_trials", c.mc.n_trials}, {"seed", c.mc.seed}, {"eps", nullptr}};
	if(c.mc.eps)
	{
		j["mc"]["eps"] = *c.mc.eps;
	}
	j["output"] = {{"path", c.output.path}, {"format", nullptr}};
	if(c.output.format)
	{
		j["output"]["format"] = to_string(*c.output.format);
	}
	return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j)
{
	if(!j.is_object())
	{
		throw ConfigError("config must be a JSON object");
	}
	const int version = field<int>(j, "schema_version", 0);
	if(version != ExperimentConfig::schema_version)
	{
		throw ConfigError("unsupported schema_version " + std::to_string(version));
	}

	ExperimentConfig c;
	c.scenario = parse_scenario(field<std::string>(j, "scenario", std::string(to_string(c.scenario))));

	const json& system = required(j, "system");
	c.a = matrix_from_json(required(system, "A"), "system.A");
	c.s = vector_from_json(required(system, "s"), "system.s");
	c.f = vector_from_json(required(system, "f"), "system.f");

	if(j.contains("meter"))
	{
		const json& m = j.at("meter");
		c.meter.kind = parse_meter_kind(field<std::string>(m, "kind", "qubit"));
		c.meter.rho = field<double>(m, "rho", 0.0);
		c.meter.rho_list = field<std::vector<double>>(m, "rho_list", {});
		if(m.contains("grid"))
		{
			c.meter.grid.n_points = field<Index>(m.at("grid"), "n_points", c.meter.grid.n_points);
			c.meter.grid.half_width = field<double>(m.at("grid"), "half_width", c.meter.grid.half_width);
		}
	}
	c.eps = field<std::vector<double>>(j, "eps", c.eps);
	c.extrapolation_order = field<int>(j, "extrapolation_order", c.extrapolation_order);
	if(j.contains("mc"))
	{
		const json& mc = j.at("mc");
		c.mc.n_trials = field<std::uint64_t>(mc, "n_trials", c.mc.n_trials);
		c.mc.seed = field<std::uint64_t>(mc, "seed", c.mc.seed);
		if(mc.contains("eps") && !mc.at("eps").is_null())
		{
			c.mc.eps = field<double>(mc, "eps", 0.0);
		}
	}
	if(j.contains("output"))
	{
		const json& out = j.at("output");
		c.output.path = field<std::string>(out, "path", "");
		if(out.contains("format") && !out.at("format").is_null())
		{
			c.output.format = parse_output_format(field<std::string>(out, "format", ""));
		}
	}

	try
	{
		validate(c);
	}
	catch(const ConfigError&)
	{
		throw;
	}
	catch(const Error& e)
	{
		// Hermiticity, schedule and state failures surface as config errors at load
		throw ConfigError(e.what());
	}
	return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
	std::ifstream in(path);
	if(!in)
	{
		throw ConfigError("cannot open config " + path.string());
	}
	json j;
	try
	{
		j = json::parse(in);
	}
	catch(const json::parse_error& e)
	{
		throw ConfigError(path.string() + ": " + e.what());
	}
	return config_from_json(j);
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path)
{
	std::ofstream out(path);
	if(!out)
	{
		throw ConfigError("cannot write " + path.string());
	}
	out << to_json(config).dump(2) << '\n';
}

const std::vector<std::string>& preset_names()
{
	static const std::vector<std::string> names{"aav100", "nonunique-rho50", "convexity-contrast"};
	return names;
}

ExperimentConfig preset(std::string_view name)
{
	if(name == "aav100")
	{
		return strange_preset(Scenario::weak_value);
	}
	if(name == "convexity-contrast")
	{
		return strange_preset(Scenario::compare);
	}
	if(name == "nonunique-rho50")
	{
		// A = σ_x, s = (1, i), f = e1: AAV ratio i, weak value 2ρ.
		Eigen::VectorXcd s(2);
		s << 1.0, Complex{0.0, 1.0};
		return make_preset(Scenario::weak_value, sigma_x(), s, Eigen::VectorXcd::Unit(2, 0), 50.0, {-50.0, 0.0, 50.0});
	}
	throw ConfigError("unknown preset '" + std::string(name) + "'");
}

MeterSpec build_meter(const ExperimentConfig& config, double rho)
{
	if(config.meter.kind == MeterKind::grid || config.scenario == Scenario::aav_grid)
	{
		return meters::gaussian_grid_meter(meters::GridSpec(config.meter.grid.n_points, config.meter.grid.half_width), rho);
	}
	return meters::qubit_meter(rho);
}

WeakSetup build_setup(const ExperimentConfig& config, double rho)
{
	return WeakSetup(Observable(config.a), StateVector(config.s), StateVector(config.f), build_meter(config, rho));
}

} // namespace weakmeas::cli
