#pragma once

// Experiment configuration: JSON ingestion and emission, named presets, and
// construction of the protocol objects a config describes.
//
// Complex numbers are [re, im] pairs (a bare number is accepted as real),
// matrices are arrays of rows.

#include "weakmeas/meters.hpp"
#include "weakmeas/protocol.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weakmeas::cli
{

enum class Scenario
{
	weak_value,
	sweep_rho,
	limit_check,
	sample,
	disturbance,
	aav_grid,
	compare
};

enum class MeterKind
{
	qubit,
	grid
};

enum class OutputFormat
{
	csv,
	json
};

std::string_view to_string(Scenario scenario);
std::string_view to_string(MeterKind kind);
std::string_view to_string(OutputFormat format);
/// Throw ConfigError on unknown names.
Scenario parse_scenario(std::string_view name);
MeterKind parse_meter_kind(std::string_view name);
OutputFormat parse_output_format(std::string_view name);
const std::vector<std::string>& scenario_names();

struct GridConfig
{
	Index n_points = meters::GridSpec::default_points;
	double half_width = meters::GridSpec::default_half_width;

	bool operator==(const GridConfig&) const = default;
};

struct MeterConfig
{
	MeterKind kind = MeterKind::qubit;
	double rho = 0.0;
	/// Points for sweep-rho.
	std::vector<double> rho_list;
	GridConfig grid;

	bool operator==(const MeterConfig&) const = default;
};

struct McConfig
{
	/// 0 disables sampling where it is optional.
	std::uint64_t n_trials = 100000;
	std::uint64_t seed = 1;
	/// Coupling used for sampling; defaults to the largest scheduled eps.
	std::optional<double> eps;

	bool operator==(const McConfig&) const = default;
};

struct OutputConfig
{
	/// Empty writes to standard output.
	std::string path;
	/// Empty picks the scenario's natural format.
	std::optional<OutputFormat> format;

	bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig
{
	static constexpr int schema_version = 1;

	Scenario scenario = Scenario::weak_value;
	/// Literals as written; states are normalized when a setup is built.
	Eigen::MatrixXcd a;
	Eigen::VectorXcd s;
	Eigen::VectorXcd f;
	MeterConfig meter;
	std::vector<double> eps = EpsSchedule::standard().values();
	int extrapolation_order = EpsSchedule::default_order;
	McConfig mc;
	OutputConfig output;

	bool operator==(const ExperimentConfig& other) const;

	EpsSchedule schedule() const;
	/// mc.eps or the first scheduled value.
	double sampling_eps() const;
	OutputFormat resolved_format() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Validates everything that can be checked without running: schema version,
/// dimensions, Hermiticity of A, nonzero states, eps schedule. Grid limits
/// are left to the meter constructor so they fail as CalibrationError.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

const std::vector<std::string>& preset_names();
/// "aav100", "nonunique-rho50", "convexity-contrast"; ConfigError otherwise.
ExperimentConfig preset(std::string_view name);

MeterSpec build_meter(const ExperimentConfig& config, double rho);
WeakSetup build_setup(const ExperimentConfig& config, double rho);
inline WeakSetup build_setup(const ExperimentConfig& config) { return build_setup(config, config.meter.rho); }

} // namespace weakmeas::cli
