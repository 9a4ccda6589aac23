#pragma once

// Result rows and their CSV / JSON persistence.

#include "weakmeas/cli/config.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace weakmeas::cli
{

inline constexpr std::string_view status_ok = "ok";
inline constexpr std::string_view status_undefined = "undefined (⟨f,s⟩ ≈ 0)";
inline constexpr std::string_view status_unconverged = "unconverged";
inline constexpr std::string_view status_mismatch = "numeric-closed mismatch";

/// One line of output. Empty optionals are written as empty CSV cells and
/// JSON nulls.
struct ResultRow
{
	std::string scenario;
	std::optional<double> rho;
	/// Coupling at which the eps-dependent columns were evaluated; empty for
	/// rows holding only eps -> 0 limits.
	std::optional<double> eps;
	std::optional<double> wv_numeric;
	std::optional<double> wv_closed;
	std::optional<double> wv_traditional;
	std::optional<double> wv_aav_re;
	std::optional<double> wv_aav_im;
	std::optional<double> projective_cond;
	std::optional<double> mc_mean;
	std::optional<double> mc_stderr;
	std::optional<std::uint64_t> mc_n_success;
	std::optional<double> disturbance;
	std::string status{status_ok};
	/// Scenario-specific values; JSON only.
	std::map<std::string, double> extras;

	bool operator==(const ResultRow&) const = default;
};

struct Report
{
	Scenario scenario = Scenario::weak_value;
	std::vector<ResultRow> rows;
	/// Scenario-level values (fits, orders, calibration moments).
	nlohmann::json summary = nlohmann::json::object();
	/// UTC, ISO 8601.
	std::string generated_at;
};

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_line(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Inverse of write_csv for the fixed columns (extras are not carried).
std::vector<ResultRow> read_csv(std::istream& in);

nlohmann::json row_to_json(const ResultRow& row);
ResultRow row_from_json(const nlohmann::json& j);
/// {"scenario", "generated_at", "config", "rows", "summary"}
nlohmann::json report_to_json(const Report& report, const ExperimentConfig& config);

std::string utc_timestamp();

/// `<stem>.config.json` next to a CSV output.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Writes in config.resolved_format() to config.output.path, or to `fallback`
/// when the path is empty. CSV files get a config sidecar.
void emit(const Report& report, const ExperimentConfig& config, std::ostream& fallback);

} // namespace weakmeas::cli
