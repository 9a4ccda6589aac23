#include "weakmeas/cli/report.hpp"

#include "weakmeas/errors.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace weakmeas::cli
{

namespace
{

using nlohmann::json;

/// Shortest text that parses back to the same double.
std::string format_double(double x)
{
	char buffer[32];
	const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
	return std::string(buffer, result.ptr);
}

template <class T>
std::string cell(const std::optional<T>& value)
{
	if(!value)
	{
		return {};
	}
	if constexpr(std::is_floating_point_v<T>)
	{
		return format_double(*value);
	}
	else
	{
		return std::to_string(*value);
	}
}

template <class T>
std::optional<T> parse_cell(std::string_view text)
{
	if(text.empty())
	{
		return std::nullopt;
	}
	T value{};
	const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
	if(result.ec != std::errc{} || result.ptr != text.data() + text.size())
	{
		throw ConfigError("malformed CSV cell '" + std::string(text) + "'");
	}
	return value;
}

std::vector<std::string> split(const std::string& line)
{
	std::vector<std::string> out;
	std::string current;
	for(char c : line)
	{
		if(c == ',')
		{
			out.push_back(current);
			current.clear();
		}
		else if(c != '\r')
		{
			current.push_back(c);
		}
	}
	out.push_back(current);
	return out;
}

template <class T>
json optional_json(const std::optional<T>& value)
{
	return value ? json(*value) : json(nullptr);
}

template <class T>
std::optional<T> optional_from_json(const json& j, const char* key)
{
	if(!j.contains(key) || j.at(key).is_null())
	{
		return std::nullopt;
	}
	return j.at(key).get<T>();
}

} // namespace

const std::vector<std::string>& csv_columns()
{
	static const std::vector<std::string> columns{"scenario", "rho", "eps", "wv_numeric", "wv_closed",
		"wv_traditional", "wv_aav_re", "wv_aav_im", "projective_cond", "mc_mean", "mc_stderr", "mc_n_success",
		"disturbance", "status"};
	return columns;
}

std::string csv_header()
{
	std::string out;
	for(const std::string& c : csv_columns())
	{
		out += out.empty() ? c : "," + c;
	}
	return out;
}

std::string csv_line(const ResultRow& row)
{
	const std::vector<std::string> cells{row.scenario, cell(row.rho), cell(row.eps), cell(row.wv_numeric),
		cell(row.wv_closed), cell(row.wv_traditional), cell(row.wv_aav_re), cell(row.wv_aav_im),
		cell(row.projective_cond), cell(row.mc_mean), cell(row.mc_stderr), cell(row.mc_n_success),
		cell(row.disturbance), row.status};
	std::string out;
	for(std::size_t i = 0; i < cells.size(); ++i)
	{
		if(i > 0)
		{
			out += ',';
		}
		out += cells[i];
	}
	return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
	out << csv_header() << '\n';
	for(const ResultRow& row : rows)
	{
		out << csv_line(row) << '\n';
	}
}

std::vector<ResultRow> read_csv(std::istream& in)
{
	std::string line;
	if(!std::getline(in, line) || split(line) != csv_columns())
	{
		throw ConfigError("CSV header does not match the result columns");
	}
	std::vector<ResultRow> rows;
	while(std::getline(in, line))
	{
		if(line.empty())
		{
			continue;
		}
		const std::vector<std::string> c = split(line);
		if(c.size() != csv_columns().size())
		{
			throw ConfigError("CSV row has " + std::to_string(c.size()) + " cells");
		}
		ResultRow row;
		row.scenario = c[0];
		row.rho = parse_cell<double>(c[1]);
		row.eps = parse_cell<double>(c[2]);
		row.wv_numeric = parse_cell<double>(c[3]);
		row.wv_closed = parse_cell<double>(c[4]);
		row.wv_traditional = parse_cell<double>(c[5]);
		row.wv_aav_re = parse_cell<double>(c[6]);
		row.wv_aav_im = parse_cell<double>(c[7]);
		row.projective_cond = parse_cell<double>(c[8]);
		row.mc_mean = parse_cell<double>(c[9]);
		row.mc_stderr = parse_cell<double>(c[10]);
		row.mc_n_success = parse_cell<std::uint64_t>(c[11]);
		row.disturbance = parse_cell<double>(c[12]);
		row.status = c[13];
		rows.push_back(std::move(row));
	}
	return rows;
}

nlohmann::json row_to_json(const ResultRow& row)
{
	json j;
	j["scenario"] = row.scenario;
	j["rho"] = optional_json(row.rho);
	j["eps"] = optional_json(row.eps);
	j["wv_numeric"] = optional_json(row.wv_numeric);
	j["wv_closed"] = optional_json(row.wv_closed);
	j["wv_traditional"] = optional_json(row.wv_traditional);
	j["wv_aav_re"] = optional_json(row.wv_aav_re);
	j["wv_aav_im"] = optional_json(row.wv_aav_im);
	j["projective_cond"] = optional_json(row.projective_cond);
	j["mc_mean"] = optional_json(row.mc_mean);
	j["mc_stderr"] = optional_json(row.mc_stderr);
	j["mc_n_success"] = optional_json(row.mc_n_success);
	j["disturbance"] = optional_json(row.disturbance);
	j["status"] = row.status;
	j["extras"] = row.extras;
	return j;
}

ResultRow row_from_json(const nlohmann::json& j)
{
	ResultRow row;
	row.scenario = j.at("scenario").get<std::string>();
	row.rho = optional_from_json<double>(j, "rho");
	row.eps = optional_from_json<double>(j, "eps");
	row.wv_numeric = optional_from_json<double>(j, "wv_numeric");
	row.wv_closed = optional_from_json<double>(j, "wv_closed");
	row.wv_traditional = optional_from_json<double>(j, "wv_traditional");
	row.wv_aav_re = optional_from_json<double>(j, "wv_aav_re");
	row.wv_aav_im = optional_from_json<double>(j, "wv_aav_im");
	row.projective_cond = optional_from_json<double>(j, "projective_cond");
	row.mc_mean = optional_from_json<double>(j, "mc_mean");
	row.mc_stderr = optional_from_json<double>(j, "mc_stderr");
	row.mc_n_success = optional_from_json<std::uint64_t>(j, "mc_n_success");
	row.disturbance = optional_from_json<double>(j, "disturbance");
	row.status = j.at("status").get<std::string>();
	if(j.contains("extras"))
	{
		row.extras = j.at("extras").get<std::map<std::string, double>>();
	}
	return row;
}

nlohmann::json report_to_json(const Report& report, const ExperimentConfig& config)
{
	json rows = json::array();
	for(const ResultRow& row : report.rows)
	{
		rows.push_back(row_to_json(row));
	}
	return json{{"scenario", to_string(report.scenario)}, {"generated_at", report.generated_at},
		{"config", to_json(config)}, {"rows", rows}, {"summary", report.summary}};
}

std::string utc_timestamp()
{
	const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm utc{};
	gmtime_r(&now, &utc);
	char buffer[32];
	std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
	return buffer;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path)
{
	std::filesystem::path out = csv_path;
	out.replace_extension(".config.json");
	return out;
}

void emit(const Report& report, const ExperimentConfig& config, std::ostream& fallback)
{
	const OutputFormat format = config.resolved_format();
	std::ofstream file;
	std::ostream* out = &fallback;
	if(!config.output.path.empty())
	{
		file.open(config.output.path);
		if(!file)
		{
			throw ConfigError("cannot write " + config.output.path);
		}
		out = &file;
	}

	if(format == OutputFormat::csv)
	{
		write_csv(*out, report.rows);
		if(!config.output.path.empty())
		{
			save_config(config, sidecar_path(config.output.path));
		}
	}
	else
	{
		*out << report_to_json(report, config).dump(2) << '\n';
	}
	if(!*out)
	{
		throw ConfigError("write failed");
	}
}

} // namespace weakmeas::cli
