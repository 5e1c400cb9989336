#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "loadcast/bench/report.hpp" // format_double
#include "loadcast/series.hpp"

namespace loadcast::io {

namespace detail {

/// Days from civil date (Howard Hinnant's algorithm), UTC.
inline std::int64_t days_from_civil(int y, int m, int d) {
	y -= m <= 2;
	const int era = (y >= 0 ? y : y - 399) / 400;
	const unsigned yoe = static_cast<unsigned>(y - era * 400);
	const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
	const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
	return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool parse_int(std::string_view text, int& out) {
	const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
	return ec == std::errc{} && ptr == text.data() + text.size();
}

} // namespace detail

/// Parse a timestamp that is either UNIX seconds or RFC 3339
/// ("YYYY-MM-DDThh:mm:ss" with optional 'Z' or +-hh:mm offset).
inline std::int64_t parse_timestamp(std::string_view text) {
	if (text.empty()) throw DataError("empty timestamp");
	if (text.find('-') == std::string_view::npos || text[0] == '-') {
		std::int64_t seconds = 0;
		const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seconds);
		if (ec != std::errc{} || ptr != text.data() + text.size()) {
			throw DataError("invalid UNIX timestamp '" + std::string(text) + "'");
		}
		return seconds;
	}
	// RFC 3339: 2020-01-31T23:59:06Z / 2020-01-31 23:59:06+01:00
	if (text.size() < 19) throw DataError("invalid RFC 3339 timestamp '" + std::string(text) + "'");
	int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
	const bool ok = detail::parse_int(text.substr(0, 4), year) && text[4] == '-' &&
	                detail::parse_int(text.substr(5, 2), month) && text[7] == '-' &&
	                detail::parse_int(text.substr(8, 2), day) &&
	                (text[10] == 'T' || text[10] == ' ') &&
	                detail::parse_int(text.substr(11, 2), hour) && text[13] == ':' &&
	                detail::parse_int(text.substr(14, 2), minute) && text[16] == ':' &&
	                detail::parse_int(text.substr(17, 2), second);
	if (!ok || month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 ||
	    second > 60) {
		throw DataError("invalid RFC 3339 timestamp '" + std::string(text) + "'");
	}
	std::int64_t offset = 0;
	if (text.size() > 19) {
		const std::string_view rest = text.substr(19);
		if (rest == "Z" || rest == "z") {
			// UTC
		} else if ((rest[0] == '+' || rest[0] == '-') && rest.size() == 6 && rest[3] == ':') {
			int oh = 0, om = 0;
			if (!detail::parse_int(rest.substr(1, 2), oh) || !detail::parse_int(rest.substr(4, 2), om)) {
				throw DataError("invalid timezone offset in '" + std::string(text) + "'");
			}
			offset = (rest[0] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
		} else {
			throw DataError("invalid timezone suffix in '" + std::string(text) + "'");
		}
	}
	return detail::days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second -
	       offset;
}

/// Read a two-column `timestamp,value` CSV (header required, timestamps
/// strictly increasing and evenly spaced).
inline UniformSeries read_series_csv(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) throw DataError("cannot open '" + path.string() + "'");
	std::string line;
	if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
	if (!line.empty() && line.back() == '\r') line.pop_back();
	if (!line.empty() && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // BOM
	if (line != "timestamp,value") {
		throw DataError(path.string() + ":1: expected header 'timestamp,value', got '" + line + "'");
	}

	std::vector<std::int64_t> timestamps;
	std::vector<double> values;
	std::size_t line_number = 1;
	while (std::getline(in, line)) {
		++line_number;
		if (!line.empty() && line.back() == '\r') line.pop_back();
		if (line.empty()) continue;
		const std::size_t comma = line.find(',');
		if (comma == std::string::npos) {
			throw DataError(path.string() + ":" + std::to_string(line_number) + ": missing comma");
		}
		try {
			timestamps.push_back(parse_timestamp(std::string_view(line).substr(0, comma)));
		} catch (const DataError& e) {
			throw DataError(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
		}
		const std::string_view value_text = std::string_view(line).substr(comma + 1);
		double value = 0.0;
		const auto [ptr, ec] =
		    std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
		if (ec != std::errc{} || ptr != value_text.data() + value_text.size()) {
			throw DataError(path.string() + ":" + std::to_string(line_number) + ": invalid value '" +
			                std::string(value_text) + "'");
		}
		values.push_back(value);
	}
	if (values.size() < 2) throw DataError(path.string() + ": need at least 2 rows");

	const std::int64_t step = timestamps[1] - timestamps[0];
	if (step <= 0) throw DataError(path.string() + ": timestamps must be strictly increasing");
	for (std::size_t i = 1; i < timestamps.size(); ++i) {
		if (timestamps[i] - timestamps[i - 1] != step) {
			throw DataError(path.string() + ":" + std::to_string(i + 2) +
			                ": gap or irregular step (expected " + std::to_string(step) + " s)");
		}
	}
	return UniformSeries(timestamps[0], step, std::move(values));
}

inline void write_series_csv(const std::filesystem::path& path, const UniformSeries& series) {
	std::ofstream out(path);
	if (!out) throw DataError("cannot write '" + path.string() + "'");
	out << "timestamp,value\n";
	for (std::size_t i = 0; i < series.size(); ++i) {
		out << series.timestamp_at(i) << ',' << bench::format_double(series.values[i]) << '\n';
	}
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
	std::ofstream out(path);
	if (!out) throw DataError("cannot write '" + path.string() + "'");
	out << content;
}

inline std::string read_text_file(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) throw DataError("cannot open '" + path.string() + "'");
	std::ostringstream buffer;
	buffer << in.rdbuf();
	return buffer.str();
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
	write_text_file(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
	try {
		return nlohmann::json::parse(read_text_file(path));
	} catch (const nlohmann::json::parse_error& e) {
		throw DataError(path.string() + ": " + e.what());
	}
}

} // namespace loadcast::io
