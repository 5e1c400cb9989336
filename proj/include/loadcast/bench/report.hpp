#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "loadcast/bench/experiment.hpp"

namespace loadcast::bench {

/// Shortest round-trip decimal rendering, used everywhere numbers land in
/// files so that reruns are byte-identical.
inline std::string format_double(double value) {
	char buffer[32];
	const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
	return std::string(buffer, ptr);
}

struct TableCell {
	double smape = 0.0;
	double rmse = 0.0;
	bool present = false;
	bool best_in_row = false;       // row minimum
	bool beats_baselines = false;   // strictly better than both baselines
};

/// Rows keyed by (rate, dataset) with one column per method, plus the
/// best-in-row and beats-both-baselines markers.
struct ResultTable {
	std::vector<std::string> methods; // column order
	struct Row {
		std::string rate;
		std::string dataset;
		std::vector<TableCell> cells; // aligned with `methods`
	};
	std::vector<Row> rows;
};

struct MeanSummaryRow {
	std::string rate;
	std::string method;
	double mean_smape = 0.0;
	double mean_rmse = 0.0;
	std::size_t n = 0;
};

struct DurationSummaryRow {
	std::string rate;
	std::string method;
	double mean_fit_duration_s = 0.0;
	double mean_predict_duration_s = 0.0;
	std::size_t n = 0;
};

namespace detail {

inline std::size_t rate_order(const std::string& rate) {
	if (rate == "1h") return 0;
	if (rate == "15min") return 1;
	if (rate == "5min") return 2;
	return 3;
}

inline std::vector<std::string> method_column_order(const std::vector<ExperimentResult>& results) {
	std::vector<std::string> columns;
	for (MethodId m : all_methods()) {
		const std::string name = method_name(m);
		const bool used = std::any_of(results.begin(), results.end(),
		                              [&](const ExperimentResult& r) { return r.method == name; });
		if (used) columns.push_back(name);
	}
	return columns;
}

} // namespace detail

/// Build the detailed table with markers. Best = row argmin over present
/// cells; a cell beats the baselines iff it is strictly below both baseline
/// cells of its row (markers need both baselines present).
inline ResultTable aggregate(const std::vector<ExperimentResult>& results) {
	if (results.empty()) throw DataError("aggregate: no results");
	ResultTable table;
	table.methods = detail::method_column_order(results);

	std::map<std::pair<std::size_t, std::string>, std::map<std::string, const ExperimentResult*>> grid;
	for (const ExperimentResult& r : results) {
		grid[{detail::rate_order(r.rate), r.dataset_id}][r.method] = &r;
	}

	for (const auto& [key, row_cells] : grid) {
		ResultTable::Row row;
		row.dataset = key.second;
		row.cells.resize(table.methods.size());
		std::optional<double> best;
		for (std::size_t c = 0; c < table.methods.size(); ++c) {
			const auto it = row_cells.find(table.methods[c]);
			if (it == row_cells.end() || it->second->status != "ok") continue;
			row.rate = it->second->rate;
			TableCell& cell = row.cells[c];
			cell.present = true;
			cell.smape = it->second->smape;
			cell.rmse = it->second->rmse;
			if (!best || cell.smape < *best) best = cell.smape;
		}
		if (row.rate.empty()) {
			// No ok cell in this row; recover the rate label from any result.
			row.rate = row_cells.begin()->second->rate;
		}

		std::optional<double> baseline_floor;
		{
			const auto lo = row_cells.find("last_observation");
			const auto ld = row_cells.find("last_day");
			if (lo != row_cells.end() && lo->second->status == "ok" && ld != row_cells.end() &&
			    ld->second->status == "ok") {
				baseline_floor = std::min(lo->second->smape, ld->second->smape);
			}
		}
		for (TableCell& cell : row.cells) {
			if (!cell.present) continue;
			cell.best_in_row = best && cell.smape == *best;
			cell.beats_baselines = baseline_floor && cell.smape < *baseline_floor;
		}
		table.rows.push_back(std::move(row));
	}
	return table;
}

inline std::string render_table_csv(const ResultTable& table, bool use_rmse = false) {
	std::ostringstream out;
	out << "rate,dataset";
	for (const std::string& m : table.methods) out << ',' << m;
	out << '\n';
	for (const auto& row : table.rows) {
		out << row.rate << ',' << row.dataset;
		for (const TableCell& cell : row.cells) {
			out << ',';
			if (cell.present) out << format_double(use_rmse ? cell.rmse : cell.smape);
		}
		out << '\n';
	}
	return out.str();
}

/// Markdown rendering: the row best is bold, results beating both baselines
/// are italic.
inline std::string render_table_markdown(const ResultTable& table) {
	std::ostringstream out;
	out << "| rate | dataset |";
	for (const std::string& m : table.methods) out << ' ' << m << " |";
	out << "\n|---|---|";
	for (std::size_t c = 0; c < table.methods.size(); ++c) out << "---|";
	out << '\n';
	for (const auto& row : table.rows) {
		out << "| " << row.rate << " | " << row.dataset << " |";
		for (const TableCell& cell : row.cells) {
			out << ' ';
			if (!cell.present) {
				out << '-';
			} else {
				std::string text = format_double(cell.smape);
				if (cell.beats_baselines) text = "*" + text + "*";
				if (cell.best_in_row) text = "**" + text + "**";
				out << text;
			}
			out << " |";
		}
		out << '\n';
	}
	out << "\nBold marks the best result per row; italics mark results beating both baselines.\n";
	return out.str();
}

/// Per-rate per-method means over datasets (SMAPE and RMSE).
inline std::vector<MeanSummaryRow> mean_summaries(const std::vector<ExperimentResult>& results) {
	std::map<std::pair<std::size_t, std::string>, MeanSummaryRow> acc;
	for (const ExperimentResult& r : results) {
		if (r.status != "ok") continue;
		auto& row = acc[{detail::rate_order(r.rate), r.method}];
		if (row.n == 0) {
			row.rate = r.rate;
			row.method = r.method;
		}
		row.mean_smape += r.smape;
		row.mean_rmse += r.rmse;
		++row.n;
	}
	std::vector<MeanSummaryRow> rows;
	for (auto& [key, row] : acc) {
		row.mean_smape /= static_cast<double>(row.n);
		row.mean_rmse /= static_cast<double>(row.n);
		rows.push_back(row);
	}
	return rows;
}

inline std::string render_mean_csv(const std::vector<MeanSummaryRow>& rows) {
	std::ostringstream out;
	out << "rate,method,mean_smape,mean_rmse,n\n";
	for (const auto& row : rows) {
		out << row.rate << ',' << row.method << ',' << format_double(row.mean_smape) << ','
		    << format_double(row.mean_rmse) << ',' << row.n << '\n';
	}
	return out.str();
}

inline std::vector<DurationSummaryRow> duration_summaries(
    const std::vector<ExperimentResult>& results) {
	std::map<std::pair<std::size_t, std::string>, DurationSummaryRow> acc;
	for (const ExperimentResult& r : results) {
		if (r.status != "ok") continue;
		auto& row = acc[{detail::rate_order(r.rate), r.method}];
		if (row.n == 0) {
			row.rate = r.rate;
			row.method = r.method;
		}
		row.mean_fit_duration_s += r.fit_duration_s;
		row.mean_predict_duration_s += r.mean_predict_duration_s;
		++row.n;
	}
	std::vector<DurationSummaryRow> rows;
	for (auto& [key, row] : acc) {
		row.mean_fit_duration_s /= static_cast<double>(row.n);
		row.mean_predict_duration_s /= static_cast<double>(row.n);
		rows.push_back(row);
	}
	return rows;
}

inline std::string render_duration_csv(const std::vector<DurationSummaryRow>& rows) {
	std::ostringstream out;
	out << "rate,method,mean_fit_duration_s,mean_predict_duration_s,n\n";
	for (const auto& row : rows) {
		out << row.rate << ',' << row.method << ',' << format_double(row.mean_fit_duration_s) << ','
		    << format_double(row.mean_predict_duration_s) << ',' << row.n << '\n';
	}
	return out.str();
}

} // namespace loadcast::bench
