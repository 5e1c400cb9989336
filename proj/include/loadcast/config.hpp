#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcast/bench/experiment.hpp"

namespace loadcast {

inline constexpr const char* kVersion = "0.1.0";

struct DatasetEntry {
	std::string id;
	std::string path;
	std::int64_t step_seconds = 0; // 0 = infer from the CSV
};

inline void apply_space_patch(hpo::NeuralSpace& space, const nlohmann::json& s) {
	if (s.contains("num_layers")) space.num_layers = s.at("num_layers").get<std::vector<int>>();
	if (s.contains("hidden_sizes")) {
		space.hidden_sizes = s.at("hidden_sizes").get<std::vector<int>>();
	}
	if (s.contains("dropout_rates")) {
		space.dropout_rates = s.at("dropout_rates").get<std::vector<double>>();
	}
	if (s.contains("input_len_periods")) {
		space.input_len_periods = s.at("input_len_periods").get<std::vector<int>>();
	}
	space.learning_rate_min = s.value("learning_rate_min", space.learning_rate_min);
	space.learning_rate_max = s.value("learning_rate_max", space.learning_rate_max);
	space.pruning_min_completed = s.value("pruning_min_completed", space.pruning_min_completed);
}

inline nlohmann::json space_to_json(const hpo::NeuralSpace& space) {
	return {{"num_layers", space.num_layers},
	        {"hidden_sizes", space.hidden_sizes},
	        {"dropout_rates", space.dropout_rates},
	        {"input_len_periods", space.input_len_periods},
	        {"learning_rate_min", space.learning_rate_min},
	        {"learning_rate_max", space.learning_rate_max},
	        {"pruning_min_completed", space.pruning_min_completed}};
}

/// One declarative document describing a whole run; command-line flags
/// override individual keys.
struct RunConfig {
	std::vector<DatasetEntry> datasets;
	std::vector<std::string> rates = {"1h", "15min", "5min"};
	std::vector<std::string> methods = {"last_observation", "last_day", "ses", "tes",
	                                    "arima",            "sarima",   "gru", "cnn"};
	AdjustmentParams adjustment;
	hpo::Budget budget;
	hpo::NeuralSpace search_space;
	std::optional<hpo::NeuralSpace> gru_space; // per-architecture overrides
	std::optional<hpo::NeuralSpace> cnn_space;
	hpo::ClassicalGrids grids;
	std::uint64_t seed = 42;
	int update_period = 0;
	std::string out_dir = "out";
	int max_epochs = 40;
	int early_stop_patience = 5;
	int batch_size = 32;

	static RunConfig from_json(const nlohmann::json& j) {
		RunConfig config;
		if (j.contains("datasets")) {
			for (const auto& d : j.at("datasets")) {
				DatasetEntry entry;
				entry.id = d.at("id").get<std::string>();
				entry.path = d.at("path").get<std::string>();
				entry.step_seconds = d.value("step_seconds", std::int64_t{0});
				config.datasets.push_back(std::move(entry));
			}
		}
		if (j.contains("rates")) config.rates = j.at("rates").get<std::vector<std::string>>();
		if (j.contains("methods")) config.methods = j.at("methods").get<std::vector<std::string>>();
		if (j.contains("adjustment")) {
			const auto& a = j.at("adjustment");
			config.adjustment.noise_sigma = a.value("noise_sigma", config.adjustment.noise_sigma);
			config.adjustment.target_mean = a.value("target_mean", config.adjustment.target_mean);
			config.adjustment.target_std = a.value("target_std", config.adjustment.target_std);
			config.adjustment.seed = a.value("seed", config.adjustment.seed);
		}
		if (j.contains("budget")) {
			const auto& b = j.at("budget");
			config.budget.max_trials = b.value("max_trials", config.budget.max_trials);
			config.budget.max_wall_clock_seconds =
			    b.value("max_wall_clock_s", config.budget.max_wall_clock_seconds);
			config.budget.parallelism = b.value("parallelism", config.budget.parallelism);
		}
		if (j.contains("search_space")) {
			const auto& s = j.at("search_space");
			apply_space_patch(config.search_space, s);
			if (s.contains("gru")) {
				config.gru_space = config.search_space;
				apply_space_patch(*config.gru_space, s.at("gru"));
			}
			if (s.contains("cnn")) {
				config.cnn_space = config.search_space;
				apply_space_patch(*config.cnn_space, s.at("cnn"));
			}
		}
		if (j.contains("grids")) {
			const auto& g = j.at("grids");
			config.grids.arima_max_p = g.value("arima_max_p", config.grids.arima_max_p);
			config.grids.arima_max_q = g.value("arima_max_q", config.grids.arima_max_q);
			config.grids.sarima_max_P = g.value("sarima_max_P", config.grids.sarima_max_P);
			config.grids.sarima_max_Q = g.value("sarima_max_Q", config.grids.sarima_max_Q);
		}
		config.seed = j.value("seed", config.seed);
		config.update_period = j.value("update_period", config.update_period);
		config.out_dir = j.value("out_dir", config.out_dir);
		if (j.contains("train")) {
			const auto& t = j.at("train");
			config.max_epochs = t.value("max_epochs", config.max_epochs);
			config.early_stop_patience = t.value("early_stop_patience", config.early_stop_patience);
			config.batch_size = t.value("batch_size", config.batch_size);
		}
		return config;
	}

	nlohmann::json to_json() const {
		nlohmann::json datasets_json = nlohmann::json::array();
		for (const auto& d : datasets) {
			datasets_json.push_back(
			    {{"id", d.id}, {"path", d.path}, {"step_seconds", d.step_seconds}});
		}
		return {{"datasets", datasets_json},
		        {"rates", rates},
		        {"methods", methods},
		        {"adjustment",
		         {{"noise_sigma", adjustment.noise_sigma},
		          {"target_mean", adjustment.target_mean},
		          {"target_std", adjustment.target_std},
		          {"seed", adjustment.seed}}},
		        {"budget",
		         {{"max_trials", budget.max_trials},
		          {"max_wall_clock_s", budget.max_wall_clock_seconds},
		          {"parallelism", budget.parallelism}}},
		        {"search_space", search_space_json()},
		        {"grids",
		         {{"arima_max_p", grids.arima_max_p},
		          {"arima_max_q", grids.arima_max_q},
		          {"sarima_max_P", grids.sarima_max_P},
		          {"sarima_max_Q", grids.sarima_max_Q}}},
		        {"seed", seed},
		        {"update_period", update_period},
		        {"out_dir", out_dir},
		        {"train",
		         {{"max_epochs", max_epochs},
		          {"early_stop_patience", early_stop_patience},
		          {"batch_size", batch_size}}}};
	}

	nlohmann::json search_space_json() const {
		nlohmann::json s = space_to_json(search_space);
		if (gru_space) s["gru"] = space_to_json(*gru_space);
		if (cnn_space) s["cnn"] = space_to_json(*cnn_space);
		return s;
	}

	void validate(bool check_paths = false) const {
		adjustment.validate();
		budget.validate();
		std::vector<std::string> seen;
		for (const auto& d : datasets) {
			if (std::find(seen.begin(), seen.end(), d.id) != seen.end()) {
				throw DataError("duplicate dataset id '" + d.id + "'");
			}
			seen.push_back(d.id);
			if (check_paths && !std::filesystem::exists(d.path)) {
				throw DataError("dataset '" + d.id + "': path does not exist: " + d.path);
			}
		}
		for (const auto& r : rates) RateProfile::parse(r);
		for (const auto& m : methods) bench::parse_method(m);
	}
};

inline std::string config_hash(const nlohmann::json& canonical) {
	const std::string dump = canonical.dump();
	std::uint64_t h = 1469598103934665603ULL;
	for (char c : dump) {
		h ^= static_cast<unsigned char>(c);
		h *= 1099511628211ULL;
	}
	char buffer[17];
	std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
	return std::string(buffer);
}

/// Reproducibility manifest written next to every run's outputs.
inline nlohmann::json run_manifest(const RunConfig& config) {
	const nlohmann::json canonical = config.to_json();
	return {{"tool", "loadcast"},
	        {"version", kVersion},
	        {"config", canonical},
	        {"config_hash", config_hash(canonical)},
	        {"rng", kRngName}};
}

} // namespace loadcast
