#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "loadcast/hpo/search.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/models/forecaster.hpp"

namespace loadcast::bench {

enum class MethodId {
	LastObservation,
	LastDay,
	Ses,
	Tes,
	Arima,
	Sarima,
	Prophet,
	Gru,
	Cnn,
};

inline const char* method_name(MethodId m) {
	switch (m) {
	case MethodId::LastObservation: return "last_observation";
	case MethodId::LastDay: return "last_day";
	case MethodId::Ses: return "ses";
	case MethodId::Tes: return "tes";
	case MethodId::Arima: return "arima";
	case MethodId::Sarima: return "sarima";
	case MethodId::Prophet: return "prophet";
	case MethodId::Gru: return "gru";
	case MethodId::Cnn: return "cnn";
	}
	return "?";
}

inline MethodId parse_method(const std::string& name) {
	for (MethodId m : {MethodId::LastObservation, MethodId::LastDay, MethodId::Ses, MethodId::Tes,
	                   MethodId::Arima, MethodId::Sarima, MethodId::Prophet, MethodId::Gru,
	                   MethodId::Cnn}) {
		if (name == method_name(m)) return m;
	}
	throw DataError("unknown method '" + name + "'");
}

/// The seven non-baseline methods of the comparison grid.
inline const std::vector<MethodId>& comparison_methods() {
	static const std::vector<MethodId> methods = {
	    MethodId::Ses,    MethodId::Tes, MethodId::Arima, MethodId::Sarima,
	    MethodId::Prophet, MethodId::Gru, MethodId::Cnn,
	};
	return methods;
}

inline const std::vector<MethodId>& all_methods() {
	static const std::vector<MethodId> methods = {
	    MethodId::LastObservation, MethodId::LastDay, MethodId::Ses,
	    MethodId::Tes,             MethodId::Arima,   MethodId::Sarima,
	    MethodId::Prophet,         MethodId::Gru,     MethodId::Cnn,
	};
	return methods;
}

inline bool is_neural(MethodId m) { return m == MethodId::Gru || m == MethodId::Cnn; }

struct MethodAvailability {
	bool available = true;
	std::string reason;
};

/// Feasibility rules: SARIMA is excluded at the 5-minute rate (coefficient
/// estimation with a seasonal period of 288 observations is infeasible), and
/// Prophet is a third-party library that is not bundled.
inline MethodAvailability method_available(MethodId method, RateId rate) {
	if (method == MethodId::Prophet) {
		return {false, "unsupported method: third-party library, usable only at the hourly rate"};
	}
	if (method == MethodId::Sarima && rate == RateId::FiveMin) {
		return {false, "seasonal period of 288 observations makes coefficient estimation infeasible"};
	}
	return {true, ""};
}

/// One cell of the experiment grid. Neural methods use the three-way
/// 60/20/20 split; all other methods use 80/20. SARIMA at the 5-minute rate
/// is rejected outright.
struct ExperimentSpec {
	std::string dataset_id;
	RateProfile profile;
	MethodId method;
	SplitSpec split;
	std::uint64_t seed = 0;
	int update_period = 0; // R: full refit every R steps; 0 = filter-only

	static ExperimentSpec make(std::string dataset_id, const RateProfile& profile, MethodId method,
	                           std::uint64_t seed, int update_period = 0) {
		ExperimentSpec spec;
		spec.dataset_id = std::move(dataset_id);
		spec.profile = profile;
		spec.method = method;
		spec.split = is_neural(method) ? SplitSpec{{0.6, 0.2, 0.2}} : SplitSpec{{0.8, 0.2}};
		spec.seed = seed;
		spec.update_period = update_period;
		return spec;
	}

	void validate() const {
		split.validate();
		if (method == MethodId::Sarima && profile.rate == RateId::FiveMin) {
			throw MethodUnavailableError("sarima is not available at 5 min sampling");
		}
		if (is_neural(method) && split.fractions.size() != 3) {
			throw DataError("neural methods require the three-way split");
		}
		if (!is_neural(method) && split.fractions.size() != 2) {
			throw DataError("classical methods use the two-way split");
		}
	}
};

struct ExperimentResult {
	std::string dataset_id;
	std::string rate;
	std::string method;
	std::string status = "ok"; // ok | unavailable | failed
	std::string message;
	double smape = 0.0;
	double rmse = 0.0;
	double fit_duration_s = 0.0;
	double mean_predict_duration_s = 0.0;
	std::size_t n_windows = 0;
	std::uint64_t seed = 0;
	nlohmann::json provenance;

	nlohmann::json to_json() const {
		nlohmann::json j{{"dataset", dataset_id}, {"rate", rate},   {"method", method},
		                 {"status", status},      {"seed", seed}};
		if (status == "ok") {
			j["smape"] = smape;
			j["rmse"] = rmse;
			j["fit_duration_s"] = fit_duration_s;
			j["mean_predict_duration_s"] = mean_predict_duration_s;
			j["n_windows"] = n_windows;
			j["provenance"] = provenance;
		} else {
			j["message"] = message;
		}
		return j;
	}

	static ExperimentResult from_json(const nlohmann::json& j) {
		ExperimentResult r;
		r.dataset_id = j.at("dataset").get<std::string>();
		r.rate = j.at("rate").get<std::string>();
		r.method = j.at("method").get<std::string>();
		r.status = j.at("status").get<std::string>();
		r.seed = j.value("seed", std::uint64_t{0});
		if (r.status == "ok") {
			r.smape = j.at("smape").get<double>();
			r.rmse = j.at("rmse").get<double>();
			r.fit_duration_s = j.value("fit_duration_s", 0.0);
			r.mean_predict_duration_s = j.value("mean_predict_duration_s", 0.0);
			r.n_windows = j.at("n_windows").get<std::size_t>();
			if (j.contains("provenance")) r.provenance = j.at("provenance");
		} else {
			r.message = j.value("message", "");
		}
		return r;
	}
};

struct RollingOutcome {
	ForecastEval pooled; // all (window, step) pairs, per-term
	std::size_t n_windows = 0;
	double mean_step_seconds = 0.0;
};

/// Rolling-origin evaluation over the test segment: starting at the first
/// test index with stride 1, predict `horizon` values, pool them against the
/// actuals, then reveal exactly one observation to the model. Windows that
/// would extend past the test end are skipped. With update_period R > 0 the
/// model is refit on everything seen so far every R steps.
inline RollingOutcome rolling_evaluate(models::Forecaster& model, const UniformSeries& history,
                                       const UniformSeries& test, int horizon,
                                       int update_period = 0) {
	if (test.size() < static_cast<std::size_t>(horizon)) {
		throw InsufficientDataError("rolling_evaluate: test segment shorter than the horizon");
	}
	RollingOutcome outcome;
	double total_seconds = 0.0;
	std::size_t steps = 0;
	UniformSeries seen = history; // grows as observations are revealed

	const std::size_t last_origin = test.size() - static_cast<std::size_t>(horizon);
	for (std::size_t origin = 0; origin <= last_origin; ++origin) {
		const auto start = std::chrono::steady_clock::now();
		const std::vector<double> forecast = model.predict(horizon);
		for (int k = 0; k < horizon; ++k) {
			outcome.pooled.append(test.values[origin + static_cast<std::size_t>(k)],
			                      forecast[static_cast<std::size_t>(k)]);
		}
		const double revealed = test.values[origin];
		model.update(std::span<const double>(&revealed, 1));
		seen.values.push_back(revealed);
		if (update_period > 0 && (origin + 1) % static_cast<std::size_t>(update_period) == 0) {
			model.fit(seen);
		}
		total_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
		++steps;
		++outcome.n_windows;
	}
	outcome.mean_step_seconds = total_seconds / static_cast<double>(steps);
	return outcome;
}

/// Everything run_experiment needs besides the spec and the data.
struct RunOptions {
	hpo::ClassicalGrids grids;
	hpo::NeuralSpace space;                        // shared defaults
	std::optional<hpo::NeuralSpace> gru_space;     // per-method overrides
	std::optional<hpo::NeuralSpace> cnn_space;
	hpo::Budget budget;
	nn::TrainConfig train; // normalization and learning rate are set per trial

	const hpo::NeuralSpace& space_for(MethodId method) const {
		if (method == MethodId::Gru && gru_space) return *gru_space;
		if (method == MethodId::Cnn && cnn_space) return *cnn_space;
		return space;
	}
};

struct CellOutcome {
	ExperimentResult result;
	std::vector<hpo::Trial> trials;
};

/// Fit (with hyperparameter search) on the training split, then run the
/// rolling evaluation over the test split.
inline CellOutcome run_experiment(const ExperimentSpec& spec, const UniformSeries& series,
                                  const RunOptions& options) {
	CellOutcome cell;
	ExperimentResult& result = cell.result;
	result.dataset_id = spec.dataset_id;
	result.rate = spec.profile.name();
	result.method = method_name(spec.method);
	result.seed = spec.seed;

	const MethodAvailability availability = method_available(spec.method, spec.profile.rate);
	if (!availability.available) {
		result.status = "unavailable";
		result.message = availability.reason;
		return cell;
	}

	try {
		spec.validate();
		const auto segments = split(series, spec.split);
		const UniformSeries& test = segments.back();

		const auto fit_start = std::chrono::steady_clock::now();
		std::unique_ptr<models::Forecaster> model;
		nlohmann::json provenance;

		switch (spec.method) {
		case MethodId::LastObservation:
			model = std::make_unique<models::LastObservationForecaster>();
			model->fit(segments[0]);
			break;
		case MethodId::LastDay:
			model = std::make_unique<models::LastDayForecaster>(spec.profile.seasonal_period);
			model->fit(segments[0]);
			break;
		case MethodId::Ses:
		case MethodId::Tes:
		case MethodId::Arima:
		case MethodId::Sarima: {
			auto outcome = hpo::search_classical(method_name(spec.method), segments[0], spec.profile,
			                                     options.grids,
			                                     static_cast<unsigned>(options.budget.parallelism));
			provenance["search"] = {{"best_config", outcome.best_config},
			                        {"aic", outcome.objective},
			                        {"n_trials", outcome.trials.size()}};
			model = std::move(outcome.model);
			cell.trials = std::move(outcome.trials);
			break;
		}
		case MethodId::Gru:
		case MethodId::Cnn: {
			auto outcome = hpo::search_neural(method_name(spec.method), segments[0], segments[1],
			                                  spec.profile, options.space_for(spec.method),
			                                  options.budget, spec.seed, options.train);
			provenance["search"] = {{"best_config", outcome.best_config},
			                        {"val_smape", outcome.objective},
			                        {"n_trials", outcome.trials.size()}};
			model = std::move(outcome.model);
			cell.trials = std::move(outcome.trials);
			break;
		}
		case MethodId::Prophet:
			throw MethodUnavailableError("prophet is not implemented");
		}
		result.fit_duration_s =
		    std::chrono::duration<double>(std::chrono::steady_clock::now() - fit_start).count();

		// Everything before the test split is the model's visible history.
		UniformSeries history(series.start_time, series.step_seconds,
		                      std::vector<double>(series.values.begin(),
		                                          series.values.end() - static_cast<std::ptrdiff_t>(test.size())));
		const RollingOutcome rolling =
		    rolling_evaluate(*model, history, test, spec.profile.horizon, spec.update_period);

		result.smape = smape(rolling.pooled);
		result.rmse = rmse(rolling.pooled);
		result.n_windows = rolling.n_windows;
		result.mean_predict_duration_s = rolling.mean_step_seconds;
		provenance["model"] = model->state();
		result.provenance = provenance;
	} catch (const std::exception& e) {
		result.status = "failed";
		result.message = e.what();
	}
	return cell;
}

/// The full grid of cells for the given datasets, rates and methods, in
/// canonical order (rate, dataset, method).
inline std::vector<ExperimentSpec> build_grid(const std::vector<std::string>& dataset_ids,
                                              const std::vector<RateProfile>& rates,
                                              const std::vector<MethodId>& methods,
                                              std::uint64_t seed, int update_period = 0) {
	std::vector<ExperimentSpec> specs;
	specs.reserve(dataset_ids.size() * rates.size() * methods.size());
	for (const RateProfile& rate : rates) {
		for (const std::string& dataset : dataset_ids) {
			for (MethodId method : methods) {
				specs.push_back(ExperimentSpec::make(dataset, rate, method, seed, update_period));
			}
		}
	}
	return specs;
}

using SeriesResolver = std::function<const UniformSeries&(const std::string&, const RateProfile&)>;
using CellCallback = std::function<void(const CellOutcome&)>;

/// Execute every cell; individual failures are recorded and the grid
/// continues. Results come back in grid order regardless of the execution
/// schedule.
inline std::vector<CellOutcome> run_grid(const std::vector<ExperimentSpec>& specs,
                                         const SeriesResolver& resolve, const RunOptions& options,
                                         unsigned cell_parallelism = 1,
                                         const CellCallback& on_cell = nullptr) {
	std::vector<CellOutcome> outcomes(specs.size());
	std::mutex callback_mutex;
	parallel_for(specs.size(), cell_parallelism, [&](std::size_t i) {
		const ExperimentSpec& spec = specs[i];
		const MethodAvailability availability = method_available(spec.method, spec.profile.rate);
		if (!availability.available) {
			ExperimentResult result;
			result.dataset_id = spec.dataset_id;
			result.rate = spec.profile.name();
			result.method = method_name(spec.method);
			result.seed = spec.seed;
			result.status = "unavailable";
			result.message = availability.reason;
			outcomes[i].result = std::move(result);
		} else {
			try {
				const UniformSeries& series = resolve(spec.dataset_id, spec.profile);
				outcomes[i] = run_experiment(spec, series, options);
			} catch (const std::exception& e) {
				outcomes[i].result.dataset_id = spec.dataset_id;
				outcomes[i].result.rate = spec.profile.name();
				outcomes[i].result.method = method_name(spec.method);
				outcomes[i].result.seed = spec.seed;
				outcomes[i].result.status = "failed";
				outcomes[i].result.message = e.what();
			}
		}
		if (on_cell) {
			std::lock_guard<std::mutex> lock(callback_mutex);
			on_cell(outcomes[i]);
		}
	});
	return outcomes;
}

} // namespace loadcast::bench
