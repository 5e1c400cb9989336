#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcast/models/arima.hpp"
#include "loadcast/models/holt_winters.hpp"
#include "loadcast/models/neural.hpp"
#include "loadcast/models/ses.hpp"
#include "loadcast/parallel.hpp"

namespace loadcast::hpo {

struct Budget {
	int max_trials = 25;
	double max_wall_clock_seconds = 0.0; // 0 = unbounded
	int parallelism = 1;

	void validate() const {
		if (max_trials <= 0 && max_wall_clock_seconds <= 0.0) {
			throw Error("Budget: at least one of max_trials / max_wall_clock must bound the search");
		}
		if (parallelism < 1) throw Error("Budget: parallelism must be at least 1");
	}
};

enum class TrialStatus { Completed, Pruned, Failed };

inline const char* trial_status_name(TrialStatus s) {
	switch (s) {
	case TrialStatus::Completed: return "completed";
	case TrialStatus::Pruned: return "pruned";
	case TrialStatus::Failed: return "failed";
	}
	return "?";
}

struct Trial {
	int id = 0;
	nlohmann::json config;
	double objective = std::numeric_limits<double>::quiet_NaN(); // AIC or validation SMAPE
	TrialStatus status = TrialStatus::Failed;
	double duration_seconds = 0.0;

	nlohmann::json to_json() const {
		nlohmann::json j{{"trial", id},
		                 {"config", config},
		                 {"status", trial_status_name(status)},
		                 {"duration_s", duration_seconds}};
		if (std::isfinite(objective)) j["objective"] = objective;
		return j;
	}
};

struct SearchOutcome {
	std::unique_ptr<models::Forecaster> model;
	nlohmann::json best_config;
	double objective = std::numeric_limits<double>::quiet_NaN();
	std::vector<Trial> trials;
};

// ---------------------------------------------------------------------------
// Classical methods: exhaustive AIC enumeration
// ---------------------------------------------------------------------------

/// Search-space bounds for the classical grids. The unstated paper bounds for
/// P and Q live here as configuration.
struct ClassicalGrids {
	std::vector<double> ses_alphas = models::default_ses_alpha_grid();
	models::TesGrid tes;
	int arima_max_p = 5;
	int arima_max_q = 5;
	int sarima_max_P = 2;
	int sarima_max_Q = 2;
};

namespace detail {

struct Candidate {
	nlohmann::json config;
	int total_order = 0;              // parsimony tie-break
	std::vector<int> lexicographic;   // final tie-break
};

/// AIC comparison with parsimony and lexicographic tie-breaking.
inline bool better_candidate(double aic_a, const Candidate& a, double aic_b, const Candidate& b) {
	if (aic_a < aic_b - 1e-9) return true;
	if (aic_b < aic_a - 1e-9) return false;
	if (a.total_order != b.total_order) return a.total_order < b.total_order;
	return a.lexicographic < b.lexicographic;
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
	return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace detail

/// Fit every configuration of the method's grid and return the minimum-AIC
/// model. Failed fits are skipped; candidate fits may run in parallel over the
/// immutable training series, with a deterministic reduction afterwards.
inline SearchOutcome search_classical(const std::string& method, const UniformSeries& train,
                                      const RateProfile& profile, const ClassicalGrids& grids = {},
                                      unsigned parallelism = 1) {
	std::vector<detail::Candidate> candidates;
	if (method == "ses") {
		for (double alpha : grids.ses_alphas) {
			candidates.push_back({nlohmann::json{{"alpha", alpha}}, 0, {}});
		}
	} else if (method == "tes") {
		const bool positive = std::all_of(train.values.begin(), train.values.end(),
		                                  [](double v) { return v > 0.0; });
		for (const char* mode : {"additive", "multiplicative"}) {
			if (!positive && std::string(mode) == "multiplicative") continue;
			for (double alpha : grids.tes.alphas) {
				for (double beta : grids.tes.betas) {
					for (double gamma : grids.tes.gammas) {
						candidates.push_back({nlohmann::json{{"alpha", alpha},
						                                     {"beta", beta},
						                                     {"gamma", gamma},
						                                     {"seasonality", mode}},
						                      0,
						                      {}});
					}
				}
			}
		}
	} else if (method == "arima") {
		for (int d = 0; d <= 1; ++d) {
			for (int p = 0; p <= grids.arima_max_p; ++p) {
				for (int q = 0; q <= grids.arima_max_q; ++q) {
					candidates.push_back(
					    {nlohmann::json{{"p", p}, {"d", d}, {"q", q}}, p + q, {p, q, d}});
				}
			}
		}
	} else if (method == "sarima") {
		for (int d = 0; d <= 1; ++d) {
			for (int D = 0; D <= 1; ++D) {
				for (int p = 0; p <= grids.arima_max_p; ++p) {
					for (int q = 0; q <= grids.arima_max_q; ++q) {
						for (int P = 0; P <= grids.sarima_max_P; ++P) {
							for (int Q = 0; Q <= grids.sarima_max_Q; ++Q) {
								candidates.push_back({nlohmann::json{{"p", p}, {"d", d}, {"q", q},
								                                     {"P", P}, {"D", D}, {"Q", Q},
								                                     {"m", profile.seasonal_period}},
								                      p + q + P + Q,
								                      {p, q, P, Q, d, D}});
							}
						}
					}
				}
			}
		}
	} else {
		throw Error("search_classical: unknown method '" + method + "'");
	}

	auto fit_candidate = [&](const nlohmann::json& config) -> std::unique_ptr<models::Forecaster> {
		if (method == "ses") {
			auto model = std::make_unique<models::SesForecaster>(config.at("alpha").get<double>());
			model->fit(train);
			return model;
		}
		if (method == "tes") {
			models::HoltWintersConfig hw;
			hw.alpha = config.at("alpha").get<double>();
			hw.beta = config.at("beta").get<double>();
			hw.gamma = config.at("gamma").get<double>();
			hw.mode = config.at("seasonality").get<std::string>() == "additive"
			              ? models::Seasonality::Additive
			              : models::Seasonality::Multiplicative;
			hw.period = profile.seasonal_period;
			auto model = std::make_unique<models::HoltWintersForecaster>(hw);
			model->fit(train);
			return model;
		}
		models::SarimaOrder order;
		order.base.p = config.at("p").get<int>();
		order.base.d = config.at("d").get<int>();
		order.base.q = config.at("q").get<int>();
		if (method == "sarima") {
			order.P = config.at("P").get<int>();
			order.D = config.at("D").get<int>();
			order.Q = config.at("Q").get<int>();
			order.m = profile.seasonal_period;
		}
		auto model = std::make_unique<models::ArimaForecaster>(order, method);
		model->fit(train);
		return model;
	};

	auto aic_of = [&](const models::Forecaster& model) {
		if (auto* ses = dynamic_cast<const models::SesForecaster*>(&model)) return ses->aic();
		if (auto* tes = dynamic_cast<const models::HoltWintersForecaster*>(&model)) return tes->aic();
		return dynamic_cast<const models::ArimaForecaster&>(model).aic();
	};

	SearchOutcome outcome;
	outcome.trials.resize(candidates.size());
	std::vector<double> aics(candidates.size(), std::numeric_limits<double>::quiet_NaN());

	parallel_for(candidates.size(), parallelism, [&](std::size_t i) {
		const auto start = detail::Clock::now();
		Trial trial;
		trial.id = static_cast<int>(i);
		trial.config = candidates[i].config;
		try {
			const auto model = fit_candidate(candidates[i].config);
			trial.objective = aic_of(*model);
			trial.status = TrialStatus::Completed;
			aics[i] = trial.objective;
		} catch (const Error&) {
			trial.status = TrialStatus::Failed;
		}
		trial.duration_seconds = detail::seconds_since(start);
		outcome.trials[i] = std::move(trial);
	});

	std::optional<std::size_t> best;
	for (std::size_t i = 0; i < candidates.size(); ++i) {
		if (outcome.trials[i].status != TrialStatus::Completed) continue;
		if (std::isnan(aics[i]) || aics[i] == std::numeric_limits<double>::infinity()) continue;
		if (!best || detail::better_candidate(aics[i], candidates[i], aics[*best], candidates[*best])) {
			best = i;
		}
	}
	if (!best) throw SearchFailedError("search_classical: every candidate fit failed");

	outcome.best_config = candidates[*best].config;
	outcome.objective = aics[*best];
	outcome.model = fit_candidate(outcome.best_config);
	return outcome;
}

// ---------------------------------------------------------------------------
// Neural methods: seeded random search with median pruning
// ---------------------------------------------------------------------------

/// Default neural search space; input lengths are multiples of the seasonal
/// period, clamped to the training data.
struct NeuralSpace {
	std::vector<int> num_layers = {1, 2, 3};
	std::vector<int> hidden_sizes = {16, 32, 64, 128}; // GRU units / CNN channels
	double learning_rate_min = 1e-4;
	double learning_rate_max = 1e-2;
	std::vector<double> dropout_rates = {0.0, 0.1, 0.2};
	std::vector<int> input_len_periods = {1, 2, 3};
	int cnn_kernel_size = 5;
	std::vector<int> pruning_epochs = {5, 10, 20};
	// No pruning until this many trials completed (Optuna-style startup
	// trials); a lone early finisher must not dictate the median.
	int pruning_min_completed = 5;
};

namespace detail {

/// Thread-shared record of completed-trial checkpoints for median pruning.
class PruningCoordinator {
public:
	PruningCoordinator(std::vector<int> checkpoint_epochs, int min_completed)
	    : checkpoint_epochs_(std::move(checkpoint_epochs)), min_completed_(min_completed) {}

	bool is_checkpoint(int epoch) const {
		return std::find(checkpoint_epochs_.begin(), checkpoint_epochs_.end(), epoch) !=
		       checkpoint_epochs_.end();
	}

	/// True when `value` strictly exceeds the median of completed trials'
	/// values recorded at the same checkpoint. Inactive until enough trials
	/// have completed.
	bool should_prune(int epoch, double value) const {
		std::lock_guard<std::mutex> lock(mutex_);
		if (completed_trials_ < min_completed_) return false;
		const auto it = completed_checkpoints_.find(epoch);
		if (it == completed_checkpoints_.end() || it->second.empty()) return false;
		std::vector<double> sorted = it->second;
		std::sort(sorted.begin(), sorted.end());
		const std::size_t n = sorted.size();
		const double median =
		    n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
		return value > median;
	}

	void record_completed(const std::map<int, double>& checkpoints) {
		std::lock_guard<std::mutex> lock(mutex_);
		++completed_trials_;
		for (const auto& [epoch, value] : checkpoints) {
			completed_checkpoints_[epoch].push_back(value);
		}
	}

private:
	std::vector<int> checkpoint_epochs_;
	int min_completed_;
	mutable std::mutex mutex_;
	int completed_trials_ = 0;
	std::map<int, std::vector<double>> completed_checkpoints_;
};

} // namespace detail

/// One sampled configuration of the neural search.
struct NeuralTrialConfig {
	nlohmann::json network; // arch-specific config
	double learning_rate = 1e-3;
};

inline std::vector<int> feasible_input_lens(const NeuralSpace& space, const RateProfile& profile,
                                            std::size_t train_len, int horizon) {
	std::vector<int> lens;
	for (int periods : space.input_len_periods) {
		const int len = periods * profile.seasonal_period;
		if (len < horizon) continue;
		if (static_cast<std::size_t>(len) > train_len / 2) continue;
		if (static_cast<std::size_t>(len + horizon) > train_len) continue;
		lens.push_back(len);
	}
	if (lens.empty()) {
		const int fallback = std::max(horizon, std::min<int>(static_cast<int>(train_len) / 4,
		                                                     3 * horizon));
		lens.push_back(std::max(1, fallback));
	}
	return lens;
}

/// Random search over the neural space. Trials are trained with the shared
/// TrainConfig template (the learning rate comes from the sample); at each
/// checkpoint epoch a trial whose validation SMAPE exceeds the median of
/// completed trials at that checkpoint is pruned. Fully reproducible for a
/// fixed seed when parallelism is 1.
inline SearchOutcome search_neural(const std::string& arch, const UniformSeries& train,
                                   const UniformSeries& val, const RateProfile& profile,
                                   const NeuralSpace& space, const Budget& budget,
                                   std::uint64_t seed, const nn::TrainConfig& train_template) {
	budget.validate();
	if (arch != "gru" && arch != "cnn") {
		throw Error("search_neural: unknown architecture '" + arch + "'");
	}
	const int horizon = profile.horizon;
	const nn::Normalization norm = nn::fit_normalization(train.values);

	// Context series for validation windows: train followed by val.
	UniformSeries train_and_val = train;
	train_and_val.values.insert(train_and_val.values.end(), val.values.begin(), val.values.end());

	// Sample every configuration up front so the schedule is reproducible.
	const int n_trials = budget.max_trials > 0 ? budget.max_trials : 1;
	const auto input_lens = feasible_input_lens(space, profile, train.size(), horizon);
	Rng sampler(derive_seed(seed, 0xA11CE));
	std::vector<NeuralTrialConfig> configs;
	configs.reserve(static_cast<std::size_t>(n_trials));
	for (int t = 0; t < n_trials; ++t) {
		NeuralTrialConfig config;
		const int layers = space.num_layers[sampler.uniform_index(space.num_layers.size())];
		const int width = space.hidden_sizes[sampler.uniform_index(space.hidden_sizes.size())];
		const double dropout = space.dropout_rates[sampler.uniform_index(space.dropout_rates.size())];
		const int input_len = input_lens[sampler.uniform_index(input_lens.size())];
		config.learning_rate = std::exp(sampler.uniform(std::log(space.learning_rate_min),
		                                                std::log(space.learning_rate_max)));
		if (arch == "gru") {
			config.network = {{"arch", "gru"},
			                  {"input_len", input_len},
			                  {"hidden_size", width},
			                  {"num_layers", layers},
			                  {"dropout_rate", dropout},
			                  {"horizon", horizon}};
		} else {
			int kernel = space.cnn_kernel_size;
			int effective_layers = layers;
			while (1 + effective_layers * (kernel - 1) > input_len && kernel > 3) kernel -= 2;
			while (1 + effective_layers * (kernel - 1) > input_len && effective_layers > 1) {
				--effective_layers;
			}
			config.network = {{"arch", "cnn"},
			                  {"input_len", input_len},
			                  {"channels", std::vector<int>(static_cast<std::size_t>(effective_layers), width)},
			                  {"kernel_size", kernel},
			                  {"dropout_rate", dropout},
			                  {"horizon", horizon}};
		}
		configs.push_back(std::move(config));
	}

	detail::PruningCoordinator coordinator(space.pruning_epochs, space.pruning_min_completed);
	std::mutex best_mutex;
	std::optional<double> best_objective;
	nlohmann::json best_config;
	double best_lr = 0.0;
	std::vector<std::vector<double>> best_weights;

	SearchOutcome outcome;
	outcome.trials.resize(configs.size());

	const auto search_start = detail::Clock::now();
	std::atomic<bool> out_of_time{false};

	parallel_for(configs.size(), static_cast<unsigned>(budget.parallelism), [&](std::size_t i) {
		Trial trial;
		trial.id = static_cast<int>(i);
		trial.config = configs[i].network;
		trial.config["learning_rate"] = configs[i].learning_rate;
		if (out_of_time.load()) {
			trial.status = TrialStatus::Pruned;
			outcome.trials[i] = std::move(trial);
			return;
		}
		const auto start = detail::Clock::now();
		try {
			auto net = models::network_from_config(configs[i].network);
			Rng init_rng(derive_seed(seed, i + 1, 0xB0));
			if (auto* gru = dynamic_cast<nn::GruNetwork*>(net.get())) {
				gru->init_weights(init_rng);
			} else {
				dynamic_cast<nn::CnnNetwork&>(*net).init_weights(init_rng);
			}

			nn::TrainConfig tc = train_template;
			tc.learning_rate = configs[i].learning_rate;
			tc.seed = derive_seed(seed, i + 1, 0xC0);
			tc.normalization = norm;

			const auto train_windows =
			    nn::window_dataset(train, net->input_len(), horizon, norm);
			const auto val_windows = nn::windows_over_tail(train_and_val, val.size(),
			                                               net->input_len(), horizon, norm);

			std::map<int, double> my_checkpoints;
			const auto callback = [&](int epoch, double val_smape) {
				if (coordinator.is_checkpoint(epoch)) {
					my_checkpoints[epoch] = val_smape;
					if (coordinator.should_prune(epoch, val_smape)) return false;
				}
				return true;
			};

			const auto result = nn::train_network(*net, train_windows, val_windows, tc, callback);
			trial.objective = result.best_val_smape;
			if (result.status == nn::TrainStatus::Pruned) {
				trial.status = TrialStatus::Pruned;
			} else {
				trial.status = TrialStatus::Completed;
				coordinator.record_completed(my_checkpoints);
				std::lock_guard<std::mutex> lock(best_mutex);
				if (!best_objective || result.best_val_smape < *best_objective) {
					best_objective = result.best_val_smape;
					best_config = trial.config;
					best_lr = configs[i].learning_rate;
					best_weights = net->snapshot();
				}
			}
		} catch (const Error&) {
			trial.status = TrialStatus::Failed;
		}
		trial.duration_seconds = detail::seconds_since(start);
		outcome.trials[i] = std::move(trial);
		if (budget.max_wall_clock_seconds > 0.0 &&
		    detail::seconds_since(search_start) > budget.max_wall_clock_seconds) {
			out_of_time.store(true);
		}
	});

	if (!best_objective) {
		throw SearchFailedError("search_neural: no trial completed");
	}

	nlohmann::json network_config = best_config;
	network_config.erase("learning_rate");
	auto net = models::network_from_config(network_config);
	net->restore(best_weights);
	auto forecaster = std::make_unique<models::NeuralForecaster>(std::move(net), norm, seed,
	                                                             *best_objective);
	forecaster->set_context(train_and_val.values);

	outcome.model = std::move(forecaster);
	outcome.best_config = best_config;
	outcome.objective = *best_objective;
	return outcome;
}

} // namespace loadcast::hpo
