#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "loadcast/models/ses.hpp"

namespace loadcast::models {

enum class Seasonality { Additive, Multiplicative };

inline const char* seasonality_name(Seasonality s) {
	return s == Seasonality::Additive ? "additive" : "multiplicative";
}

struct HoltWintersConfig {
	double alpha = 0.2;
	double beta = 0.05;
	double gamma = 0.1;
	Seasonality mode = Seasonality::Additive;
	int period = 24;

	void validate() const {
		auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
		if (!in_unit(alpha) || !in_unit(beta) || !in_unit(gamma)) {
			throw Error("HoltWinters: smoothing factors must lie in [0, 1]");
		}
		if (period < 2) throw Error("HoltWinters: period must be at least 2");
	}
};

/// Triple exponential smoothing (Holt-Winters) with additive trend and
/// additive or multiplicative seasonality.
///
/// Initialization: the level is the mean of the first season, the trend the
/// per-step difference of the first two season means, and the seasonal
/// components are the first-season deviations from (additive) or ratios
/// against (multiplicative) the initial level-trend line. The filter then
/// runs from the second season onward.
class HoltWintersForecaster final : public Forecaster {
public:
	explicit HoltWintersForecaster(HoltWintersConfig config) : config_(config) {
		config_.validate();
	}

	std::string method() const override { return "tes"; }

	void fit(const UniformSeries& train) override {
		const std::size_t m = static_cast<std::size_t>(config_.period);
		if (train.size() < 2 * m) {
			throw InsufficientDataError("HoltWinters: need at least two full seasons");
		}
		const auto& y = train.values;
		if (config_.mode == Seasonality::Multiplicative) {
			for (double v : y) {
				if (v <= 0.0) throw FitFailedError("HoltWinters: multiplicative seasonality requires strictly positive history");
			}
		}

		double first_mean = 0.0, second_mean = 0.0;
		for (std::size_t i = 0; i < m; ++i) {
			first_mean += y[i];
			second_mean += y[m + i];
		}
		first_mean /= static_cast<double>(m);
		second_mean /= static_cast<double>(m);

		// The first-season mean sits at the season's center; project it to the
		// season end so the filter state is aligned with the last index seen.
		trend_ = (second_mean - first_mean) / static_cast<double>(m);
		const double center = (static_cast<double>(m) - 1.0) / 2.0;
		level_ = first_mean + center * trend_;
		seasonal_.assign(m, 0.0);
		for (std::size_t i = 0; i < m; ++i) {
			const double line = first_mean + (static_cast<double>(i) - center) * trend_;
			seasonal_[i] = (config_.mode == Seasonality::Additive) ? y[i] - line : y[i] / line;
		}

		observed_ = m;
		double ss = 0.0;
		for (std::size_t t = m; t < y.size(); ++t) {
			const double residual = y[t] - one_step_prediction();
			ss += residual * residual;
			step(y[t]);
		}
		check_state();

		const std::size_t n_res = y.size() - m;
		const double k = 3.0 + 2.0 + static_cast<double>(m); // smoothing factors + level/trend + seasonal states
		if (ss == 0.0) {
			aic_ = -std::numeric_limits<double>::infinity();
		} else {
			aic_ = 2.0 * k - 2.0 * gaussian_loglik(ss, n_res);
		}
		fitted_ = true;
	}

	std::vector<double> predict(int horizon) const override {
		require_fitted();
		require_horizon(horizon);
		std::vector<double> out(static_cast<std::size_t>(horizon));
		const std::size_t m = seasonal_.size();
		for (int s = 1; s <= horizon; ++s) {
			const std::size_t phase = (observed_ + static_cast<std::size_t>(s) - 1) % m;
			const double base = level_ + static_cast<double>(s) * trend_;
			out[static_cast<std::size_t>(s - 1)] =
			    (config_.mode == Seasonality::Additive) ? base + seasonal_[phase] : base * seasonal_[phase];
		}
		check_finite(out, "HoltWinters");
		return out;
	}

	void update(std::span<const double> new_observations) override {
		require_fitted();
		for (double v : new_observations) step(v);
		check_state();
	}

	bool fitted() const override { return fitted_; }

	const HoltWintersConfig& config() const { return config_; }
	double aic() const { return aic_; }
	double level() const { return level_; }
	double trend() const { return trend_; }
	const std::vector<double>& seasonal() const { return seasonal_; }

	nlohmann::json state() const override {
		return {{"method", method()},
		        {"alpha", config_.alpha},
		        {"beta", config_.beta},
		        {"gamma", config_.gamma},
		        {"seasonality", seasonality_name(config_.mode)},
		        {"period", config_.period},
		        {"level", level_},
		        {"trend", trend_},
		        {"aic", aic_}};
	}

private:
	double one_step_prediction() const {
		const std::size_t phase = observed_ % seasonal_.size();
		const double base = level_ + trend_;
		return (config_.mode == Seasonality::Additive) ? base + seasonal_[phase]
		                                               : base * seasonal_[phase];
	}

	void step(double y) {
		const std::size_t phase = observed_ % seasonal_.size();
		const double previous_level = level_;
		const double season = seasonal_[phase];
		if (config_.mode == Seasonality::Additive) {
			level_ = config_.alpha * (y - season) + (1.0 - config_.alpha) * (level_ + trend_);
			trend_ = config_.beta * (level_ - previous_level) + (1.0 - config_.beta) * trend_;
			seasonal_[phase] = config_.gamma * (y - level_) + (1.0 - config_.gamma) * season;
		} else {
			level_ = config_.alpha * (y / season) + (1.0 - config_.alpha) * (level_ + trend_);
			trend_ = config_.beta * (level_ - previous_level) + (1.0 - config_.beta) * trend_;
			seasonal_[phase] = config_.gamma * (y / level_) + (1.0 - config_.gamma) * season;
		}
		++observed_;
	}

	void check_state() const {
		if (!std::isfinite(level_) || !std::isfinite(trend_)) {
			throw FitFailedError("HoltWinters: filter state became non-finite");
		}
		for (double s : seasonal_) {
			if (!std::isfinite(s)) throw FitFailedError("HoltWinters: seasonal state became non-finite");
		}
	}

	HoltWintersConfig config_;
	double level_ = 0.0;
	double trend_ = 0.0;
	std::vector<double> seasonal_;
	std::size_t observed_ = 0;
	double aic_ = std::numeric_limits<double>::quiet_NaN();
	bool fitted_ = false;
};

struct TesGrid {
	std::vector<double> alphas = {0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.9};
	std::vector<double> betas = {0.0, 0.01, 0.05, 0.1, 0.3};
	std::vector<double> gammas = {0.0, 0.05, 0.1, 0.2, 0.4, 0.7};
};

/// Fit Holt-Winters by enumerating a coarse smoothing-factor grid for both
/// seasonality modes and keeping the lowest AIC. The multiplicative mode is
/// excluded when the history is not strictly positive.
inline HoltWintersForecaster fit_tes(const UniformSeries& train, int period,
                                     const TesGrid& grid = {}) {
	const bool positive = std::all_of(train.values.begin(), train.values.end(),
	                                  [](double v) { return v > 0.0; });
	std::optional<HoltWintersForecaster> best;
	for (Seasonality mode : {Seasonality::Additive, Seasonality::Multiplicative}) {
		if (mode == Seasonality::Multiplicative && !positive) continue;
		for (double alpha : grid.alphas) {
			for (double beta : grid.betas) {
				for (double gamma : grid.gammas) {
					HoltWintersForecaster candidate(
					    HoltWintersConfig{alpha, beta, gamma, mode, period});
					try {
						candidate.fit(train);
					} catch (const FitFailedError&) {
						continue;
					}
					if (!best || candidate.aic() < best->aic()) best = std::move(candidate);
				}
			}
		}
	}
	if (!best) throw SearchFailedError("fit_tes: every candidate configuration failed");
	return *best;
}

} // namespace loadcast::models
