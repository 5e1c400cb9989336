#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcast/error.hpp"
#include "loadcast/series.hpp"

namespace loadcast::models {

/// Contract shared by every forecasting method.
///
/// predict(h) is only valid after fit. update appends newly observed values
/// so that subsequent predictions condition on them; no method may look at
/// observations it has not been given. A fitted forecaster is a mutable value
/// owned by one evaluation loop at a time.
class Forecaster {
public:
	virtual ~Forecaster() = default;

	virtual std::string method() const = 0;

	virtual void fit(const UniformSeries& train) = 0;

	/// Exactly h finite values, h >= 1.
	virtual std::vector<double> predict(int horizon) const = 0;

	virtual void update(std::span<const double> new_observations) = 0;

	virtual bool fitted() const = 0;

	/// Fitted state (coefficients, smoothing factors, AIC) for provenance.
	virtual nlohmann::json state() const = 0;

protected:
	void require_fitted() const {
		if (!fitted()) throw Error(method() + ": predict called before fit");
	}

	static void require_horizon(int horizon) {
		if (horizon <= 0) throw Error("predict: horizon must be positive");
	}

	static void check_finite(const std::vector<double>& forecast, const std::string& who) {
		for (double v : forecast) {
			if (!std::isfinite(v)) throw Error(who + ": produced a non-finite forecast");
		}
	}
};

/// Project the final observation forward for the whole horizon.
inline std::vector<double> last_observation_forecast(std::span<const double> history, int horizon) {
	if (history.empty()) throw InsufficientDataError("last_observation_forecast: empty history");
	if (horizon <= 0) throw Error("last_observation_forecast: horizon must be positive");
	return std::vector<double>(static_cast<std::size_t>(horizon), history.back());
}

/// Repeat the observations seen one seasonal period (24 h) ago. Horizons
/// longer than one period wrap around the same day-old window.
inline std::vector<double> last_day_forecast(std::span<const double> history, int horizon, int period) {
	if (period < 1) throw Error("last_day_forecast: period must be positive");
	if (history.size() < static_cast<std::size_t>(period)) {
		throw InsufficientDataError("last_day_forecast: history shorter than one seasonal period");
	}
	if (horizon <= 0) throw Error("last_day_forecast: horizon must be positive");
	std::vector<double> out(static_cast<std::size_t>(horizon));
	const std::size_t base = history.size() - static_cast<std::size_t>(period);
	for (int k = 0; k < horizon; ++k) {
		out[static_cast<std::size_t>(k)] = history[base + static_cast<std::size_t>(k % period)];
	}
	return out;
}

class LastObservationForecaster final : public Forecaster {
public:
	std::string method() const override { return "last_observation"; }

	void fit(const UniformSeries& train) override { history_ = train.values; }

	std::vector<double> predict(int horizon) const override {
		require_fitted();
		require_horizon(horizon);
		return last_observation_forecast(history_, horizon);
	}

	void update(std::span<const double> new_observations) override {
		history_.insert(history_.end(), new_observations.begin(), new_observations.end());
	}

	bool fitted() const override { return !history_.empty(); }

	nlohmann::json state() const override { return {{"method", method()}}; }

private:
	std::vector<double> history_;
};

class LastDayForecaster final : public Forecaster {
public:
	explicit LastDayForecaster(int period) : period_(period) {
		if (period_ < 1) throw Error("LastDayForecaster: period must be positive");
	}

	std::string method() const override { return "last_day"; }

	void fit(const UniformSeries& train) override {
		if (train.size() < static_cast<std::size_t>(period_)) {
			throw InsufficientDataError("last_day: training history shorter than one seasonal period");
		}
		history_ = train.values;
	}

	std::vector<double> predict(int horizon) const override {
		require_fitted();
		require_horizon(horizon);
		return last_day_forecast(history_, horizon, period_);
	}

	void update(std::span<const double> new_observations) override {
		history_.insert(history_.end(), new_observations.begin(), new_observations.end());
	}

	bool fitted() const override { return !history_.empty(); }

	nlohmann::json state() const override {
		return {{"method", method()}, {"period", period_}};
	}

private:
	int period_;
	std::vector<double> history_;
};

} // namespace loadcast::models
