#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "loadcast/models/forecaster.hpp"

namespace loadcast::models {

/// Gaussian log-likelihood of one-step residuals with the MLE variance.
inline double gaussian_loglik(double sum_squared_residuals, std::size_t n_residuals) {
	const double n = static_cast<double>(n_residuals);
	const double variance = sum_squared_residuals / n;
	if (variance <= 0.0) return std::numeric_limits<double>::infinity();
	return -0.5 * n * (std::log(2.0 * M_PI * variance) + 1.0);
}

/// Single exponential smoothing with a fixed level smoothing factor.
///
/// The level starts at the first observation and is advanced by
/// level <- alpha * y + (1 - alpha) * level; forecasts are flat at the level.
class SesForecaster final : public Forecaster {
public:
	explicit SesForecaster(double alpha) : alpha_(alpha) {
		if (alpha_ < 0.0 || alpha_ > 1.0) throw Error("SES: alpha must lie in [0, 1]");
	}

	std::string method() const override { return "ses"; }

	void fit(const UniformSeries& train) override {
		if (train.size() < 3) throw InsufficientDataError("SES: need at least 3 observations");
		level_ = train.values.front();
		double ss = 0.0;
		for (std::size_t t = 1; t < train.size(); ++t) {
			const double residual = train.values[t] - level_;
			ss += residual * residual;
			level_ = alpha_ * train.values[t] + (1.0 - alpha_) * level_;
		}
		const std::size_t n_res = train.size() - 1;
		if (ss == 0.0) {
			degenerate_ = true;
			loglik_ = std::numeric_limits<double>::infinity();
			aic_ = -std::numeric_limits<double>::infinity();
		} else {
			degenerate_ = false;
			loglik_ = gaussian_loglik(ss, n_res);
			aic_ = 2.0 * kParamCount - 2.0 * loglik_;
		}
		fitted_ = true;
	}

	std::vector<double> predict(int horizon) const override {
		require_fitted();
		require_horizon(horizon);
		return std::vector<double>(static_cast<std::size_t>(horizon), level_);
	}

	void update(std::span<const double> new_observations) override {
		require_fitted();
		for (double y : new_observations) {
			level_ = alpha_ * y + (1.0 - alpha_) * level_;
		}
	}

	bool fitted() const override { return fitted_; }

	double alpha() const { return alpha_; }
	double level() const { return level_; }
	double aic() const { return aic_; }
	bool degenerate() const { return degenerate_; }

	nlohmann::json state() const override {
		return {{"method", method()},
		        {"alpha", alpha_},
		        {"level", level_},
		        {"aic", aic_},
		        {"degenerate", degenerate_}};
	}

private:
	static constexpr double kParamCount = 2.0; // alpha and the initial level

	double alpha_;
	double level_ = 0.0;
	double loglik_ = 0.0;
	double aic_ = std::numeric_limits<double>::quiet_NaN();
	bool degenerate_ = false;
	bool fitted_ = false;
};

/// Default alpha candidates: 0.01 to 0.99 in steps of 0.02.
inline std::vector<double> default_ses_alpha_grid() {
	std::vector<double> grid;
	grid.reserve(50);
	for (int k = 0; k < 50; ++k) grid.push_back(0.01 + 0.02 * k);
	return grid;
}

/// Fit SES by picking the alpha with the lowest AIC. A constant series is
/// degenerate; it gets alpha = 0 and a warning flag in the state.
inline SesForecaster fit_ses(const UniformSeries& train,
                             const std::vector<double>& alphas = default_ses_alpha_grid()) {
	if (population_std(train.values) == 0.0) {
		SesForecaster flat(0.0);
		flat.fit(train);
		return flat;
	}
	SesForecaster best(alphas.front());
	best.fit(train);
	for (std::size_t i = 1; i < alphas.size(); ++i) {
		SesForecaster candidate(alphas[i]);
		candidate.fit(train);
		if (candidate.aic() < best.aic()) best = candidate;
	}
	return best;
}

} // namespace loadcast::models
