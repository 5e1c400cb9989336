#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/models/holt_winters.hpp"

using namespace loadcast;
using namespace loadcast::models;
using Catch::Approx;
using tests::make_series;

TEST_CASE("holt-winters tracks a noise-free daily sinusoid", "[tes]") {
	const int period = 24;
	const auto series = tests::daily_sinusoid(24 * 14, 3600, 1000.0, 200.0);
	const auto train = split(series, SplitSpec{{0.8, 0.2}});

	const auto model = fit_tes(train[0], period);
	auto rolling = model; // copy keeps the fitted state
	ForecastEval eval;
	const auto horizon_forecast = rolling.predict(period);
	for (int k = 0; k < period; ++k) {
		eval.append(train[1].values[static_cast<std::size_t>(k)],
		            horizon_forecast[static_cast<std::size_t>(k)]);
	}
	REQUIRE(smape(eval) < 0.5);
}

TEST_CASE("holt-winters with zero trend and seasonal amplitude reduces to ses", "[tes]") {
	const auto series = make_series(std::vector<double>(24 * 4, 12.5), 3600);
	HoltWintersForecaster tes(HoltWintersConfig{0.4, 0.0, 0.0, Seasonality::Additive, 24});
	tes.fit(series);
	SesForecaster ses(0.4);
	ses.fit(series);
	const auto a = tes.predict(6);
	const auto b = ses.predict(6);
	for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == Approx(b[i]).margin(1e-6));
}

TEST_CASE("holt-winters forecast follows the linear-trend formula", "[tes]") {
	// Pure ramp: detrended first-season deviations vanish, and with gamma = 0
	// they stay zero, so prediction h is exactly level + h * trend.
	std::vector<double> ramp(24 * 3);
	for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 5.0 + 1.5 * static_cast<double>(i);
	HoltWintersForecaster model(HoltWintersConfig{0.3, 0.1, 0.0, Seasonality::Additive, 24});
	model.fit(make_series(std::move(ramp), 3600));

	const auto forecast = model.predict(5);
	for (int h = 1; h <= 5; ++h) {
		REQUIRE(forecast[static_cast<std::size_t>(h - 1)] ==
		        Approx(model.level() + h * model.trend()).margin(1e-9));
	}
	// On an exact ramp the filter stays on the line.
	REQUIRE(model.trend() == Approx(1.5).margin(1e-9));
}

TEST_CASE("holt-winters multiplicative mode requires positive history", "[tes][errors]") {
	auto values = std::vector<double>(96, 10.0);
	values[50] = -1.0;
	HoltWintersForecaster model(HoltWintersConfig{0.3, 0.1, 0.1, Seasonality::Multiplicative, 24});
	REQUIRE_THROWS_AS(model.fit(make_series(std::move(values), 3600)), FitFailedError);
}

TEST_CASE("fit_tes excludes multiplicative mode on non-positive data", "[tes][search]") {
	auto series = tests::daily_sinusoid(24 * 6, 3600, 0.0, 5.0); // crosses zero
	const auto model = fit_tes(series, 24);
	REQUIRE(model.config().mode == Seasonality::Additive);
}

TEST_CASE("holt-winters update matches refit with fixed smoothing factors", "[tes][property]") {
	const auto series = tests::daily_sinusoid(24 * 8, 3600, 500.0, 120.0, 0.3);
	const HoltWintersConfig config{0.25, 0.05, 0.2, Seasonality::Additive, 24};
	const std::vector<double> extra = {612.0, 640.0, 633.5};

	HoltWintersForecaster updated(config);
	updated.fit(series);
	updated.update(extra);

	auto concatenated = series.values;
	concatenated.insert(concatenated.end(), extra.begin(), extra.end());
	HoltWintersForecaster refit(config);
	refit.fit(make_series(std::move(concatenated), 3600));

	const auto a = updated.predict(4);
	const auto b = refit.predict(4);
	for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == Approx(b[i]).margin(1e-9));
}

TEST_CASE("holt-winters needs two full seasons", "[tes][errors]") {
	HoltWintersForecaster model(HoltWintersConfig{0.3, 0.1, 0.1, Seasonality::Additive, 24});
	REQUIRE_THROWS_AS(model.fit(make_series(std::vector<double>(30, 1.0), 3600)),
	                  InsufficientDataError);
}
