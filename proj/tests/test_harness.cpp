#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "loadcast/bench/experiment.hpp"

using namespace loadcast;
using namespace loadcast::bench;
using Catch::Approx;
using tests::make_series;

namespace {

/// Records how many observations were visible at each predict call.
class ProbeForecaster final : public models::Forecaster {
public:
	std::string method() const override { return "probe"; }

	void fit(const UniformSeries& train) override { seen_ = train.size(); }

	std::vector<double> predict(int horizon) const override {
		seen_at_predict_.push_back(seen_);
		return std::vector<double>(static_cast<std::size_t>(horizon), 1.0);
	}

	void update(std::span<const double> new_observations) override {
		seen_ += new_observations.size();
	}

	bool fitted() const override { return seen_ > 0; }

	nlohmann::json state() const override { return {{"method", "probe"}}; }

	std::size_t seen() const { return seen_; }
	const std::vector<std::size_t>& seen_at_predict() const { return seen_at_predict_; }

private:
	std::size_t seen_ = 0;
	mutable std::vector<std::size_t> seen_at_predict_;
};

RunOptions fast_options() {
	RunOptions options;
	options.grids.arima_max_p = 1;
	options.grids.arima_max_q = 1;
	options.grids.sarima_max_P = 1;
	options.grids.sarima_max_Q = 0;
	options.grids.tes.alphas = {0.2, 0.5};
	options.grids.tes.betas = {0.0, 0.05};
	options.grids.tes.gammas = {0.1, 0.3};
	options.budget.max_trials = 2;
	options.space.num_layers = {1};
	options.space.hidden_sizes = {4};
	options.space.dropout_rates = {0.0};
	options.space.input_len_periods = {1};
	options.train.max_epochs = 3;
	options.train.early_stop_patience = 3;
	return options;
}

} // namespace

TEST_CASE("rate profiles pin the paper's horizons and periods", "[harness][profile]") {
	REQUIRE(RateProfile::of(RateId::FiveMin).horizon == 1);
	REQUIRE(RateProfile::of(RateId::FifteenMin).horizon == 4);
	REQUIRE(RateProfile::of(RateId::OneHour).horizon == 12);
	for (const auto& profile : all_rate_profiles()) {
		REQUIRE(profile.seasonal_period * profile.step_seconds == 86400);
	}
}

TEST_CASE("rolling evaluation matches a brute-force oracle for last observation",
          "[harness][rolling][oracle]") {
	const auto series = tests::simulate_ar1(60, 0.7, 5);
	const auto parts = split(series, SplitSpec{{0.8, 0.2}});
	const auto& train = parts[0];
	const auto& test = parts[1];
	const int horizon = 3;

	models::LastObservationForecaster model;
	model.fit(train);
	const auto outcome = rolling_evaluate(model, train, test, horizon);

	// Brute force: at origin t the model has seen train plus test[0..t).
	ForecastEval expected;
	for (std::size_t t = 0; t + static_cast<std::size_t>(horizon) <= test.size(); ++t) {
		const double last_seen = t == 0 ? train.values.back() : test.values[t - 1];
		for (int k = 0; k < horizon; ++k) {
			expected.append(test.values[t + static_cast<std::size_t>(k)], last_seen);
		}
	}
	REQUIRE(outcome.n_windows == test.size() - static_cast<std::size_t>(horizon) + 1);
	REQUIRE(smape(outcome.pooled) == Approx(smape(expected)).margin(1e-12));
	REQUIRE(rmse(outcome.pooled) == Approx(rmse(expected)).margin(1e-12));
	REQUIRE(outcome.pooled.predicted == expected.predicted);
}

TEST_CASE("last-day rolling evaluation is exact on periodic data", "[harness][rolling]") {
	const int period = 24;
	std::vector<double> values;
	for (int i = 0; i < period * 10; ++i) {
		values.push_back(100.0 + 10.0 * std::sin(2.0 * M_PI * (i % period) / period));
	}
	const auto series = make_series(std::move(values), 3600);
	const auto parts = split(series, SplitSpec{{0.8, 0.2}});

	models::LastDayForecaster model(period);
	model.fit(parts[0]);
	const auto outcome = rolling_evaluate(model, parts[0], parts[1], 12);
	REQUIRE(smape(outcome.pooled) == Approx(0.0).margin(1e-9));
	REQUIRE(rmse(outcome.pooled) == Approx(0.0).margin(1e-9));
}

TEST_CASE("the rolling evaluator never exposes observations at or after the origin",
          "[harness][rolling][lookahead]") {
	const auto series = tests::simulate_ar1(50, 0.5, 9);
	const auto parts = split(series, SplitSpec{{0.8, 0.2}});
	ProbeForecaster probe;
	probe.fit(parts[0]);
	const auto outcome = rolling_evaluate(probe, parts[0], parts[1], 2);
	REQUIRE(outcome.n_windows == probe.seen_at_predict().size());
	for (std::size_t i = 0; i < probe.seen_at_predict().size(); ++i) {
		// Predicting the window at origin i must only have seen the training
		// data plus the first i test observations.
		REQUIRE(probe.seen_at_predict()[i] == parts[0].size() + i);
	}
}

TEST_CASE("grid construction matches the comparison shape", "[harness][grid]") {
	std::vector<std::string> datasets;
	for (int i = 0; i < 9; ++i) datasets.push_back("d" + std::to_string(i));
	const auto specs = build_grid(datasets, all_rate_profiles(), comparison_methods(), 1);
	REQUIRE(specs.size() == 189);

	std::size_t unavailable = 0;
	for (const auto& spec : specs) {
		if (!method_available(spec.method, spec.profile.rate).available) ++unavailable;
	}
	// SARIMA at 5 min: 9 datasets; Prophet everywhere: 27 cells.
	REQUIRE(unavailable == 9 + 27);

	const auto single = build_grid({"one"}, {RateProfile::of(RateId::OneHour)}, {MethodId::Ses}, 1);
	REQUIRE(single.size() == 1);
}

TEST_CASE("sarima at five minutes and prophet are unavailable", "[harness][availability]") {
	REQUIRE_FALSE(method_available(MethodId::Sarima, RateId::FiveMin).available);
	REQUIRE(method_available(MethodId::Sarima, RateId::FifteenMin).available);
	REQUIRE(method_available(MethodId::Sarima, RateId::OneHour).available);
	for (RateId rate : {RateId::FiveMin, RateId::FifteenMin, RateId::OneHour}) {
		REQUIRE_FALSE(method_available(MethodId::Prophet, rate).available);
	}
	REQUIRE_THROWS_AS(
	    ExperimentSpec::make("x", RateProfile::of(RateId::FiveMin), MethodId::Sarima, 1).validate(),
	    MethodUnavailableError);
}

TEST_CASE("run_experiment marks unavailable and failed cells", "[harness][cells]") {
	const auto series = tests::daily_sinusoid(24 * 10, 3600, 1000.0, 100.0);
	const auto options = fast_options();

	const auto unavailable = run_experiment(
	    ExperimentSpec::make("d", RateProfile::of(RateId::FiveMin), MethodId::Sarima, 1), series,
	    options);
	REQUIRE(unavailable.result.status == "unavailable");

	const auto prophet = run_experiment(
	    ExperimentSpec::make("d", RateProfile::of(RateId::OneHour), MethodId::Prophet, 1), series,
	    options);
	REQUIRE(prophet.result.status == "unavailable");

	const auto too_short = run_experiment(
	    ExperimentSpec::make("d", RateProfile::of(RateId::OneHour), MethodId::Tes, 1),
	    make_series(std::vector<double>(30, 5.0), 3600), options);
	REQUIRE(too_short.result.status == "failed");
	REQUIRE_FALSE(too_short.result.message.empty());
}

TEST_CASE("run_experiment produces pooled metrics and provenance", "[harness][cells]") {
	const auto series = tests::daily_sinusoid(24 * 10, 3600, 1000.0, 100.0);
	const auto options = fast_options();
	const auto cell = run_experiment(
	    ExperimentSpec::make("d", RateProfile::of(RateId::OneHour), MethodId::Ses, 1), series,
	    options);
	REQUIRE(cell.result.status == "ok");
	REQUIRE(cell.result.smape >= 0.0);
	REQUIRE(cell.result.smape <= 100.0);
	REQUIRE(cell.result.n_windows == 48 - 12 + 1); // test = 48 points, horizon 12
	REQUIRE(cell.result.provenance.contains("model"));
	REQUIRE(cell.result.provenance.at("search").contains("best_config"));
	REQUIRE_FALSE(cell.trials.empty());
}

TEST_CASE("run_experiment is deterministic", "[harness][determinism]") {
	const auto series = tests::daily_sinusoid(24 * 10, 3600, 900.0, 90.0);
	const auto options = fast_options();
	const auto spec = ExperimentSpec::make("d", RateProfile::of(RateId::OneHour), MethodId::Arima, 3);
	const auto a = run_experiment(spec, series, options);
	const auto b = run_experiment(spec, series, options);
	REQUIRE(a.result.smape == b.result.smape);
	REQUIRE(a.result.rmse == b.result.rmse);
	REQUIRE(a.result.provenance.at("search").at("best_config").dump() ==
	        b.result.provenance.at("search").at("best_config").dump());
}

TEST_CASE("filter-only updates match periodic refits for ses", "[harness][update]") {
	// With a fixed alpha the SES filter equals a refit over the longer
	// history, so update_period must not change the scores.
	const auto series = tests::daily_sinusoid(24 * 10, 3600, 1000.0, 100.0);
	auto options = fast_options();
	auto spec = ExperimentSpec::make("d", RateProfile::of(RateId::OneHour), MethodId::Ses, 1, 0);
	const auto filter_only = run_experiment(spec, series, options);
	spec.update_period = 1;
	const auto refit_every_step = run_experiment(spec, series, options);
	REQUIRE(filter_only.result.smape == Approx(refit_every_step.result.smape).margin(1e-9));
}

TEST_CASE("run_grid executes all cells and keeps going on failures", "[harness][grid]") {
	const auto good = tests::daily_sinusoid(24 * 10, 3600, 1000.0, 100.0);
	const auto bad = make_series(std::vector<double>(30, 5.0), 3600);
	const auto options = fast_options();

	const auto specs = build_grid({"good", "bad"}, {RateProfile::of(RateId::OneHour)},
	                              {MethodId::LastObservation, MethodId::LastDay, MethodId::Prophet},
	                              1);
	REQUIRE(specs.size() == 6);

	std::size_t callbacks = 0;
	const auto outcomes = run_grid(
	    specs,
	    [&](const std::string& id, const RateProfile&) -> const UniformSeries& {
		    return id == "good" ? good : bad;
	    },
	    options, 1, [&](const CellOutcome&) { ++callbacks; });

	REQUIRE(outcomes.size() == 6);
	REQUIRE(callbacks == 6);
	std::size_t ok = 0, unavailable = 0, failed = 0;
	for (const auto& outcome : outcomes) {
		if (outcome.result.status == "ok") ++ok;
		if (outcome.result.status == "unavailable") ++unavailable;
		if (outcome.result.status == "failed") ++failed;
	}
	REQUIRE(ok == 2);          // both baselines on the good series
	REQUIRE(unavailable == 2); // prophet cells
	REQUIRE(failed == 2);      // the short series cannot host a 12-step test window
}
