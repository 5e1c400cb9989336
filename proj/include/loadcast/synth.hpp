#pragma once

#include <cmath>
#include <cstdint>

#include <json.hpp>

#include "loadcast/rng.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

/// Synthetic ingress-rate trace: daily harmonics plus an optional weekly
/// cycle, a linear trend, and multiplicative Gaussian noise. Deterministic
/// for a fixed seed.
struct SynthSpec {
	int days = 28;
	std::int64_t step_seconds = 3600;
	double base = 108000.0;
	double daily_rel = 0.12;       // first daily harmonic, relative to base
	double daily2_rel = 0.06;      // second harmonic
	double daily3_rel = 0.04;      // third harmonic
	double weekly_rel = 0.0;       // weekly level cycle
	double weekly_amp_mod = 0.0;   // weekly modulation of the daily amplitude
	double trend_rel_per_day = 0.006;
	double noise_rel = 0.01;
	std::uint64_t seed = 0;
	std::int64_t start_time = 1577836800; // 2020-01-01T00:00:00Z

	void validate() const {
		if (days < 1 || step_seconds <= 0 || base <= 0.0) {
			throw DataError("SynthSpec: days, step and base must be positive");
		}
		if (noise_rel < 0.0) throw DataError("SynthSpec: noise must be non-negative");
	}

	nlohmann::json to_json() const {
		return {{"days", days},
		        {"step_seconds", step_seconds},
		        {"base", base},
		        {"daily_rel", daily_rel},
		        {"daily2_rel", daily2_rel},
		        {"daily3_rel", daily3_rel},
		        {"weekly_rel", weekly_rel},
		        {"weekly_amp_mod", weekly_amp_mod},
		        {"trend_rel_per_day", trend_rel_per_day},
		        {"noise_rel", noise_rel},
		        {"seed", seed},
		        {"start_time", start_time}};
	}
};

inline UniformSeries generate_synthetic(const SynthSpec& spec) {
	spec.validate();
	const std::size_t n = static_cast<std::size_t>(spec.days) *
	                      static_cast<std::size_t>(86400 / spec.step_seconds);
	if (n < 2) throw DataError("generate_synthetic: trace would be shorter than 2 points");
	Rng rng(spec.seed);
	const double daily = 2.0 * M_PI / 86400.0;
	const double weekly = daily / 7.0;
	std::vector<double> values(n);
	for (std::size_t i = 0; i < n; ++i) {
		const double t = static_cast<double>(i) * static_cast<double>(spec.step_seconds);
		const double envelope = 1.0 + spec.weekly_amp_mod * std::sin(weekly * t + 0.4);
		double level = 1.0;
		level += envelope * spec.daily_rel * std::sin(daily * t);
		level += envelope * spec.daily2_rel * std::sin(2.0 * daily * t + 1.3);
		level += envelope * spec.daily3_rel * std::sin(3.0 * daily * t + 2.1);
		level += spec.weekly_rel * std::sin(weekly * t + 0.7);
		level += spec.trend_rel_per_day * t / 86400.0;
		const double clean = spec.base * level;
		values[i] = spec.noise_rel > 0.0 ? clean * (1.0 + rng.normal(0.0, spec.noise_rel)) : clean;
	}
	return UniformSeries(spec.start_time, spec.step_seconds, std::move(values));
}

} // namespace loadcast
