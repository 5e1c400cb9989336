#pragma once

#include <cmath>
#include <vector>

#include "loadcast/rng.hpp"
#include "loadcast/series.hpp"

namespace tests {

inline loadcast::UniformSeries make_series(std::vector<double> values, std::int64_t step = 3600,
                                           std::int64_t start = 0) {
	return loadcast::UniformSeries(start, step, std::move(values));
}

/// Daily sinusoid sampled at `step` seconds for `n` points.
inline loadcast::UniformSeries daily_sinusoid(std::size_t n, std::int64_t step, double base,
                                              double amplitude, double phase = 0.0) {
	std::vector<double> values(n);
	for (std::size_t i = 0; i < n; ++i) {
		const double t = static_cast<double>(i) * static_cast<double>(step);
		values[i] = base + amplitude * std::sin(2.0 * M_PI * t / 86400.0 + phase);
	}
	return make_series(std::move(values), step);
}

/// AR(1) simulation y_t = phi * y_{t-1} + e_t with unit-variance shocks.
inline loadcast::UniformSeries simulate_ar1(std::size_t n, double phi, std::uint64_t seed,
                                            double shock_std = 1.0) {
	loadcast::Rng rng(seed);
	std::vector<double> values(n);
	double y = 0.0;
	for (std::size_t burn = 0; burn < 100; ++burn) y = phi * y + rng.normal(0.0, shock_std);
	for (std::size_t i = 0; i < n; ++i) {
		y = phi * y + rng.normal(0.0, shock_std);
		values[i] = y;
	}
	return make_series(std::move(values));
}

/// Seasonal AR simulation y_t = Phi * y_{t-m} + e_t.
inline loadcast::UniformSeries simulate_seasonal_ar(std::size_t n, double seasonal_phi, int m,
                                                    std::uint64_t seed, double shock_std = 1.0) {
	loadcast::Rng rng(seed);
	const std::size_t lag = static_cast<std::size_t>(m);
	std::vector<double> values(n + 20 * lag, 0.0);
	for (std::size_t i = lag; i < values.size(); ++i) {
		values[i] = seasonal_phi * values[i - lag] + rng.normal(0.0, shock_std);
	}
	values.erase(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(20 * lag));
	return make_series(std::move(values));
}

} // namespace tests
