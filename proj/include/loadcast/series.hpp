#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadcast/error.hpp"
#include "loadcast/rng.hpp"

namespace loadcast {

/// Simple statistics used throughout. Standard deviations are population
/// (divide by n) everywhere in this library.
inline double mean_of(std::span<const double> xs) {
	double sum = 0.0;
	for (double x : xs) sum += x;
	return sum / static_cast<double>(xs.size());
}

inline double population_std(std::span<const double> xs) {
	const double m = mean_of(xs);
	double ss = 0.0;
	for (double x : xs) ss += (x - m) * (x - m);
	return std::sqrt(ss / static_cast<double>(xs.size()));
}

/// An evenly sampled sequence of ingress-rate observations (messages/second).
///
/// Index i corresponds to start_time + i * step_seconds. Gaps are not
/// representable; they must be closed by interpolation before construction.
struct UniformSeries {
	std::int64_t start_time = 0;   // UNIX seconds, UTC
	std::int64_t step_seconds = 1; // > 0
	std::vector<double> values;

	UniformSeries() = default;
	UniformSeries(std::int64_t start, std::int64_t step, std::vector<double> vals)
	    : start_time(start), step_seconds(step), values(std::move(vals)) {
		validate();
	}

	void validate() const {
		if (step_seconds <= 0) throw DataError("UniformSeries: step must be positive");
		if (values.empty()) throw DataError("UniformSeries: values must be non-empty");
		for (double v : values) {
			if (!std::isfinite(v)) throw DataError("UniformSeries: values must be finite");
		}
	}

	std::size_t size() const { return values.size(); }
	std::int64_t timestamp_at(std::size_t i) const {
		return start_time + static_cast<std::int64_t>(i) * step_seconds;
	}
};

/// The three sampling rates of interest, each tied to its seasonal period
/// (observations per 24 h) and forecast horizon.
enum class RateId { FiveMin, FifteenMin, OneHour };

struct RateProfile {
	RateId rate;
	std::int64_t step_seconds;
	int seasonal_period; // observations per 24 h; period * step == 86400
	int horizon;

	static RateProfile of(RateId id) {
		switch (id) {
		case RateId::FiveMin: return {RateId::FiveMin, 300, 288, 1};
		case RateId::FifteenMin: return {RateId::FifteenMin, 900, 96, 4};
		case RateId::OneHour: return {RateId::OneHour, 3600, 24, 12};
		}
		throw DataError("unknown rate");
	}

	std::string name() const {
		switch (rate) {
		case RateId::FiveMin: return "5min";
		case RateId::FifteenMin: return "15min";
		case RateId::OneHour: return "1h";
		}
		return "?";
	}

	static RateProfile parse(const std::string& text) {
		if (text == "5min") return of(RateId::FiveMin);
		if (text == "15min") return of(RateId::FifteenMin);
		if (text == "1h") return of(RateId::OneHour);
		throw DataError("unknown rate '" + text + "' (expected 5min, 15min or 1h)");
	}
};

inline const std::vector<RateProfile>& all_rate_profiles() {
	static const std::vector<RateProfile> profiles = {
	    RateProfile::of(RateId::OneHour),
	    RateProfile::of(RateId::FifteenMin),
	    RateProfile::of(RateId::FiveMin),
	};
	return profiles;
}

/// Constants of the dataset-adjustment pipeline.
struct AdjustmentParams {
	double noise_sigma = 0.01;    // relative std-dev of injected noise
	double target_mean = 108000.0;
	double target_std = 12000.0;
	std::uint64_t seed = 0;

	void validate() const {
		if (noise_sigma < 0) throw DataError("AdjustmentParams: noise_sigma must be >= 0");
		if (target_std <= 0) throw DataError("AdjustmentParams: target_std must be > 0");
		if (target_mean <= 0) throw DataError("AdjustmentParams: target_mean must be > 0");
	}
};

/// Chronological split fractions, e.g. {0.6, 0.2, 0.2} or {0.8, 0.2}.
struct SplitSpec {
	std::vector<double> fractions;

	void validate() const {
		if (fractions.empty()) throw DataError("SplitSpec: no fractions");
		double sum = 0.0;
		for (double f : fractions) {
			if (f <= 0.0 || f > 1.0) throw DataError("SplitSpec: fractions must lie in (0, 1]");
			sum += f;
		}
		if (std::abs(sum - 1.0) > 1e-9) throw DataError("SplitSpec: fractions must sum to 1");
	}
};

// ---------------------------------------------------------------------------
// Interpolation and resampling
// ---------------------------------------------------------------------------

/// Upsample by a piecewise-quadratic interpolating spline with continuous
/// first derivative and a natural start (zero second derivative at the first
/// knot). The spline passes through every original observation exactly.
///
/// Knot slopes come from local central differences and each interval holds
/// two quadratic pieces joined C1 at its midpoint. The construction is local:
/// unlike the slope-chaining recursion b_{i+1} = 2*dy/h - b_i, perturbations
/// in one observation do not propagate along the series.
inline UniformSeries interpolate(const UniformSeries& series, std::int64_t target_step) {
	if (target_step <= 0) throw StepMismatchError("interpolate: target step must be positive");
	if (series.step_seconds % target_step != 0) {
		throw StepMismatchError("interpolate: series step must be an integer multiple of the target step");
	}
	if (series.size() < 3) throw InsufficientDataError("interpolate: need at least 3 observations");

	const std::size_t n = series.size();
	const double h = static_cast<double>(series.step_seconds);
	const auto& y = series.values;

	std::vector<double> slope(n);
	for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
	// Zero curvature of the first half-piece: 3*s_0 + s_1 = 4*dy_0/h.
	slope[0] = (4.0 * (y[1] - y[0]) / h - slope[1]) / 3.0;
	// One-sided parabola through the last three points.
	slope[n - 1] = (y[n - 3] - 4.0 * y[n - 2] + 3.0 * y[n - 1]) / (2.0 * h);

	// Per interval [x_i, x_{i+1}]: left piece anchored at (y_i, s_i), right
	// piece anchored at (y_{i+1}, s_{i+1}); their curvatures follow from
	// value and slope continuity at the midpoint.
	std::vector<double> curve_left(n - 1), curve_right(n - 1);
	for (std::size_t i = 0; i + 1 < n; ++i) {
		const double dy = y[i + 1] - y[i];
		const double slope_gap = (slope[i + 1] - slope[i]) / h;
		const double offset = 4.0 * (dy - 0.5 * h * (slope[i] + slope[i + 1])) / (h * h);
		curve_left[i] = 0.5 * (slope_gap + offset);
		curve_right[i] = 0.5 * (slope_gap - offset);
	}

	const std::size_t per_interval = static_cast<std::size_t>(series.step_seconds / target_step);
	const std::size_t out_len = (n - 1) * per_interval + 1;
	std::vector<double> out(out_len);
	for (std::size_t j = 0; j < out_len; ++j) {
		const std::size_t interval = std::min(j / per_interval, n - 2);
		const double u = static_cast<double>(j - interval * per_interval) *
		                 static_cast<double>(target_step);
		if (u <= 0.5 * h) {
			out[j] = y[interval] + slope[interval] * u + curve_left[interval] * u * u;
		} else {
			const double v = u - h; // distance from the right knot (negative)
			out[j] = y[interval + 1] + slope[interval + 1] * v + curve_right[interval] * v * v;
		}
	}
	return UniformSeries(series.start_time, target_step, std::move(out));
}

/// Change the sampling rate. Downsampling takes the arithmetic mean of each
/// bucket (values are rates, so the bucket rate is the mean, not the sum);
/// a trailing partial bucket is dropped. Upsampling delegates to interpolate.
inline UniformSeries resample(const UniformSeries& series, std::int64_t target_step) {
	if (target_step <= 0) throw StepMismatchError("resample: target step must be positive");
	if (target_step == series.step_seconds) return series;
	if (target_step > series.step_seconds) {
		if (target_step % series.step_seconds != 0) {
			throw StepMismatchError("resample: steps are not integer multiples of each other");
		}
		const std::size_t k = static_cast<std::size_t>(target_step / series.step_seconds);
		const std::size_t buckets = series.size() / k;
		if (buckets == 0) throw InsufficientDataError("resample: series shorter than one bucket");
		std::vector<double> out(buckets);
		for (std::size_t b = 0; b < buckets; ++b) {
			double sum = 0.0;
			for (std::size_t i = 0; i < k; ++i) sum += series.values[b * k + i];
			out[b] = sum / static_cast<double>(k);
		}
		return UniformSeries(series.start_time, target_step, std::move(out));
	}
	if (series.step_seconds % target_step != 0) {
		throw StepMismatchError("resample: steps are not integer multiples of each other");
	}
	return interpolate(series, target_step);
}

/// Estimate the relative noise level of a fine-grained series: resample to
/// coarse_step, interpolate back, and take the standard deviation of the
/// relative differences (interpolated - original) / original. Timestamps where
/// the original value is zero are skipped.
inline double estimate_noise_sigma(const UniformSeries& fine, std::int64_t coarse_step) {
	if (coarse_step <= fine.step_seconds || coarse_step % fine.step_seconds != 0) {
		throw StepMismatchError("estimate_noise_sigma: fine step must divide the coarse step");
	}
	const UniformSeries coarse = resample(fine, coarse_step);
	if (coarse.size() < 2) {
		throw InsufficientDataError("estimate_noise_sigma: series spans fewer than 2 coarse buckets");
	}
	const UniformSeries back = coarse.size() >= 3
	                               ? interpolate(coarse, fine.step_seconds)
	                               : coarse; // unreachable given the check above
	std::vector<double> rel;
	rel.reserve(back.size());
	for (std::size_t i = 0; i < back.size() && i < fine.size(); ++i) {
		const double original = fine.values[i];
		if (original == 0.0) continue;
		rel.push_back((back.values[i] - original) / original);
	}
	if (rel.empty()) throw UndefinedRelativeError("estimate_noise_sigma: all original values are zero");
	return population_std(rel);
}

/// Multiply each observation by (1 + e) with e ~ N(0, noise_sigma) drawn from
/// a deterministic seeded generator. Same seed, same output.
inline UniformSeries inject_noise(const UniformSeries& series, const AdjustmentParams& params) {
	params.validate();
	if (params.noise_sigma == 0.0) return series;
	Rng rng(params.seed);
	std::vector<double> out(series.size());
	for (std::size_t i = 0; i < series.size(); ++i) {
		out[i] = series.values[i] * (1.0 + rng.normal(0.0, params.noise_sigma));
	}
	return UniformSeries(series.start_time, series.step_seconds, std::move(out));
}

/// Affine-map the series to the target mean and population standard deviation.
inline UniformSeries scale_shift(const UniformSeries& series, const AdjustmentParams& params) {
	params.validate();
	const double m = mean_of(series.values);
	const double s = population_std(series.values);
	if (s == 0.0) throw DegenerateSeriesError("scale_shift: series has zero variance");
	std::vector<double> out(series.size());
	for (std::size_t i = 0; i < series.size(); ++i) {
		out[i] = (series.values[i] - m) / s * params.target_std + params.target_mean;
	}
	return UniformSeries(series.start_time, series.step_seconds, std::move(out));
}

/// Chronological split into contiguous segments. Boundaries are
/// floor-cumulative indices; concatenating the segments reproduces the input.
inline std::vector<UniformSeries> split(const UniformSeries& series, const SplitSpec& spec) {
	spec.validate();
	const std::size_t n = series.size();
	std::vector<UniformSeries> segments;
	segments.reserve(spec.fractions.size());
	double cumulative = 0.0;
	std::size_t begin = 0;
	for (std::size_t k = 0; k < spec.fractions.size(); ++k) {
		cumulative += spec.fractions[k];
		std::size_t end = (k + 1 == spec.fractions.size())
		                      ? n
		                      : static_cast<std::size_t>(std::floor(cumulative * static_cast<double>(n)));
		if (end <= begin || end > n) {
			throw SplitTooFineError("split: fraction produces an empty segment");
		}
		segments.emplace_back(series.timestamp_at(begin), series.step_seconds,
		                      std::vector<double>(series.values.begin() + static_cast<std::ptrdiff_t>(begin),
		                                          series.values.begin() + static_cast<std::ptrdiff_t>(end)));
		begin = end;
	}
	return segments;
}

} // namespace loadcast
