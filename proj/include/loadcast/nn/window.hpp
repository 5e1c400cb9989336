#pragma once

#include <span>
#include <vector>

#include "loadcast/nn/graph.hpp"
#include "loadcast/series.hpp"

namespace loadcast::nn {

inline Normalization fit_normalization(std::span<const double> train_values) {
	Normalization norm;
	norm.mean = mean_of(train_values);
	const double s = population_std(train_values);
	norm.std = s > 0.0 ? s : 1.0;
	return norm;
}

/// Sliding (input, target) windows with stride 1, stored normalized.
/// Window t uses observations [t - input_len, t) as input and
/// [t, t + horizon) as target.
struct WindowSet {
	int input_len = 0;
	int horizon = 0;
	std::vector<double> inputs;  // count x input_len, row-major
	std::vector<double> targets; // count x horizon, row-major
	Normalization norm;

	std::size_t count() const {
		return input_len == 0 ? 0 : inputs.size() / static_cast<std::size_t>(input_len);
	}

	std::vector<double> input_row(std::size_t i) const {
		const std::size_t w = static_cast<std::size_t>(input_len);
		return {inputs.begin() + static_cast<std::ptrdiff_t>(i * w),
		        inputs.begin() + static_cast<std::ptrdiff_t>((i + 1) * w)};
	}

	std::vector<double> target_row(std::size_t i) const {
		const std::size_t h = static_cast<std::size_t>(horizon);
		return {targets.begin() + static_cast<std::ptrdiff_t>(i * h),
		        targets.begin() + static_cast<std::ptrdiff_t>((i + 1) * h)};
	}
};

inline WindowSet window_dataset(const UniformSeries& series, int input_len, int horizon,
                                const Normalization& norm) {
	if (input_len < 1 || horizon < 1) throw Error("window_dataset: input_len and horizon must be positive");
	const std::size_t need = static_cast<std::size_t>(input_len) + static_cast<std::size_t>(horizon);
	if (series.size() < need) {
		throw InsufficientDataError("window_dataset: series shorter than input_len + horizon");
	}
	WindowSet ws;
	ws.input_len = input_len;
	ws.horizon = horizon;
	ws.norm = norm;
	const std::size_t count = series.size() - need + 1;
	ws.inputs.reserve(count * static_cast<std::size_t>(input_len));
	ws.targets.reserve(count * static_cast<std::size_t>(horizon));
	for (std::size_t t = static_cast<std::size_t>(input_len);
	     t + static_cast<std::size_t>(horizon) <= series.size(); ++t) {
		for (std::size_t i = t - static_cast<std::size_t>(input_len); i < t; ++i) {
			ws.inputs.push_back(norm.normalize(series.values[i]));
		}
		for (std::size_t i = t; i < t + static_cast<std::size_t>(horizon); ++i) {
			ws.targets.push_back(norm.normalize(series.values[i]));
		}
	}
	return ws;
}

/// Windows whose targets lie in the trailing `target_len` observations of
/// `series`, with inputs allowed to reach back into the earlier part. Used to
/// score a validation segment with full context.
inline WindowSet windows_over_tail(const UniformSeries& series, std::size_t target_len,
                                   int input_len, int horizon, const Normalization& norm) {
	WindowSet all = window_dataset(series, input_len, horizon, norm);
	if (target_len >= series.size()) return all;
	const std::size_t first_target = series.size() - target_len;
	// Window index w has its target starting at input_len + w.
	const std::size_t skip = first_target > static_cast<std::size_t>(input_len)
	                             ? first_target - static_cast<std::size_t>(input_len)
	                             : 0;
	WindowSet ws;
	ws.input_len = input_len;
	ws.horizon = horizon;
	ws.norm = norm;
	for (std::size_t w = skip; w < all.count(); ++w) {
		const auto in = all.input_row(w);
		const auto tg = all.target_row(w);
		ws.inputs.insert(ws.inputs.end(), in.begin(), in.end());
		ws.targets.insert(ws.targets.end(), tg.begin(), tg.end());
	}
	if (ws.count() == 0) throw InsufficientDataError("windows_over_tail: no complete window in the tail");
	return ws;
}

} // namespace loadcast::nn
