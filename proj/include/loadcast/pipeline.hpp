#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "loadcast/series.hpp"

namespace loadcast {

/// One adjusted dataset variant plus its reproducibility metadata.
struct PreparedVariant {
	RateProfile profile;
	UniformSeries series;
	nlohmann::json metadata;
};

inline std::uint64_t dataset_seed(const AdjustmentParams& params, const std::string& dataset_id) {
	std::uint64_t h = 1469598103934665603ULL; // FNV-1a over the dataset id
	for (char c : dataset_id) {
		h ^= static_cast<unsigned char>(c);
		h *= 1099511628211ULL;
	}
	return derive_seed(params.seed, h);
}

/// Adjust one dataset into the three sampling-rate variants.
///
/// A source coarser than 5 minutes is spline-interpolated down to 5 minutes
/// and gets relative Gaussian noise injected (interpolation alone would be
/// unrealistically smooth); its coarser variants come from that noisy
/// 5-minute series, except where the original granularity already covers the
/// target rate. Finally every variant is scaled and shifted to the target
/// mean and standard deviation.
inline std::vector<PreparedVariant> prepare_dataset(const UniformSeries& original,
                                                    const std::string& dataset_id,
                                                    const AdjustmentParams& params) {
	params.validate();
	const std::uint64_t seed = dataset_seed(params, dataset_id);

	UniformSeries base5 = resample(original, 300);
	const bool injected = original.step_seconds > 300;
	if (injected) {
		AdjustmentParams noise = params;
		noise.seed = seed;
		base5 = inject_noise(base5, noise);
	}

	std::vector<PreparedVariant> variants;
	for (const RateProfile& profile : all_rate_profiles()) {
		const UniformSeries source = original.step_seconds <= profile.step_seconds
		                                 ? resample(original, profile.step_seconds)
		                                 : resample(base5, profile.step_seconds);
		const bool carries_noise = injected && original.step_seconds > profile.step_seconds;
		PreparedVariant variant;
		variant.profile = profile;
		variant.series = scale_shift(source, params);
		variant.metadata = {{"dataset", dataset_id},
		                    {"rate", profile.name()},
		                    {"source_step_s", original.step_seconds},
		                    {"target_step_s", profile.step_seconds},
		                    {"noise_injected", carries_noise},
		                    {"noise_sigma", carries_noise ? params.noise_sigma : 0.0},
		                    {"noise_seed", seed},
		                    {"target_mean", params.target_mean},
		                    {"target_std", params.target_std},
		                    {"rng", kRngName},
		                    {"interpolation", "quadratic-spline-c1-natural"}};
		variants.push_back(std::move(variant));
	}
	return variants;
}

} // namespace loadcast
