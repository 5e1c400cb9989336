#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "loadcast/error.hpp"
#include "loadcast/rng.hpp"

namespace loadcast::nn {

/// A dense parameter buffer with a gradient of the same shape.
struct Tensor {
	std::vector<std::size_t> shape;
	std::vector<double> data;
	std::vector<double> grad;

	Tensor() = default;
	explicit Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
		data.assign(element_count(), 0.0);
		grad.assign(element_count(), 0.0);
	}

	std::size_t element_count() const {
		std::size_t n = 1;
		for (std::size_t d : shape) n *= d;
		return shape.empty() ? 0 : n;
	}

	std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
	std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

	void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

	/// Seeded uniform init in +-1/sqrt(fan_in).
	void init_uniform(Rng& rng, std::size_t fan_in) {
		const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
		for (double& v : data) v = rng.uniform(-bound, bound);
	}

	bool all_finite() const {
		for (double v : data) {
			if (!std::isfinite(v)) return false;
		}
		return true;
	}
};

} // namespace loadcast::nn
