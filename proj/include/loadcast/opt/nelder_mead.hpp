#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace loadcast::opt {

struct NelderMeadOptions {
	std::size_t max_evaluations_per_dim = 500;
	double f_tolerance = 1e-10;
	double x_tolerance = 1e-10;
	double initial_step = 0.1;
	int restarts = 1; // extra runs started from the previous optimum
};

struct NelderMeadResult {
	std::vector<double> x;
	double f = std::numeric_limits<double>::infinity();
	std::size_t evaluations = 0;
	bool converged = false;
};

namespace detail {

inline double x_spread_scale(const std::vector<double>& x) {
	double scale = 0.0;
	for (double v : x) scale = std::max(scale, std::abs(v));
	return scale;
}

inline NelderMeadResult nelder_mead_once(const std::function<double(const std::vector<double>&)>& objective,
                                         std::vector<double> start,
                                         const NelderMeadOptions& opts,
                                         std::size_t max_evals) {
	const std::size_t dim = start.size();
	NelderMeadResult result;

	std::vector<std::vector<double>> simplex(dim + 1, start);
	std::vector<double> fvals(dim + 1);
	for (std::size_t i = 0; i < dim; ++i) {
		simplex[i + 1][i] += (start[i] != 0.0) ? opts.initial_step * std::abs(start[i]) + opts.initial_step * 0.1
		                                       : opts.initial_step;
	}
	for (std::size_t i = 0; i <= dim; ++i) {
		fvals[i] = objective(simplex[i]);
		++result.evaluations;
	}

	constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

	auto order = [&] {
		std::vector<std::size_t> idx(dim + 1);
		std::iota(idx.begin(), idx.end(), 0);
		std::stable_sort(idx.begin(), idx.end(),
		                 [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
		std::vector<std::vector<double>> s2(dim + 1);
		std::vector<double> f2(dim + 1);
		for (std::size_t i = 0; i <= dim; ++i) {
			s2[i] = simplex[idx[i]];
			f2[i] = fvals[idx[i]];
		}
		simplex.swap(s2);
		fvals.swap(f2);
	};

	while (result.evaluations < max_evals) {
		order();

		// Convergence: small function spread and small simplex diameter.
		const double f_spread = std::abs(fvals[dim] - fvals[0]);
		double x_spread = 0.0;
		for (std::size_t i = 0; i < dim; ++i) {
			x_spread = std::max(x_spread, std::abs(simplex[dim][i] - simplex[0][i]));
		}
		if (f_spread <= opts.f_tolerance * (1.0 + std::abs(fvals[0])) &&
		    x_spread <= opts.x_tolerance * (1.0 + x_spread_scale(simplex[0]))) {
			result.converged = true;
			break;
		}

		std::vector<double> centroid(dim, 0.0);
		for (std::size_t i = 0; i < dim; ++i) {
			for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
		}
		for (double& c : centroid) c /= static_cast<double>(dim);

		auto blend = [&](double coef) {
			std::vector<double> p(dim);
			for (std::size_t j = 0; j < dim; ++j) {
				p[j] = centroid[j] + coef * (centroid[j] - simplex[dim][j]);
			}
			return p;
		};

		std::vector<double> reflected = blend(kReflect);
		double f_reflected = objective(reflected);
		++result.evaluations;

		if (f_reflected < fvals[0]) {
			std::vector<double> expanded = blend(kExpand);
			double f_expanded = objective(expanded);
			++result.evaluations;
			if (f_expanded < f_reflected) {
				simplex[dim] = std::move(expanded);
				fvals[dim] = f_expanded;
			} else {
				simplex[dim] = std::move(reflected);
				fvals[dim] = f_reflected;
			}
		} else if (f_reflected < fvals[dim - 1]) {
			simplex[dim] = std::move(reflected);
			fvals[dim] = f_reflected;
		} else {
			const bool outside = f_reflected < fvals[dim];
			std::vector<double> contracted = blend(outside ? kContract : -kContract);
			double f_contracted = objective(contracted);
			++result.evaluations;
			if (f_contracted < std::min(f_reflected, fvals[dim])) {
				simplex[dim] = std::move(contracted);
				fvals[dim] = f_contracted;
			} else {
				for (std::size_t i = 1; i <= dim; ++i) {
					for (std::size_t j = 0; j < dim; ++j) {
						simplex[i][j] = simplex[0][j] + kShrink * (simplex[i][j] - simplex[0][j]);
					}
					fvals[i] = objective(simplex[i]);
					++result.evaluations;
				}
			}
		}
	}

	order();
	result.x = simplex[0];
	result.f = fvals[0];
	return result;
}

} // namespace detail

/// Derivative-free simplex minimization. The evaluation budget is
/// max_evaluations_per_dim * dim, split across the initial run and restarts.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                    const std::vector<double>& start,
                                    const NelderMeadOptions& opts = {}) {
	if (start.empty()) {
		NelderMeadResult r;
		r.x = start;
		r.f = objective(start);
		r.evaluations = 1;
		r.converged = true;
		return r;
	}
	const std::size_t budget = opts.max_evaluations_per_dim * start.size();
	NelderMeadResult best = detail::nelder_mead_once(objective, start, opts, budget);
	for (int r = 0; r < opts.restarts && best.evaluations < budget; ++r) {
		NelderMeadOptions restart_opts = opts;
		restart_opts.initial_step = opts.initial_step * 0.5;
		NelderMeadResult again = detail::nelder_mead_once(objective, best.x, restart_opts,
		                                                  budget - best.evaluations);
		again.evaluations += best.evaluations;
		if (again.f <= best.f) {
			again.converged = again.converged || best.converged;
			best = std::move(again);
		} else {
			best.evaluations = again.evaluations;
		}
	}
	return best;
}

} // namespace loadcast::opt
