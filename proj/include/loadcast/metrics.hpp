#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "loadcast/error.hpp"

namespace loadcast {

/// A pair of equally long actual/predicted sequences to be scored.
struct ForecastEval {
	std::vector<double> actual;
	std::vector<double> predicted;

	ForecastEval() = default;
	ForecastEval(std::vector<double> a, std::vector<double> p)
	    : actual(std::move(a)), predicted(std::move(p)) {
		validate();
	}

	void validate() const {
		if (actual.empty()) throw DataError("ForecastEval: need at least one point");
		if (actual.size() != predicted.size()) {
			throw DataError("ForecastEval: actual and predicted lengths differ");
		}
		for (std::size_t i = 0; i < actual.size(); ++i) {
			if (!std::isfinite(actual[i]) || !std::isfinite(predicted[i])) {
				throw DataError("ForecastEval: entries must be finite");
			}
		}
	}

	std::size_t size() const { return actual.size(); }

	void append(double a, double p) {
		actual.push_back(a);
		predicted.push_back(p);
	}
};

struct SmapeDiagnostics {
	std::size_t zero_zero_terms = 0; // terms with Y_t = Yhat_t = 0, scored as 0
};

/// Symmetric mean absolute percentage error in [0, 100]:
/// (100/n) * sum |Y - Yhat| / (|Y| + |Yhat|). A term where both values are
/// zero contributes 0 and is counted in the diagnostics.
inline double smape(const ForecastEval& eval, SmapeDiagnostics* diagnostics = nullptr) {
	eval.validate();
	const std::size_t n = eval.size();
	double sum = 0.0;
	for (std::size_t t = 0; t < n; ++t) {
		const double denom = std::abs(eval.actual[t]) + std::abs(eval.predicted[t]);
		if (denom == 0.0) {
			if (diagnostics) ++diagnostics->zero_zero_terms;
			continue;
		}
		sum += std::abs(eval.actual[t] - eval.predicted[t]) / denom;
	}
	return 100.0 * sum / static_cast<double>(n);
}

/// Root mean square error: sqrt((1/n) * sum (Y - Yhat)^2).
inline double rmse(const ForecastEval& eval) {
	eval.validate();
	double ss = 0.0;
	for (std::size_t t = 0; t < eval.size(); ++t) {
		const double r = eval.actual[t] - eval.predicted[t];
		ss += r * r;
	}
	return std::sqrt(ss / static_cast<double>(eval.size()));
}

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Subgradient of SMAPE with respect to one predicted value, excluding the
/// 100/n scaling. Zero at Yhat = Y; zero for a 0/0 term.
inline double smape_term_subgradient(double actual, double predicted) {
	const double denom = std::abs(actual) + std::abs(predicted);
	if (denom == 0.0) return 0.0;
	if (predicted == actual) return 0.0;
	return sign_of(predicted - actual) / denom -
	       std::abs(actual - predicted) * sign_of(predicted) / (denom * denom);
}

/// d SMAPE / d Yhat_t for every t, including the 100/n scaling.
inline std::vector<double> smape_gradient(std::span<const double> actual,
                                          std::span<const double> predicted) {
	if (actual.size() != predicted.size() || actual.empty()) {
		throw DataError("smape_gradient: sequences must be equally long and non-empty");
	}
	const double scale = 100.0 / static_cast<double>(actual.size());
	std::vector<double> grad(actual.size());
	for (std::size_t t = 0; t < actual.size(); ++t) {
		grad[t] = scale * smape_term_subgradient(actual[t], predicted[t]);
	}
	return grad;
}

} // namespace loadcast
