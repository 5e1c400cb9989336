#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "loadcast/models/forecaster.hpp"
#include "loadcast/models/ses.hpp"
#include "loadcast/opt/nelder_mead.hpp"

namespace loadcast::models {

struct ArimaOrder {
	int p = 0;
	int d = 0;
	int q = 0;

	void validate() const {
		if (p < 0 || q < 0) throw Error("ArimaOrder: p and q must be non-negative");
		if (d != 0 && d != 1) throw Error("ArimaOrder: d must be 0 or 1");
	}
};

struct SarimaOrder {
	ArimaOrder base;
	int P = 0;
	int D = 0;
	int Q = 0;
	int m = 1; // seasonal period in observations

	void validate() const {
		base.validate();
		if (P < 0 || Q < 0) throw Error("SarimaOrder: P and Q must be non-negative");
		if (D != 0 && D != 1) throw Error("SarimaOrder: D must be 0 or 1");
		if (m < 1) throw Error("SarimaOrder: seasonal period must be positive");
		if ((P > 0 || D > 0 || Q > 0) && m < 2) {
			throw Error("SarimaOrder: seasonal terms require a period of at least 2");
		}
	}

	bool seasonal() const { return P > 0 || D > 0 || Q > 0; }
	int parameter_count() const { return base.p + base.q + P + Q; }
};

namespace detail {

/// True when 1 - c_1 z - ... - c_k z^k has all roots strictly outside the
/// unit circle (Schur-Cohn / inverse Levinson-Durbin recursion).
inline bool roots_outside_unit_circle(std::vector<double> coeffs) {
	while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
	for (std::size_t k = coeffs.size(); k > 0; --k) {
		const double reflection = coeffs[k - 1];
		if (std::abs(reflection) >= 1.0 - 1e-9) return false;
		const double denom = 1.0 - reflection * reflection;
		std::vector<double> reduced(k - 1);
		for (std::size_t i = 0; i + 1 < k; ++i) {
			reduced[i] = (coeffs[i] + reflection * coeffs[k - 2 - i]) / denom;
		}
		coeffs = std::move(reduced);
	}
	return true;
}

/// Multiply (1 +- sum c_i B^i) with (1 +- sum s_j B^(j*m)); `sign` is -1 for
/// AR polynomials and +1 for MA polynomials. Returns dense coefficients with
/// index = lag and [0] = 1.
inline std::vector<double> expand_product_poly(const std::vector<double>& plain,
                                               const std::vector<double>& seasonal,
                                               int m, double sign) {
	std::vector<double> a(plain.size() + 1, 0.0);
	a[0] = 1.0;
	for (std::size_t i = 0; i < plain.size(); ++i) a[i + 1] = sign * plain[i];
	std::vector<double> b(seasonal.size() * static_cast<std::size_t>(m) + 1, 0.0);
	b[0] = 1.0;
	for (std::size_t j = 0; j < seasonal.size(); ++j) {
		b[(j + 1) * static_cast<std::size_t>(m)] = sign * seasonal[j];
	}
	std::vector<double> out(a.size() + b.size() - 1, 0.0);
	for (std::size_t i = 0; i < a.size(); ++i) {
		if (a[i] == 0.0) continue;
		for (std::size_t j = 0; j < b.size(); ++j) {
			if (b[j] == 0.0) continue;
			out[i + j] += a[i] * b[j];
		}
	}
	return out;
}

struct SparsePoly {
	std::vector<std::size_t> lags;   // lags >= 1 with non-zero coefficient
	std::vector<double> coefficients;

	static SparsePoly from_dense(const std::vector<double>& dense) {
		SparsePoly s;
		for (std::size_t i = 1; i < dense.size(); ++i) {
			if (dense[i] != 0.0) {
				s.lags.push_back(i);
				s.coefficients.push_back(dense[i]);
			}
		}
		return s;
	}
};

} // namespace detail

/// Seasonal ARIMA estimated by conditional sum of squares.
///
/// The series is seasonally differenced D times at lag m, then ordinarily
/// differenced d times. The multiplicative seasonal ARMA on the result is
/// estimated by minimizing the conditional sum of squared residuals with a
/// derivative-free simplex search; the residual recursion conditions on the
/// first p + P*m observations and zero-initializes pre-sample residuals.
/// A mean term is included only for undifferenced models (d + D = 0), which
/// makes ARIMA(0,1,0) the plain random walk.
class ArimaForecaster final : public Forecaster {
public:
	explicit ArimaForecaster(SarimaOrder order, std::string label = "")
	    : order_(order), label_(std::move(label)) {
		order_.validate();
		if (label_.empty()) label_ = order_.seasonal() ? "sarima" : "arima";
	}

	explicit ArimaForecaster(ArimaOrder order)
	    : ArimaForecaster(SarimaOrder{order, 0, 0, 0, 1}, "arima") {}

	std::string method() const override { return label_; }

	void fit(const UniformSeries& train) override {
		const int min_len = order_.seasonal()
		                        ? 3 * order_.m
		                        : order_.base.p + order_.base.q + order_.base.d + 11;
		if (static_cast<int>(train.size()) < min_len) {
			throw InsufficientDataError(label_ + ": training series too short for this order");
		}
		if (order_.m * std::max({order_.P, order_.Q, order_.D}) >= static_cast<int>(train.size())) {
			throw InsufficientDataError(label_ + ": seasonal order exceeds the sample");
		}

		history_ = train;
		rebuild_differences();
		const std::size_t t0 = warmup();
		if (diff_top().size() <= t0 + 10) {
			throw InsufficientDataError(label_ + ": too few observations after differencing");
		}

		include_mean_ = (order_.base.d + order_.D) == 0;
		const int dim = order_.parameter_count() + (include_mean_ ? 1 : 0);

		if (dim == 0) {
			mean_ = 0.0;
			ar_.clear(); ma_.clear(); sar_.clear(); sma_.clear();
			finalize_fit(css(pack_parameters()));
			return;
		}

		std::vector<double> start(static_cast<std::size_t>(dim), 0.0);
		if (include_mean_) start[0] = mean_of(diff_top());

		opt::NelderMeadOptions options;
		options.max_evaluations_per_dim = 500;
		options.restarts = 1;
		const auto outcome = opt::nelder_mead(
		    [this](const std::vector<double>& params) { return css_objective(params); }, start,
		    options);
		if (!outcome.converged) {
			throw FitFailedError(label_ + ": simplex search did not converge");
		}
		unpack_parameters(outcome.x);
		if (!admissible()) {
			throw FitFailedError(label_ + ": optimum is not stationary/invertible");
		}
		finalize_fit(outcome.f);
	}

	std::vector<double> predict(int horizon) const override {
		require_fitted();
		require_horizon(horizon);
		const auto& centered = centered_;
		const std::size_t n = centered.size();
		const std::size_t t0 = warmup();

		// ARMA recursion on the differenced series with future shocks at 0.
		std::vector<double> future(static_cast<std::size_t>(horizon));
		for (int s = 1; s <= horizon; ++s) {
			double value = 0.0;
			for (std::size_t k = 0; k < ar_poly_.lags.size(); ++k) {
				const std::ptrdiff_t idx =
				    static_cast<std::ptrdiff_t>(n) + s - 1 - static_cast<std::ptrdiff_t>(ar_poly_.lags[k]);
				double lagged = 0.0;
				if (idx >= static_cast<std::ptrdiff_t>(n)) {
					lagged = future[static_cast<std::size_t>(idx) - n];
				} else if (idx >= 0) {
					lagged = centered[static_cast<std::size_t>(idx)];
				}
				value -= ar_poly_.coefficients[k] * lagged;
			}
			for (std::size_t k = 0; k < ma_poly_.lags.size(); ++k) {
				const std::ptrdiff_t idx =
				    static_cast<std::ptrdiff_t>(n) + s - 1 - static_cast<std::ptrdiff_t>(ma_poly_.lags[k]);
				if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n) &&
				    static_cast<std::size_t>(idx) >= t0) {
					value += ma_poly_.coefficients[k] * residuals_[static_cast<std::size_t>(idx)];
				}
			}
			future[static_cast<std::size_t>(s - 1)] = value;
		}
		for (double& v : future) v += mean_;

		// Undo ordinary differencing, then seasonal differencing.
		std::size_t level = diff_chain_.size() - 1;
		for (int k = 0; k < order_.base.d; ++k) {
			--level;
			future = integrate(diff_chain_[level], 1, future);
		}
		for (int k = 0; k < order_.D; ++k) {
			--level;
			future = integrate(diff_chain_[level], static_cast<std::size_t>(order_.m), future);
		}
		check_finite(future, label_);
		return future;
	}

	void update(std::span<const double> new_observations) override {
		require_fitted();
		for (double y : new_observations) {
			history_.values.push_back(y);
			extend_differences();
		}
	}

	bool fitted() const override { return fitted_; }

	const SarimaOrder& order() const { return order_; }
	double mean_term() const { return mean_; }
	const std::vector<double>& ar() const { return ar_; }
	const std::vector<double>& ma() const { return ma_; }
	const std::vector<double>& seasonal_ar() const { return sar_; }
	const std::vector<double>& seasonal_ma() const { return sma_; }
	double sigma2() const { return sigma2_; }
	double loglik() const { return loglik_; }
	double aic() const { return aic_; }

	nlohmann::json state() const override {
		return {{"method", label_},
		        {"order", {{"p", order_.base.p}, {"d", order_.base.d}, {"q", order_.base.q},
		                   {"P", order_.P}, {"D", order_.D}, {"Q", order_.Q}, {"m", order_.m}}},
		        {"intercept", mean_},
		        {"ar", ar_},
		        {"ma", ma_},
		        {"seasonal_ar", sar_},
		        {"seasonal_ma", sma_},
		        {"sigma2", sigma2_},
		        {"loglik", loglik_},
		        {"aic", aic_}};
	}

	/// Build a forecaster with known coefficients and run the filter over the
	/// given history. Used by oracle tests and refit-free updates.
	static ArimaForecaster with_coefficients(const SarimaOrder& order, double mean,
	                                         std::vector<double> ar, std::vector<double> ma,
	                                         std::vector<double> sar, std::vector<double> sma,
	                                         const UniformSeries& history) {
		ArimaForecaster model(order);
		if (static_cast<int>(ar.size()) != order.base.p || static_cast<int>(ma.size()) != order.base.q ||
		    static_cast<int>(sar.size()) != order.P || static_cast<int>(sma.size()) != order.Q) {
			throw Error("with_coefficients: coefficient counts do not match the order");
		}
		model.history_ = history;
		model.include_mean_ = (order.base.d + order.D) == 0;
		model.mean_ = mean;
		model.ar_ = std::move(ar);
		model.ma_ = std::move(ma);
		model.sar_ = std::move(sar);
		model.sma_ = std::move(sma);
		if (!model.admissible()) {
			throw FitFailedError("with_coefficients: coefficients are not stationary/invertible");
		}
		model.rebuild_differences();
		model.finalize_fit(model.css(model.pack_parameters()));
		return model;
	}

private:
	std::size_t warmup() const {
		return static_cast<std::size_t>(order_.base.p + order_.P * order_.m);
	}

	const std::vector<double>& diff_top() const { return diff_chain_.back(); }

	void rebuild_differences() {
		diff_chain_.clear();
		diff_chain_.push_back(history_.values);
		for (int k = 0; k < order_.D; ++k) {
			diff_chain_.push_back(difference(diff_chain_.back(), static_cast<std::size_t>(order_.m)));
		}
		for (int k = 0; k < order_.base.d; ++k) {
			diff_chain_.push_back(difference(diff_chain_.back(), 1));
		}
	}

	static std::vector<double> difference(const std::vector<double>& x, std::size_t lag) {
		if (x.size() <= lag) {
			throw InsufficientDataError("arima: series too short to difference");
		}
		std::vector<double> out(x.size() - lag);
		for (std::size_t i = lag; i < x.size(); ++i) out[i - lag] = x[i] - x[i - lag];
		return out;
	}

	static std::vector<double> integrate(const std::vector<double>& base, std::size_t lag,
	                                     const std::vector<double>& diffs) {
		std::vector<double> out(diffs.size());
		for (std::size_t s = 0; s < diffs.size(); ++s) {
			const std::size_t idx = base.size() + s - lag;
			const double previous = idx < base.size() ? base[idx] : out[idx - base.size()];
			out[s] = previous + diffs[s];
		}
		return out;
	}

	std::vector<double> pack_parameters() const {
		std::vector<double> packed;
		if (include_mean_) packed.push_back(mean_);
		packed.insert(packed.end(), ar_.begin(), ar_.end());
		packed.insert(packed.end(), ma_.begin(), ma_.end());
		packed.insert(packed.end(), sar_.begin(), sar_.end());
		packed.insert(packed.end(), sma_.begin(), sma_.end());
		return packed;
	}

	void unpack_parameters(const std::vector<double>& packed) {
		std::size_t i = 0;
		mean_ = include_mean_ ? packed[i++] : 0.0;
		auto take = [&](int count) {
			std::vector<double> part(packed.begin() + static_cast<std::ptrdiff_t>(i),
			                         packed.begin() + static_cast<std::ptrdiff_t>(i) + count);
			i += static_cast<std::size_t>(count);
			return part;
		};
		ar_ = take(order_.base.p);
		ma_ = take(order_.base.q);
		sar_ = take(order_.P);
		sma_ = take(order_.Q);
	}

	bool admissible() const {
		return detail::roots_outside_unit_circle(ar_) && detail::roots_outside_unit_circle(sar_) &&
		       invertible(ma_) && invertible(sma_);
	}

	static bool invertible(const std::vector<double>& theta) {
		std::vector<double> negated(theta.size());
		for (std::size_t i = 0; i < theta.size(); ++i) negated[i] = -theta[i];
		return detail::roots_outside_unit_circle(negated);
	}

	void refresh_polynomials() {
		ar_poly_ = detail::SparsePoly::from_dense(
		    detail::expand_product_poly(ar_, sar_, order_.m, -1.0));
		ma_poly_ = detail::SparsePoly::from_dense(
		    detail::expand_product_poly(ma_, sma_, order_.m, +1.0));
	}

	/// Conditional sum of squares for the current coefficients; refreshes the
	/// centered series and residuals as a side effect.
	double css(const std::vector<double>& packed) {
		unpack_parameters(packed);
		refresh_polynomials();
		const auto& w = diff_top();
		const std::size_t n = w.size();
		const std::size_t t0 = warmup();
		centered_.resize(n);
		for (std::size_t t = 0; t < n; ++t) centered_[t] = w[t] - mean_;
		residuals_.assign(n, 0.0);
		double ss = 0.0;
		for (std::size_t t = t0; t < n; ++t) {
			double eps = centered_[t];
			for (std::size_t k = 0; k < ar_poly_.lags.size(); ++k) {
				eps += ar_poly_.coefficients[k] * centered_[t - ar_poly_.lags[k]];
			}
			for (std::size_t k = 0; k < ma_poly_.lags.size(); ++k) {
				const std::size_t lag = ma_poly_.lags[k];
				if (t >= t0 + lag) eps -= ma_poly_.coefficients[k] * residuals_[t - lag];
			}
			residuals_[t] = eps;
			ss += eps * eps;
		}
		return ss;
	}

	double css_objective(const std::vector<double>& packed) {
		unpack_parameters(packed);
		if (!admissible()) {
			double spill = 0.0;
			for (double c : packed) spill += std::abs(c);
			return 1e12 * (1.0 + spill);
		}
		return css(packed);
	}

	void finalize_fit(double sum_squares) {
		refresh_polynomials();
		css(pack_parameters()); // leave residual state consistent with the final coefficients
		const std::size_t n_eff = diff_top().size() - warmup();
		sigma2_ = sum_squares / static_cast<double>(n_eff);
		const double k = static_cast<double>(order_.parameter_count()) +
		                 (include_mean_ ? 1.0 : 0.0) + 1.0; // + sigma^2
		if (sum_squares <= 0.0) {
			loglik_ = std::numeric_limits<double>::infinity();
			aic_ = -std::numeric_limits<double>::infinity();
		} else {
			loglik_ = gaussian_loglik(sum_squares, n_eff);
			aic_ = 2.0 * k - 2.0 * loglik_;
		}
		fitted_ = true;
	}

	/// Extend the differencing chain and residuals after one appended value.
	void extend_differences() {
		std::size_t level = 0;
		diff_chain_[0].push_back(history_.values.back());
		for (int k = 0; k < order_.D; ++k) {
			const auto& source = diff_chain_[level];
			const std::size_t lag = static_cast<std::size_t>(order_.m);
			++level;
			if (source.size() > lag) {
				diff_chain_[level].push_back(source.back() - source[source.size() - 1 - lag]);
			} else {
				return;
			}
		}
		for (int k = 0; k < order_.base.d; ++k) {
			const auto& source = diff_chain_[level];
			++level;
			if (source.size() > 1) {
				diff_chain_[level].push_back(source.back() - source[source.size() - 2]);
			} else {
				return;
			}
		}
		if (diff_top().size() == centered_.size()) return; // no new differenced value yet
		const std::size_t t = diff_top().size() - 1;
		centered_.push_back(diff_top().back() - mean_);
		const std::size_t t0 = warmup();
		double eps = 0.0;
		if (t >= t0) {
			eps = centered_[t];
			for (std::size_t k = 0; k < ar_poly_.lags.size(); ++k) {
				eps += ar_poly_.coefficients[k] * centered_[t - ar_poly_.lags[k]];
			}
			for (std::size_t k = 0; k < ma_poly_.lags.size(); ++k) {
				const std::size_t lag = ma_poly_.lags[k];
				if (t >= t0 + lag) eps -= ma_poly_.coefficients[k] * residuals_[t - lag];
			}
		}
		residuals_.push_back(eps);
	}

	SarimaOrder order_;
	std::string label_;
	bool include_mean_ = true;

	UniformSeries history_;
	std::vector<std::vector<double>> diff_chain_;
	std::vector<double> centered_;  // differenced series minus the mean term
	std::vector<double> residuals_; // zero before the conditioning warm-up

	double mean_ = 0.0;
	std::vector<double> ar_, ma_, sar_, sma_;
	detail::SparsePoly ar_poly_, ma_poly_;

	double sigma2_ = 0.0;
	double loglik_ = 0.0;
	double aic_ = std::numeric_limits<double>::quiet_NaN();
	bool fitted_ = false;
};

inline ArimaForecaster fit_arima(const UniformSeries& train, const ArimaOrder& order) {
	ArimaForecaster model(order);
	model.fit(train);
	return model;
}

inline ArimaForecaster fit_sarima(const UniformSeries& train, const SarimaOrder& order) {
	ArimaForecaster model(order, "sarima");
	model.fit(train);
	return model;
}

} // namespace loadcast::models
