#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "loadcast/opt/nelder_mead.hpp"

using namespace loadcast::opt;
using Catch::Approx;

TEST_CASE("nelder-mead minimizes a shifted quadratic", "[optimizer]") {
	auto objective = [](const std::vector<double>& x) {
		double f = 0.0;
		for (std::size_t i = 0; i < x.size(); ++i) {
			const double d = x[i] - static_cast<double>(i + 1);
			f += (1.0 + static_cast<double>(i)) * d * d;
		}
		return f;
	};
	const auto result = nelder_mead(objective, std::vector<double>(5, 0.0));
	REQUIRE(result.converged);
	for (std::size_t i = 0; i < 5; ++i) {
		REQUIRE(result.x[i] == Approx(static_cast<double>(i + 1)).margin(1e-4));
	}
}

TEST_CASE("nelder-mead solves rosenbrock", "[optimizer]") {
	auto rosenbrock = [](const std::vector<double>& x) {
		const double a = 1.0 - x[0];
		const double b = x[1] - x[0] * x[0];
		return a * a + 100.0 * b * b;
	};
	const auto result = nelder_mead(rosenbrock, {-1.2, 1.0});
	REQUIRE(result.converged);
	REQUIRE(result.x[0] == Approx(1.0).margin(1e-3));
	REQUIRE(result.x[1] == Approx(1.0).margin(1e-3));
}

TEST_CASE("nelder-mead respects its evaluation budget", "[optimizer]") {
	std::size_t calls = 0;
	auto objective = [&calls](const std::vector<double>& x) {
		++calls;
		return std::abs(std::sin(x[0] * 40.0)) + 0.001 * x[0] * x[0];
	};
	NelderMeadOptions opts;
	opts.max_evaluations_per_dim = 50;
	const auto result = nelder_mead(objective, {3.0}, opts);
	REQUIRE(calls <= 50 + 4); // small overshoot from the in-flight iteration
	REQUIRE(std::isfinite(result.f));
}
