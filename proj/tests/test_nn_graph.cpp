#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "loadcast/nn/graph.hpp"
#include "loadcast/nn/network.hpp"
#include "loadcast/nn/window.hpp"

using namespace loadcast;
using namespace loadcast::nn;
using Catch::Approx;

TEST_CASE("affine layer gradient matches the analytic form", "[nn][graph]") {
	// y = x W + b, loss = mean((y - t)^2); dW = 2/n * x^T (y - t).
	Tensor w({2, 3}), b({1, 3});
	w.data = {0.5, -0.2, 0.1, 0.3, 0.7, -0.4};
	b.data = {0.01, -0.02, 0.03};
	const std::vector<double> x = {1.0, 2.0};
	const std::vector<double> t = {0.5, 0.5, 0.5};

	Graph g;
	const NodeId input = g.constant(1, 2, x);
	const NodeId pred = g.add(g.matmul(input, g.parameter(w)), g.parameter(b));
	const NodeId loss = g.mse_loss(pred, t);
	w.zero_grad();
	b.zero_grad();
	g.backward(loss);

	const auto& y = g.values(pred);
	for (std::size_t i = 0; i < 2; ++i) {
		for (std::size_t j = 0; j < 3; ++j) {
			const double expected = 2.0 / 3.0 * x[i] * (y[j] - t[j]);
			REQUIRE(w.grad[i * 3 + j] == Approx(expected).margin(1e-9));
		}
	}
	for (std::size_t j = 0; j < 3; ++j) {
		REQUIRE(b.grad[j] == Approx(2.0 / 3.0 * (y[j] - t[j])).margin(1e-9));
	}
}

TEST_CASE("zero-loss point has zero gradients", "[nn][graph]") {
	Tensor w({1, 2});
	w.data = {1.0, 2.0};
	Graph g;
	const NodeId input = g.constant(1, 1, {3.0});
	const NodeId pred = g.matmul(input, g.parameter(w));
	const NodeId loss = g.mse_loss(pred, {3.0, 6.0});
	REQUIRE(g.value(loss) == Approx(0.0).margin(1e-15));
	w.zero_grad();
	g.backward(loss);
	REQUIRE(w.grad[0] == Approx(0.0).margin(1e-15));
	REQUIRE(w.grad[1] == Approx(0.0).margin(1e-15));
}

TEST_CASE("conv1d computes a same-padded convolution", "[nn][graph][conv]") {
	Tensor w({1, 3}), b({1, 1});
	w.data = {1.0, 2.0, 3.0}; // out[i] = x[i-1] + 2 x[i] + 3 x[i+1]
	b.data = {0.5};
	Graph g;
	const NodeId input = g.constant(1, 4, {1.0, 2.0, 3.0, 4.0});
	const NodeId out = g.conv1d(input, g.parameter(w), g.parameter(b), 1, 1, 4, 3);
	const auto& v = g.values(out);
	REQUIRE(v[0] == Approx(0.5 + 2 * 1 + 3 * 2));
	REQUIRE(v[1] == Approx(0.5 + 1 * 1 + 2 * 2 + 3 * 3));
	REQUIRE(v[2] == Approx(0.5 + 1 * 2 + 2 * 3 + 3 * 4));
	REQUIRE(v[3] == Approx(0.5 + 1 * 3 + 2 * 4));
}

namespace {

double composed_loss(Tensor& w1, Tensor& b1, Tensor& w2,
                     const std::vector<double>& x, const std::vector<double>& t) {
	Graph g;
	const NodeId input = g.constant(2, 3, x);
	const NodeId hidden = g.tanh_(g.add(g.matmul(input, g.parameter(w1)), g.parameter(b1)));
	const NodeId gated = g.hadamard(g.sigmoid(hidden), hidden);
	const NodeId pred = g.matmul(gated, g.parameter(w2));
	return g.value(g.mse_loss(pred, t));
}

} // namespace

TEST_CASE("composed graph gradients match central finite differences", "[nn][graph][fd]") {
	Rng rng(515);
	Tensor w1({3, 4}), b1({1, 4}), w2({4, 2});
	for (Tensor* t : {&w1, &b1, &w2}) {
		for (double& v : t->data) v = rng.uniform(-0.8, 0.8);
	}
	std::vector<double> x(6), targets(4);
	for (double& v : x) v = rng.uniform(-1.0, 1.0);
	for (double& v : targets) v = rng.uniform(-1.0, 1.0);

	Graph g;
	const NodeId input = g.constant(2, 3, x);
	const NodeId hidden = g.tanh_(g.add(g.matmul(input, g.parameter(w1)), g.parameter(b1)));
	const NodeId gated = g.hadamard(g.sigmoid(hidden), hidden);
	const NodeId pred = g.matmul(gated, g.parameter(w2));
	const NodeId loss = g.mse_loss(pred, targets);
	for (Tensor* t : {&w1, &b1, &w2}) t->zero_grad();
	g.backward(loss);

	for (Tensor* tensor : {&w1, &b1, &w2}) {
		for (std::size_t i = 0; i < tensor->data.size(); ++i) {
			const double h = 1e-6 * std::max(1.0, std::abs(tensor->data[i]));
			const double original = tensor->data[i];
			tensor->data[i] = original + h;
			const double up = composed_loss(w1, b1, w2, x, targets);
			tensor->data[i] = original - h;
			const double down = composed_loss(w1, b1, w2, x, targets);
			tensor->data[i] = original;
			const double fd = (up - down) / (2.0 * h);
			REQUIRE(tensor->grad[i] == Approx(fd).epsilon(1e-5).margin(1e-9));
		}
	}
}

TEST_CASE("smape loss equals the metric on de-normalized values", "[nn][graph][loss]") {
	Normalization norm{10.0, 4.0};
	Graph g;
	// De-normalized predictions: 10 + 4*{0.5, -0.25} = {12, 9};
	// de-normalized targets: {10, 10}.
	const NodeId pred = g.constant(1, 2, {0.5, -0.25});
	const NodeId loss = g.smape_loss(pred, {0.0, 0.0}, norm);
	const double expected = 100.0 / 2.0 * (2.0 / 22.0 + 1.0 / 19.0);
	REQUIRE(g.value(loss) == Approx(expected).margin(1e-12));
}

TEST_CASE("smape loss gradient matches finite differences", "[nn][graph][loss][fd]") {
	Normalization norm{5.0, 2.0};
	Rng rng(99);
	Tensor w({3, 2});
	for (double& v : w.data) v = rng.uniform(-0.5, 0.5);
	const std::vector<double> x = {0.3, -0.2, 0.8};
	std::vector<double> targets_norm;
	{
		Graph g;
		const NodeId pred = g.matmul(g.constant(1, 3, x), g.parameter(w));
		// Put targets well away from predictions so no kink is crossed.
		for (double v : g.values(pred)) targets_norm.push_back(v + 0.7);
	}

	Graph g;
	const NodeId pred = g.matmul(g.constant(1, 3, x), g.parameter(w));
	const NodeId loss = g.smape_loss(pred, targets_norm, norm);
	w.zero_grad();
	g.backward(loss);

	for (std::size_t i = 0; i < w.data.size(); ++i) {
		const double h = 1e-6;
		const double original = w.data[i];
		auto loss_at = [&](double value) {
			w.data[i] = value;
			Graph g2;
			const NodeId p = g2.matmul(g2.constant(1, 3, x), g2.parameter(w));
			const double out = g2.value(g2.smape_loss(p, targets_norm, norm));
			w.data[i] = original;
			return out;
		};
		const double fd = (loss_at(original + h) - loss_at(original - h)) / (2.0 * h);
		REQUIRE(w.grad[i] == Approx(fd).epsilon(1e-4).margin(1e-8));
	}
}

TEST_CASE("normalization round trip is exact", "[nn][normalization]") {
	const Normalization norm = fit_normalization(std::vector<double>{3.0, 7.0, 11.0, 2.5});
	for (double x : {-4.0, 0.0, 3.3, 1e5}) {
		REQUIRE(norm.denormalize(norm.normalize(x)) == Approx(x).margin(1e-9));
	}
	const Normalization constant = fit_normalization(std::vector<double>{5.0, 5.0});
	REQUIRE(constant.std > 0.0);
}
