#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "loadcast/models/neural.hpp"
#include "loadcast/nn/cnn.hpp"
#include "loadcast/nn/gru.hpp"
#include "loadcast/nn/train.hpp"
#include "loadcast/nn/window.hpp"

using namespace loadcast;
using namespace loadcast::nn;
using Catch::Approx;
using tests::make_series;

TEST_CASE("window_dataset produces the expected pair counts", "[nn][window]") {
	Normalization identity{0.0, 1.0};
	std::vector<double> v(10);
	for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
	const auto series = make_series(v);

	const auto seven = window_dataset(series, 3, 1, identity);
	REQUIRE(seven.count() == 7);
	REQUIRE(seven.input_row(0) == std::vector<double>{0, 1, 2});
	REQUIRE(seven.target_row(0) == std::vector<double>{3});
	REQUIRE(seven.input_row(6) == std::vector<double>{6, 7, 8});

	const auto one = window_dataset(series, 8, 2, identity);
	REQUIRE(one.count() == 1);

	std::vector<double> long_series(40);
	const auto horizon12 = window_dataset(make_series(long_series), 24, 12, identity);
	REQUIRE(horizon12.horizon == 12);
	REQUIRE(horizon12.target_row(0).size() == 12);

	REQUIRE_THROWS_AS(window_dataset(series, 8, 3, identity), InsufficientDataError);
}

TEST_CASE("gru forward matches hand-executed gate equations", "[nn][gru][oracle]") {
	GruConfig config{2, 1, 1, 0.0, 1};
	GruNetwork net(config);
	auto& layer = net.layer(0);
	layer.w_z.data = {0.5};
	layer.u_z.data = {-0.3};
	layer.b_z.data = {0.1};
	layer.w_r.data = {0.8};
	layer.u_r.data = {0.2};
	layer.b_r.data = {-0.1};
	layer.w_h.data = {1.2};
	layer.u_h.data = {0.7};
	layer.b_h.data = {0.05};
	net.head_weights().data = {1.0};
	net.head_bias().data = {0.0};

	const double x1 = 0.4, x2 = -0.6;
	auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
	double h = 0.0;
	for (double x : {x1, x2}) {
		const double z = sigmoid(0.5 * x - 0.3 * h + 0.1);
		const double r = sigmoid(0.8 * x + 0.2 * h - 0.1);
		const double candidate = std::tanh(1.2 * x + 0.7 * (r * h) + 0.05);
		h = (1.0 - z) * candidate + z * h;
	}

	Graph g;
	const NodeId input = g.constant(1, 2, {x1, x2});
	const NodeId pred = net.build_forward(g, input, nullptr);
	REQUIRE(g.values(pred)[0] == Approx(h).margin(1e-9));
}

TEST_CASE("zero weights with a head bias give a constant prediction", "[nn][gru][cnn]") {
	Normalization norm{100.0, 10.0};
	{
		GruNetwork net(GruConfig{4, 3, 2, 0.0, 2});
		net.head_bias().data = {0.5, 0.5};
		models::NeuralForecaster model(std::make_unique<GruNetwork>(net), norm, 0);
		model.set_context({100, 101, 102, 103});
		const auto out = model.predict(2);
		REQUIRE(out[0] == Approx(105.0).margin(1e-12)); // 100 + 10 * 0.5
		REQUIRE(out[1] == Approx(105.0).margin(1e-12));
	}
	{
		CnnNetwork net(CnnConfig{6, {2}, 3, 0.0, 2});
		net.head_bias().data = {-0.25, -0.25};
		models::NeuralForecaster model(std::make_unique<CnnNetwork>(net), norm, 0);
		model.set_context({100, 101, 102, 103, 104, 105});
		const auto out = model.predict(2);
		REQUIRE(out[0] == Approx(97.5).margin(1e-12));
	}
}

TEST_CASE("cnn with a unit-center kernel and selector head reproduces aligned inputs",
          "[nn][cnn][oracle]") {
	const int len = 6, horizon = 3;
	CnnNetwork net(CnnConfig{len, {1}, 3, 0.0, horizon});
	net.layer(0).weights.data = {0.0, 1.0, 0.0};
	net.layer(0).bias.data = {0.0};
	// Head selects the last `horizon` positions of the conv output.
	for (int j = 0; j < horizon; ++j) {
		net.head_weights().data[static_cast<std::size_t>((len - horizon + j) * horizon + j)] = 1.0;
	}
	const std::vector<double> x = {0.3, 0.9, 0.1, 0.7, 0.5, 0.2}; // positive: ReLU transparent
	Graph g;
	const NodeId pred = net.build_forward(g, g.constant(1, 6, x), nullptr);
	const auto& v = g.values(pred);
	REQUIRE(v[0] == Approx(0.7).margin(1e-12));
	REQUIRE(v[1] == Approx(0.5).margin(1e-12));
	REQUIRE(v[2] == Approx(0.2).margin(1e-12));
}

TEST_CASE("dropout rate zero makes training and evaluation passes identical", "[nn][dropout]") {
	GruNetwork net(GruConfig{6, 4, 2, 0.0, 2});
	Rng init(7);
	net.init_weights(init);
	std::vector<double> x(6);
	Rng data_rng(8);
	for (double& v : x) v = data_rng.uniform(-1, 1);

	Graph eval_graph;
	const auto eval_out = eval_graph.values(
	    net.build_forward(eval_graph, eval_graph.constant(1, 6, x), nullptr));
	Rng dropout_rng(9);
	Graph train_graph;
	const auto train_out = train_graph.values(
	    net.build_forward(train_graph, train_graph.constant(1, 6, x), &dropout_rng));
	REQUIRE(eval_out == train_out);
}

TEST_CASE("evaluation-mode forward ignores the dropout rate", "[nn][dropout]") {
	std::vector<double> x = {0.1, -0.4, 0.9, 0.2, 0.6, -0.8};
	std::vector<double> with_dropout, without_dropout;
	for (double rate : {0.0, 0.4}) {
		GruNetwork net(GruConfig{6, 4, 2, rate, 2});
		Rng init(7);
		net.init_weights(init);
		Graph g;
		const auto out = g.values(net.build_forward(g, g.constant(1, 6, x), nullptr));
		(rate == 0.0 ? without_dropout : with_dropout) = out;
	}
	REQUIRE(with_dropout == without_dropout);
}

namespace {

double network_loss(Network& net, const std::vector<double>& inputs, std::size_t batch,
                    std::size_t width, const std::vector<double>& targets,
                    const Normalization& norm) {
	Graph g;
	const NodeId pred = net.build_forward(g, g.constant(batch, width, inputs), nullptr);
	return g.value(g.smape_loss(pred, targets, norm));
}

void check_network_gradients(Network& net, std::size_t batch, std::uint64_t seed) {
	const std::size_t width = static_cast<std::size_t>(net.input_len());
	const std::size_t horizon = static_cast<std::size_t>(net.horizon());
	Normalization norm{5.0, 2.0};
	Rng rng(seed);
	std::vector<double> inputs(batch * width);
	for (double& v : inputs) v = rng.uniform(-1.0, 1.0);
	std::vector<double> targets(batch * horizon);
	{
		Graph g;
		const NodeId pred = net.build_forward(g, g.constant(batch, width, inputs), nullptr);
		const auto& v = g.values(pred);
		for (std::size_t i = 0; i < targets.size(); ++i) {
			targets[i] = v[i] + (i % 2 == 0 ? 0.6 : -0.6); // away from kinks
		}
	}

	Graph g;
	const NodeId pred = net.build_forward(g, g.constant(batch, width, inputs), nullptr);
	const NodeId loss = g.smape_loss(pred, targets, norm);
	for (Tensor* t : net.parameters()) t->zero_grad();
	g.backward(loss);

	for (Tensor* tensor : net.parameters()) {
		for (std::size_t i = 0; i < tensor->data.size(); ++i) {
			const double h = 1e-5 * std::max(1.0, std::abs(tensor->data[i]));
			const double original = tensor->data[i];
			tensor->data[i] = original + h;
			const double up = network_loss(net, inputs, batch, width, targets, norm);
			tensor->data[i] = original - h;
			const double down = network_loss(net, inputs, batch, width, targets, norm);
			tensor->data[i] = original;
			const double fd = (up - down) / (2.0 * h);
			const double ad = tensor->grad[i];
			REQUIRE(std::abs(ad - fd) <= 1e-4 * std::max(std::abs(ad), std::abs(fd)) + 1e-6);
		}
	}
}

} // namespace

TEST_CASE("gru gradients match finite differences on small configs", "[nn][gru][fd]") {
	for (std::uint64_t seed : {1u, 2u}) {
		GruNetwork net(GruConfig{4, 3, 2, 0.0, 2});
		Rng init(seed);
		net.init_weights(init);
		check_network_gradients(net, 3, 100 + seed);
	}
}

TEST_CASE("cnn gradients match finite differences on small configs", "[nn][cnn][fd]") {
	for (std::uint64_t seed : {1u, 2u}) {
		CnnNetwork net(CnnConfig{6, {2, 3}, 3, 0.0, 2});
		Rng init(seed);
		net.init_weights(init);
		check_network_gradients(net, 2, 200 + seed);
	}
}

TEST_CASE("training converges on a constant series", "[nn][train]") {
	const auto series = make_series(std::vector<double>(60, 50.0));
	const Normalization norm = fit_normalization(series.values);
	const auto windows = window_dataset(series, 6, 2, norm);

	GruNetwork net(GruConfig{6, 8, 1, 0.0, 2});
	Rng init(3);
	net.init_weights(init);
	TrainConfig tc;
	tc.seed = 3;
	tc.normalization = norm;
	tc.max_epochs = 50;
	tc.early_stop_patience = 50;
	tc.learning_rate = 5e-3;
	const auto result = train_network(net, windows, windows, tc);
	REQUIRE(result.best_val_smape < 0.1);
}

TEST_CASE("training loss is non-increasing on a constant series", "[nn][train][property]") {
	const auto series = make_series(std::vector<double>(50, 20.0));
	const Normalization norm = fit_normalization(series.values);
	const auto windows = window_dataset(series, 5, 1, norm);

	CnnNetwork net(CnnConfig{5, {4}, 3, 0.0, 1});
	Rng init(11);
	net.init_weights(init);
	TrainConfig tc;
	tc.seed = 11;
	tc.normalization = norm;
	tc.max_epochs = 15;
	tc.early_stop_patience = 15;
	tc.learning_rate = 1e-4;
	tc.batch_size = windows.count() > 0 ? static_cast<int>(windows.count()) : 1;
	const auto result = train_network(net, windows, windows, tc);
	for (std::size_t e = 1; e < result.train_loss.size(); ++e) {
		REQUIRE(result.train_loss[e] <= result.train_loss[e - 1] + 1e-9);
	}
}

TEST_CASE("patience zero stops one epoch after the first non-improvement", "[nn][train]") {
	const auto series = tests::daily_sinusoid(80, 3600, 100.0, 5.0);
	const Normalization norm = fit_normalization(series.values);
	const auto windows = window_dataset(series, 8, 2, norm);

	GruNetwork net(GruConfig{8, 4, 1, 0.0, 2});
	Rng init(5);
	net.init_weights(init);
	TrainConfig tc;
	tc.seed = 5;
	tc.normalization = norm;
	tc.max_epochs = 60;
	tc.early_stop_patience = 0;
	const auto result = train_network(net, windows, windows, tc);
	if (result.epochs_run < tc.max_epochs) {
		REQUIRE(result.epochs_run == result.best_epoch + 1);
	}
}

TEST_CASE("training is deterministic for a fixed seed", "[nn][train][determinism]") {
	const auto series = tests::daily_sinusoid(24 * 5, 3600, 200.0, 30.0);
	const Normalization norm = fit_normalization(series.values);
	const auto windows = window_dataset(series, 12, 4, norm);

	auto run = [&] {
		CnnNetwork net(CnnConfig{12, {4}, 3, 0.1, 4});
		Rng init(21);
		net.init_weights(init);
		TrainConfig tc;
		tc.seed = 21;
		tc.normalization = norm;
		tc.max_epochs = 5;
		tc.early_stop_patience = 5;
		train_network(net, windows, windows, tc);
		return net.snapshot();
	};
	const auto a = run();
	const auto b = run();
	REQUIRE(a == b);
}

TEST_CASE("neural forecaster predictions are pure and context-checked", "[nn][forecaster]") {
	GruNetwork net(GruConfig{4, 3, 1, 0.0, 2});
	Rng init(13);
	net.init_weights(init);
	models::NeuralForecaster model(std::make_unique<GruNetwork>(net), Normalization{10, 2}, 13);
	model.set_context({9.0, 10.0, 11.0, 10.5});

	const auto a = model.predict(2);
	const auto b = model.predict(2);
	REQUIRE(a == b);
	REQUIRE(a.size() == 2);

	models::NeuralForecaster short_context(std::make_unique<GruNetwork>(net), Normalization{10, 2}, 13);
	short_context.set_context({1.0, 2.0});
	REQUIRE_THROWS_AS(short_context.predict(1), InsufficientDataError);
}

TEST_CASE("network artifact round trip preserves predictions", "[nn][artifact]") {
	CnnNetwork net(CnnConfig{8, {3, 2}, 3, 0.1, 2});
	Rng init(31);
	net.init_weights(init);
	models::NeuralForecaster model(std::make_unique<CnnNetwork>(net), Normalization{50, 5}, 31, 1.25);
	model.set_context({48, 49, 50, 51, 52, 51, 50, 49});

	const auto artifact = model.artifact();
	auto loaded = models::NeuralForecaster::from_artifact(artifact);
	loaded.set_context({48, 49, 50, 51, 52, 51, 50, 49});

	REQUIRE(loaded.predict(2) == model.predict(2));
	REQUIRE(loaded.normalization().mean == Approx(50.0));
}
