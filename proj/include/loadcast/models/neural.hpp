#pragma once

#include <memory>

#include "loadcast/models/forecaster.hpp"
#include "loadcast/nn/cnn.hpp"
#include "loadcast/nn/gru.hpp"
#include "loadcast/nn/train.hpp"

namespace loadcast::models {

inline std::unique_ptr<nn::Network> network_from_config(const nlohmann::json& config) {
	const std::string arch = config.at("arch").get<std::string>();
	if (arch == "gru") return std::make_unique<nn::GruNetwork>(nn::GruNetwork::config_from_json(config));
	if (arch == "cnn") return std::make_unique<nn::CnnNetwork>(nn::CnnNetwork::config_from_json(config));
	throw DataError("unknown network arch '" + arch + "'");
}

/// Weights + config + seed + normalization, reloadable for prediction-only use.
inline nlohmann::json network_artifact(nn::Network& net, const nn::Normalization& norm,
                                       std::uint64_t seed) {
	nlohmann::json weights = nlohmann::json::array();
	for (nn::Tensor* t : net.parameters()) {
		weights.push_back({{"shape", t->shape}, {"data", t->data}});
	}
	return {{"config", net.config_json()},
	        {"normalization", {{"mean", norm.mean}, {"std", norm.std}}},
	        {"seed", seed},
	        {"weights", weights}};
}

inline std::unique_ptr<nn::Network> network_from_artifact(const nlohmann::json& artifact,
                                                          nn::Normalization* norm_out = nullptr,
                                                          std::uint64_t* seed_out = nullptr) {
	auto net = network_from_config(artifact.at("config"));
	const auto& weights = artifact.at("weights");
	auto params = net->parameters();
	if (weights.size() != params.size()) throw DataError("network artifact: weight count mismatch");
	for (std::size_t i = 0; i < params.size(); ++i) {
		auto data = weights[i].at("data").get<std::vector<double>>();
		if (data.size() != params[i]->data.size()) {
			throw DataError("network artifact: weight size mismatch");
		}
		params[i]->data = std::move(data);
	}
	if (norm_out) {
		norm_out->mean = artifact.at("normalization").at("mean").get<double>();
		norm_out->std = artifact.at("normalization").at("std").get<double>();
	}
	if (seed_out) *seed_out = artifact.at("seed").get<std::uint64_t>();
	return net;
}

/// Forecaster wrapper around a trained network. After training, weights are
/// preserved; update only advances the context window, and predict forwards
/// the trailing input_len observations without mutating any parameter.
class NeuralForecaster final : public Forecaster {
public:
	NeuralForecaster(std::unique_ptr<nn::Network> net, nn::Normalization norm,
	                 std::uint64_t seed, double val_smape = 0.0)
	    : net_(std::move(net)), norm_(norm), seed_(seed), val_smape_(val_smape) {}

	std::string method() const override { return net_->arch(); }

	/// Train on the given series with a held-out tail for early stopping.
	/// Hyperparameter search normally constructs this class pre-trained.
	void fit(const UniformSeries& train) override {
		const std::size_t val_len = std::max<std::size_t>(train.size() / 5,
		                                                  static_cast<std::size_t>(net_->horizon()) + 1);
		if (train.size() <= val_len) throw InsufficientDataError("neural fit: series too short");
		const std::size_t train_len = train.size() - val_len;
		UniformSeries head(train.start_time, train.step_seconds,
		                   std::vector<double>(train.values.begin(),
		                                       train.values.begin() + static_cast<std::ptrdiff_t>(train_len)));
		norm_ = nn::fit_normalization(head.values);
		nn::TrainConfig tc;
		tc.seed = seed_;
		tc.normalization = norm_;
		const auto train_windows = nn::window_dataset(head, net_->input_len(), net_->horizon(), norm_);
		const auto val_windows =
		    nn::windows_over_tail(train, val_len, net_->input_len(), net_->horizon(), norm_);
		if (auto* gru = dynamic_cast<nn::GruNetwork*>(net_.get())) {
			Rng rng(derive_seed(seed_, 11));
			gru->init_weights(rng);
		} else if (auto* cnn = dynamic_cast<nn::CnnNetwork*>(net_.get())) {
			Rng rng(derive_seed(seed_, 11));
			cnn->init_weights(rng);
		}
		const auto outcome = nn::train_network(*net_, train_windows, val_windows, tc);
		val_smape_ = outcome.best_val_smape;
		context_ = train.values;
	}

	std::vector<double> predict(int horizon) const override {
		require_horizon(horizon);
		if (horizon > net_->horizon()) {
			throw Error(method() + ": horizon exceeds the trained output length");
		}
		const std::size_t in_w = static_cast<std::size_t>(net_->input_len());
		if (context_.size() < in_w) {
			throw InsufficientDataError(method() + ": context shorter than input_len");
		}
		std::vector<double> window(in_w);
		for (std::size_t i = 0; i < in_w; ++i) {
			window[i] = norm_.normalize(context_[context_.size() - in_w + i]);
		}
		nn::Graph graph;
		const nn::NodeId input = graph.constant(1, in_w, std::move(window));
		const nn::NodeId pred = net_->build_forward(graph, input, nullptr);
		const auto& raw = graph.values(pred);
		std::vector<double> out(static_cast<std::size_t>(horizon));
		for (int i = 0; i < horizon; ++i) {
			out[static_cast<std::size_t>(i)] = norm_.denormalize(raw[static_cast<std::size_t>(i)]);
		}
		check_finite(out, method());
		return out;
	}

	void update(std::span<const double> new_observations) override {
		context_.insert(context_.end(), new_observations.begin(), new_observations.end());
	}

	void set_context(std::vector<double> context) { context_ = std::move(context); }

	bool fitted() const override {
		return context_.size() >= static_cast<std::size_t>(net_->input_len());
	}

	nlohmann::json state() const override {
		return {{"method", method()},
		        {"config", net_->config_json()},
		        {"val_smape", val_smape_},
		        {"normalization", {{"mean", norm_.mean}, {"std", norm_.std}}},
		        {"seed", seed_}};
	}

	nlohmann::json artifact() const { return network_artifact(*net_, norm_, seed_); }

	static NeuralForecaster from_artifact(const nlohmann::json& artifact) {
		nn::Normalization norm;
		std::uint64_t seed = 0;
		auto net = network_from_artifact(artifact, &norm, &seed);
		return NeuralForecaster(std::move(net), norm, seed);
	}

	nn::Network& network() { return *net_; }
	const nn::Normalization& normalization() const { return norm_; }
	double val_smape() const { return val_smape_; }

private:
	// predict() builds a read-only forward pass; the graph API registers
	// parameters through non-const pointers, hence the mutable handle.
	mutable std::unique_ptr<nn::Network> net_;
	nn::Normalization norm_;
	std::uint64_t seed_ = 0;
	double val_smape_ = 0.0;
	std::vector<double> context_;
};

} // namespace loadcast::models
