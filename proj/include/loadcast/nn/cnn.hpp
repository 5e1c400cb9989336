#pragma once

#include <vector>

#include "loadcast/nn/network.hpp"

namespace loadcast::nn {

struct CnnConfig {
	int input_len = 24;
	std::vector<int> channels = {32}; // one entry per convolution layer
	int kernel_size = 5;              // odd
	double dropout_rate = 0.0;
	int horizon = 1;

	int num_layers() const { return static_cast<int>(channels.size()); }

	int receptive_field() const { return 1 + num_layers() * (kernel_size - 1); }

	void validate() const {
		if (input_len < 1 || horizon < 1) throw Error("CnnConfig: sizes must be positive");
		if (channels.empty()) throw Error("CnnConfig: need at least one layer");
		for (int c : channels) {
			if (c < 1) throw Error("CnnConfig: channel counts must be positive");
		}
		if (kernel_size < 3 || kernel_size % 2 == 0) {
			throw Error("CnnConfig: kernel size must be odd and at least 3");
		}
		if (receptive_field() > input_len) {
			throw Error("CnnConfig: receptive field exceeds input_len");
		}
		if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
			throw Error("CnnConfig: dropout_rate must lie in [0, 1)");
		}
	}
};

/// Stacked 1-D convolutions (stride 1, same padding) with ReLU and dropout,
/// flattened into an affine head emitting the whole horizon.
class CnnNetwork final : public Network {
public:
	struct Layer {
		Tensor weights; // [out_ch x in_ch*k]
		Tensor bias;    // [1 x out_ch]
	};

	explicit CnnNetwork(CnnConfig config) : config_(std::move(config)) {
		config_.validate();
		int in_ch = 1;
		for (int out_ch : config_.channels) {
			Layer layer;
			layer.weights = Tensor({static_cast<std::size_t>(out_ch),
			                        static_cast<std::size_t>(in_ch * config_.kernel_size)});
			layer.bias = Tensor({1, static_cast<std::size_t>(out_ch)});
			layers_.push_back(std::move(layer));
			in_ch = out_ch;
		}
		const std::size_t flat = static_cast<std::size_t>(config_.channels.back()) *
		                         static_cast<std::size_t>(config_.input_len);
		head_w_ = Tensor({flat, static_cast<std::size_t>(config_.horizon)});
		head_b_ = Tensor({1, static_cast<std::size_t>(config_.horizon)});
	}

	void init_weights(Rng& rng) {
		for (Layer& layer : layers_) {
			layer.weights.init_uniform(rng, layer.weights.cols());
			layer.bias.init_uniform(rng, layer.weights.cols());
		}
		head_w_.init_uniform(rng, head_w_.rows());
		head_b_.init_uniform(rng, head_w_.rows());
	}

	std::string arch() const override { return "cnn"; }
	int input_len() const override { return config_.input_len; }
	int horizon() const override { return config_.horizon; }
	const CnnConfig& config() const { return config_; }

	NodeId build_forward(Graph& graph, NodeId input, Rng* dropout_rng) override {
		const std::size_t batch = graph.node_rows(input);
		NodeId x = input;
		int in_ch = 1;
		for (std::size_t l = 0; l < layers_.size(); ++l) {
			const int out_ch = config_.channels[l];
			x = graph.conv1d(x, graph.parameter(layers_[l].weights), graph.parameter(layers_[l].bias),
			                 in_ch, out_ch, config_.input_len, config_.kernel_size);
			x = graph.relu(x);
			if (dropout_rng != nullptr && config_.dropout_rate > 0.0) {
				x = graph.mask(x, dropout_mask(*dropout_rng,
				                               batch * static_cast<std::size_t>(out_ch) *
				                                   static_cast<std::size_t>(config_.input_len),
				                               config_.dropout_rate));
			}
			in_ch = out_ch;
		}
		return graph.add(graph.matmul(x, graph.parameter(head_w_)), graph.parameter(head_b_));
	}

	std::vector<Tensor*> parameters() override {
		std::vector<Tensor*> params;
		for (Layer& layer : layers_) {
			params.push_back(&layer.weights);
			params.push_back(&layer.bias);
		}
		params.push_back(&head_w_);
		params.push_back(&head_b_);
		return params;
	}

	nlohmann::json config_json() const override {
		return {{"arch", arch()},
		        {"input_len", config_.input_len},
		        {"channels", config_.channels},
		        {"kernel_size", config_.kernel_size},
		        {"dropout_rate", config_.dropout_rate},
		        {"horizon", config_.horizon}};
	}

	static CnnConfig config_from_json(const nlohmann::json& j) {
		CnnConfig c;
		c.input_len = j.at("input_len").get<int>();
		c.channels = j.at("channels").get<std::vector<int>>();
		c.kernel_size = j.at("kernel_size").get<int>();
		c.dropout_rate = j.at("dropout_rate").get<double>();
		c.horizon = j.at("horizon").get<int>();
		return c;
	}

	Layer& layer(std::size_t l) { return layers_[l]; }
	Tensor& head_weights() { return head_w_; }
	Tensor& head_bias() { return head_b_; }

private:
	CnnConfig config_;
	std::vector<Layer> layers_;
	Tensor head_w_, head_b_;
};

} // namespace loadcast::nn
