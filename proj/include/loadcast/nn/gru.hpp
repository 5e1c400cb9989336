#pragma once

#include <memory>
#include <vector>

#include "loadcast/nn/network.hpp"

namespace loadcast::nn {

struct GruConfig {
	int input_len = 24;
	int hidden_size = 32;
	int num_layers = 1;
	double dropout_rate = 0.0;
	int horizon = 1;

	void validate() const {
		if (input_len < 1 || hidden_size < 1 || num_layers < 1 || horizon < 1) {
			throw Error("GruConfig: sizes must be positive");
		}
		if (input_len < horizon) throw Error("GruConfig: input_len must be >= horizon");
		if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
			throw Error("GruConfig: dropout_rate must lie in [0, 1)");
		}
	}
};

/// Stacked GRU with a direct multi-output affine head.
///
/// Per step: z = sigmoid(x W_z + h U_z + b_z), r = sigmoid(x W_r + h U_r + b_r),
/// candidate = tanh(x W_h + (r . h) U_h + b_h), h' = (1 - z) . candidate + z . h.
/// Inter-layer dropout is applied during training only; the final hidden state
/// of the top layer feeds the head.
class GruNetwork final : public Network {
public:
	struct Layer {
		Tensor w_z, u_z, b_z;
		Tensor w_r, u_r, b_r;
		Tensor w_h, u_h, b_h;
	};

	explicit GruNetwork(GruConfig config) : config_(config) {
		config_.validate();
		const std::size_t hidden = static_cast<std::size_t>(config_.hidden_size);
		layers_.resize(static_cast<std::size_t>(config_.num_layers));
		for (std::size_t l = 0; l < layers_.size(); ++l) {
			const std::size_t in = l == 0 ? 1 : hidden;
			Layer& layer = layers_[l];
			for (Tensor* w : {&layer.w_z, &layer.w_r, &layer.w_h}) *w = Tensor({in, hidden});
			for (Tensor* u : {&layer.u_z, &layer.u_r, &layer.u_h}) *u = Tensor({hidden, hidden});
			for (Tensor* b : {&layer.b_z, &layer.b_r, &layer.b_h}) *b = Tensor({1, hidden});
		}
		head_w_ = Tensor({hidden, static_cast<std::size_t>(config_.horizon)});
		head_b_ = Tensor({1, static_cast<std::size_t>(config_.horizon)});
	}

	void init_weights(Rng& rng) {
		for (Layer& layer : layers_) {
			const std::size_t fan_in = layer.w_z.rows();
			const std::size_t hidden = layer.u_z.rows();
			layer.w_z.init_uniform(rng, fan_in);
			layer.u_z.init_uniform(rng, hidden);
			layer.b_z.init_uniform(rng, fan_in);
			layer.w_r.init_uniform(rng, fan_in);
			layer.u_r.init_uniform(rng, hidden);
			layer.b_r.init_uniform(rng, fan_in);
			layer.w_h.init_uniform(rng, fan_in);
			layer.u_h.init_uniform(rng, hidden);
			layer.b_h.init_uniform(rng, fan_in);
		}
		head_w_.init_uniform(rng, head_w_.rows());
		head_b_.init_uniform(rng, head_w_.rows());
	}

	std::string arch() const override { return "gru"; }
	int input_len() const override { return config_.input_len; }
	int horizon() const override { return config_.horizon; }
	const GruConfig& config() const { return config_; }

	NodeId build_forward(Graph& graph, NodeId input, Rng* dropout_rng) override {
		const std::size_t batch = graph.node_rows(input);
		const std::size_t hidden = static_cast<std::size_t>(config_.hidden_size);
		const int steps = config_.input_len;

		// Step inputs for the first layer are single columns of the window.
		std::vector<NodeId> sequence(static_cast<std::size_t>(steps));
		for (int t = 0; t < steps; ++t) {
			sequence[static_cast<std::size_t>(t)] =
			    graph.slice_cols(input, static_cast<std::size_t>(t), 1);
		}

		NodeId last_hidden = -1;
		for (std::size_t l = 0; l < layers_.size(); ++l) {
			Layer& layer = layers_[l];
			const NodeId w_z = graph.parameter(layer.w_z), u_z = graph.parameter(layer.u_z),
			             b_z = graph.parameter(layer.b_z);
			const NodeId w_r = graph.parameter(layer.w_r), u_r = graph.parameter(layer.u_r),
			             b_r = graph.parameter(layer.b_r);
			const NodeId w_h = graph.parameter(layer.w_h), u_h = graph.parameter(layer.u_h),
			             b_h = graph.parameter(layer.b_h);

			NodeId h = graph.constant(batch, hidden, std::vector<double>(batch * hidden, 0.0));
			for (int t = 0; t < steps; ++t) {
				const NodeId x = sequence[static_cast<std::size_t>(t)];
				const NodeId z = graph.sigmoid(
				    graph.add(graph.add(graph.matmul(x, w_z), graph.matmul(h, u_z)), b_z));
				const NodeId r = graph.sigmoid(
				    graph.add(graph.add(graph.matmul(x, w_r), graph.matmul(h, u_r)), b_r));
				const NodeId candidate = graph.tanh_(graph.add(
				    graph.add(graph.matmul(x, w_h), graph.matmul(graph.hadamard(r, h), u_h)), b_h));
				h = graph.add(graph.hadamard(graph.one_minus(z), candidate), graph.hadamard(z, h));
				sequence[static_cast<std::size_t>(t)] = h;
			}
			last_hidden = h;

			const bool drop = dropout_rng != nullptr && config_.dropout_rate > 0.0 &&
			                  l + 1 < layers_.size();
			if (drop) {
				for (NodeId& state : sequence) {
					state = graph.mask(state,
					                   dropout_mask(*dropout_rng, batch * hidden, config_.dropout_rate));
				}
			}
		}

		return graph.add(graph.matmul(last_hidden, graph.parameter(head_w_)),
		                 graph.parameter(head_b_));
	}

	std::vector<Tensor*> parameters() override {
		std::vector<Tensor*> params;
		for (Layer& layer : layers_) {
			for (Tensor* t : {&layer.w_z, &layer.u_z, &layer.b_z, &layer.w_r, &layer.u_r, &layer.b_r,
			                  &layer.w_h, &layer.u_h, &layer.b_h}) {
				params.push_back(t);
			}
		}
		params.push_back(&head_w_);
		params.push_back(&head_b_);
		return params;
	}

	nlohmann::json config_json() const override {
		return {{"arch", arch()},
		        {"input_len", config_.input_len},
		        {"hidden_size", config_.hidden_size},
		        {"num_layers", config_.num_layers},
		        {"dropout_rate", config_.dropout_rate},
		        {"horizon", config_.horizon}};
	}

	static GruConfig config_from_json(const nlohmann::json& j) {
		GruConfig c;
		c.input_len = j.at("input_len").get<int>();
		c.hidden_size = j.at("hidden_size").get<int>();
		c.num_layers = j.at("num_layers").get<int>();
		c.dropout_rate = j.at("dropout_rate").get<double>();
		c.horizon = j.at("horizon").get<int>();
		return c;
	}

	Layer& layer(std::size_t l) { return layers_[l]; }
	Tensor& head_weights() { return head_w_; }
	Tensor& head_bias() { return head_b_; }

private:
	GruConfig config_;
	std::vector<Layer> layers_;
	Tensor head_w_, head_b_;
};

} // namespace loadcast::nn
