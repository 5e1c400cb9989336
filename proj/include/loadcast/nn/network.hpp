#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcast/nn/graph.hpp"
#include "loadcast/nn/tensor.hpp"
#include "loadcast/nn/window.hpp"

namespace loadcast::nn {

/// A trainable forecasting network: one forward pass maps an input window of
/// input_len observations to all `horizon` outputs.
class Network {
public:
	virtual ~Network() = default;

	virtual std::string arch() const = 0;
	virtual int input_len() const = 0;
	virtual int horizon() const = 0;

	/// Record the forward pass for a [batch x input_len] input node.
	/// `dropout_rng` enables dropout masks; pass nullptr for evaluation mode.
	virtual NodeId build_forward(Graph& graph, NodeId input, Rng* dropout_rng) = 0;

	virtual std::vector<Tensor*> parameters() = 0;

	virtual nlohmann::json config_json() const = 0;

	std::vector<std::vector<double>> snapshot() {
		std::vector<std::vector<double>> values;
		for (Tensor* t : parameters()) values.push_back(t->data);
		return values;
	}

	void restore(const std::vector<std::vector<double>>& values) {
		auto params = parameters();
		if (values.size() != params.size()) throw Error("network: snapshot size mismatch");
		for (std::size_t i = 0; i < params.size(); ++i) {
			if (values[i].size() != params[i]->data.size()) {
				throw Error("network: snapshot tensor size mismatch");
			}
			params[i]->data = values[i];
		}
	}

	bool parameters_finite() {
		for (Tensor* t : parameters()) {
			if (!t->all_finite()) return false;
		}
		return true;
	}

protected:
	static std::vector<double> dropout_mask(Rng& rng, std::size_t size, double rate) {
		std::vector<double> mask(size);
		const double keep_scale = 1.0 / (1.0 - rate);
		for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
		return mask;
	}
};

/// Evaluation-mode predictions for a whole window set, batched.
inline std::vector<double> predict_all(Network& net, const WindowSet& windows,
                                       std::size_t batch_size = 256) {
	std::vector<double> out;
	out.reserve(windows.count() * static_cast<std::size_t>(windows.horizon));
	const std::size_t in_w = static_cast<std::size_t>(windows.input_len);
	for (std::size_t begin = 0; begin < windows.count(); begin += batch_size) {
		const std::size_t count = std::min(batch_size, windows.count() - begin);
		std::vector<double> batch(windows.inputs.begin() + static_cast<std::ptrdiff_t>(begin * in_w),
		                          windows.inputs.begin() + static_cast<std::ptrdiff_t>((begin + count) * in_w));
		Graph graph;
		const NodeId input = graph.constant(count, in_w, std::move(batch));
		const NodeId pred = net.build_forward(graph, input, nullptr);
		const auto& values = graph.values(pred);
		out.insert(out.end(), values.begin(), values.end());
	}
	return out;
}

/// Pooled SMAPE of evaluation-mode predictions on de-normalized values.
inline double evaluate_smape(Network& net, const WindowSet& windows) {
	const std::vector<double> predictions = predict_all(net, windows);
	double sum = 0.0;
	for (std::size_t i = 0; i < predictions.size(); ++i) {
		const double predicted = windows.norm.denormalize(predictions[i]);
		const double actual = windows.norm.denormalize(windows.targets[i]);
		const double denom = std::abs(actual) + std::abs(predicted);
		if (denom == 0.0) continue;
		sum += std::abs(actual - predicted) / denom;
	}
	return 100.0 * sum / static_cast<double>(predictions.size());
}

} // namespace loadcast::nn
