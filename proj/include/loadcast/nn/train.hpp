#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "loadcast/nn/network.hpp"
#include "loadcast/nn/window.hpp"

namespace loadcast::nn {

struct TrainConfig {
	double learning_rate = 1e-3;
	int batch_size = 32;
	int max_epochs = 60;
	int early_stop_patience = 5; // epochs without validation-SMAPE improvement
	std::uint64_t seed = 0;
	Normalization normalization;

	void validate() const {
		if (learning_rate <= 0.0) throw Error("TrainConfig: learning_rate must be positive");
		if (batch_size < 1) throw Error("TrainConfig: batch_size must be at least 1");
		if (max_epochs < 1) throw Error("TrainConfig: max_epochs must be at least 1");
		if (early_stop_patience < 0) throw Error("TrainConfig: patience must be non-negative");
		if (normalization.std <= 0.0) throw Error("TrainConfig: normalization std must be positive");
	}
};

/// Adaptive moment estimation with fixed beta1 = 0.9, beta2 = 0.999,
/// epsilon = 1e-8. Only the learning rate is configurable.
class AdamOptimizer {
public:
	explicit AdamOptimizer(double learning_rate) : lr_(learning_rate) {}

	void step(const std::vector<Tensor*>& params) {
		if (m_.empty()) {
			for (Tensor* t : params) {
				m_.emplace_back(t->data.size(), 0.0);
				v_.emplace_back(t->data.size(), 0.0);
			}
		}
		++t_;
		const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
		const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
		for (std::size_t i = 0; i < params.size(); ++i) {
			Tensor& p = *params[i];
			for (std::size_t j = 0; j < p.data.size(); ++j) {
				const double g = p.grad[j];
				m_[i][j] = kBeta1 * m_[i][j] + (1.0 - kBeta1) * g;
				v_[i][j] = kBeta2 * v_[i][j] + (1.0 - kBeta2) * g * g;
				const double m_hat = m_[i][j] / correction1;
				const double v_hat = v_[i][j] / correction2;
				p.data[j] -= lr_ * m_hat / (std::sqrt(v_hat) + kEpsilon);
			}
		}
	}

private:
	static constexpr double kBeta1 = 0.9;
	static constexpr double kBeta2 = 0.999;
	static constexpr double kEpsilon = 1e-8;

	double lr_;
	std::uint64_t t_ = 0;
	std::vector<std::vector<double>> m_, v_;
};

enum class TrainStatus { Completed, Pruned };

struct TrainResult {
	TrainStatus status = TrainStatus::Completed;
	std::vector<double> train_loss; // mean batch SMAPE per epoch
	std::vector<double> val_smape;  // per epoch
	double best_val_smape = std::numeric_limits<double>::infinity();
	int best_epoch = 0;  // 1-based
	int epochs_run = 0;
};

/// Called after each epoch with (epoch, validation SMAPE); returning false
/// prunes the trial.
using EpochCallback = std::function<bool(int, double)>;

/// Mini-batch SMAPE-loss training with early stopping on validation SMAPE.
/// The network is left holding the best-validation parameters (also after
/// pruning). Fully deterministic for a fixed seed.
inline TrainResult train_network(Network& net, const WindowSet& train_windows,
                                 const WindowSet& val_windows, const TrainConfig& config,
                                 const EpochCallback& on_epoch = nullptr) {
	config.validate();
	if (train_windows.count() == 0 || val_windows.count() == 0) {
		throw InsufficientDataError("train_network: empty window set");
	}

	TrainResult result;
	const std::vector<Tensor*> params = net.parameters();
	AdamOptimizer optimizer(config.learning_rate);
	std::vector<std::vector<double>> best_params = net.snapshot();

	std::vector<std::size_t> order(train_windows.count());
	std::iota(order.begin(), order.end(), 0);
	const std::size_t in_w = static_cast<std::size_t>(train_windows.input_len);
	const std::size_t out_w = static_cast<std::size_t>(train_windows.horizon);

	for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
		Rng shuffle_rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch), 1));
		shuffle_rng.shuffle(order);
		Rng dropout_rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch), 2));

		double epoch_loss = 0.0;
		std::size_t batches = 0;
		for (std::size_t begin = 0; begin < order.size();
		     begin += static_cast<std::size_t>(config.batch_size)) {
			const std::size_t count =
			    std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), order.size() - begin);
			std::vector<double> inputs(count * in_w);
			std::vector<double> targets(count * out_w);
			for (std::size_t i = 0; i < count; ++i) {
				const std::size_t w = order[begin + i];
				std::copy_n(train_windows.inputs.begin() + static_cast<std::ptrdiff_t>(w * in_w), in_w,
				            inputs.begin() + static_cast<std::ptrdiff_t>(i * in_w));
				std::copy_n(train_windows.targets.begin() + static_cast<std::ptrdiff_t>(w * out_w), out_w,
				            targets.begin() + static_cast<std::ptrdiff_t>(i * out_w));
			}

			Graph graph;
			const NodeId input = graph.constant(count, in_w, std::move(inputs));
			const NodeId pred = net.build_forward(graph, input, &dropout_rng);
			const NodeId loss = graph.smape_loss(pred, targets, config.normalization);
			const double loss_value = graph.value(loss);
			if (!std::isfinite(loss_value)) {
				throw TrainingDivergedError("train_network: non-finite loss at epoch " +
				                            std::to_string(epoch));
			}
			for (Tensor* t : params) t->zero_grad();
			graph.backward(loss);
			optimizer.step(params);
			epoch_loss += loss_value;
			++batches;
		}
		if (!net.parameters_finite()) {
			throw TrainingDivergedError("train_network: parameters became non-finite at epoch " +
			                            std::to_string(epoch));
		}

		const double val = evaluate_smape(net, val_windows);
		if (!std::isfinite(val)) {
			throw TrainingDivergedError("train_network: non-finite validation SMAPE at epoch " +
			                            std::to_string(epoch));
		}
		result.train_loss.push_back(epoch_loss / static_cast<double>(batches));
		result.val_smape.push_back(val);
		result.epochs_run = epoch;

		if (val < result.best_val_smape) {
			result.best_val_smape = val;
			result.best_epoch = epoch;
			best_params = net.snapshot();
		}

		if (on_epoch && !on_epoch(epoch, val)) {
			result.status = TrainStatus::Pruned;
			break;
		}
		if (epoch - result.best_epoch > config.early_stop_patience) break;
	}

	net.restore(best_params);
	return result;
}

} // namespace loadcast::nn
