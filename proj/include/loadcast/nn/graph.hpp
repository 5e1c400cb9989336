#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "loadcast/error.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/nn/tensor.hpp"

namespace loadcast::nn {

using NodeId = int;

/// Z-score normalization with training-split statistics.
struct Normalization {
	double mean = 0.0;
	double std = 1.0;

	double normalize(double x) const { return (x - mean) / std; }
	double denormalize(double x) const { return x * std + mean; }
};

/// Tape-based reverse-mode autodiff over row-major matrices.
///
/// Values are computed eagerly as nodes are created; backward() replays the
/// tape in reverse. One Graph instance records one forward pass (one batch).
class Graph {
	enum class Op {
		Constant,
		Parameter,
		Matmul,
		Add,        // same shape, or b broadcast row-wise when b.rows == 1
		Sub,
		Hadamard,
		OneMinus,
		Sigmoid,
		Tanh,
		Relu,
		Mask,       // elementwise multiply by a constant mask (dropout)
		SliceCols,
		Conv1d,
		SmapeLoss,
		MseLoss,
	};

	struct Node {
		Op op;
		int a = -1;
		int b = -1;
		std::size_t rows = 0;
		std::size_t cols = 0;
		std::vector<double> val;
		std::vector<double> grad;
		Tensor* param = nullptr;        // Parameter
		std::vector<double> aux;        // Mask values, loss targets
		std::size_t slice_start = 0;    // SliceCols
		int conv_in_ch = 0, conv_out_ch = 0, conv_len = 0, conv_k = 0; // Conv1d
		Normalization norm;             // SmapeLoss
	};

public:
	NodeId constant(std::size_t rows, std::size_t cols, std::vector<double> values) {
		Node n;
		n.op = Op::Constant;
		n.rows = rows;
		n.cols = cols;
		n.val = std::move(values);
		return push(std::move(n));
	}

	NodeId parameter(Tensor& t) {
		Node n;
		n.op = Op::Parameter;
		n.rows = t.rows();
		n.cols = t.cols();
		n.val = t.data;
		n.param = &t;
		return push(std::move(n));
	}

	NodeId matmul(NodeId a, NodeId b) {
		const Node& A = nodes_[a];
		const Node& B = nodes_[b];
		if (A.cols != B.rows) throw Error("graph: matmul shape mismatch");
		Node n;
		n.op = Op::Matmul;
		n.a = a;
		n.b = b;
		n.rows = A.rows;
		n.cols = B.cols;
		n.val.assign(n.rows * n.cols, 0.0);
		for (std::size_t i = 0; i < A.rows; ++i) {
			const double* arow = &A.val[i * A.cols];
			double* orow = &n.val[i * n.cols];
			for (std::size_t k = 0; k < A.cols; ++k) {
				const double aik = arow[k];
				if (aik == 0.0) continue;
				const double* brow = &B.val[k * B.cols];
				for (std::size_t j = 0; j < B.cols; ++j) orow[j] += aik * brow[j];
			}
		}
		return push(std::move(n));
	}

	NodeId add(NodeId a, NodeId b) { return binary(Op::Add, a, b); }
	NodeId sub(NodeId a, NodeId b) { return binary(Op::Sub, a, b); }
	NodeId hadamard(NodeId a, NodeId b) { return binary(Op::Hadamard, a, b); }

	NodeId one_minus(NodeId a) {
		Node n = unary_shell(Op::OneMinus, a);
		const Node& A = nodes_[a];
		for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = 1.0 - A.val[i];
		return push(std::move(n));
	}

	NodeId sigmoid(NodeId a) {
		Node n = unary_shell(Op::Sigmoid, a);
		const Node& A = nodes_[a];
		for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = 1.0 / (1.0 + std::exp(-A.val[i]));
		return push(std::move(n));
	}

	NodeId tanh_(NodeId a) {
		Node n = unary_shell(Op::Tanh, a);
		const Node& A = nodes_[a];
		for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = std::tanh(A.val[i]);
		return push(std::move(n));
	}

	NodeId relu(NodeId a) {
		Node n = unary_shell(Op::Relu, a);
		const Node& A = nodes_[a];
		for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = A.val[i] > 0.0 ? A.val[i] : 0.0;
		return push(std::move(n));
	}

	/// Elementwise multiply by a fixed mask (inverted dropout).
	NodeId mask(NodeId a, std::vector<double> mask_values) {
		const Node& A = nodes_[a];
		if (mask_values.size() != A.val.size()) throw Error("graph: mask size mismatch");
		Node n = unary_shell(Op::Mask, a);
		for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = A.val[i] * mask_values[i];
		n.aux = std::move(mask_values);
		return push(std::move(n));
	}

	NodeId slice_cols(NodeId a, std::size_t start, std::size_t count) {
		const Node& A = nodes_[a];
		if (start + count > A.cols) throw Error("graph: slice out of range");
		Node n;
		n.op = Op::SliceCols;
		n.a = a;
		n.rows = A.rows;
		n.cols = count;
		n.slice_start = start;
		n.val.assign(n.rows * n.cols, 0.0);
		for (std::size_t i = 0; i < A.rows; ++i) {
			for (std::size_t j = 0; j < count; ++j) n.val[i * count + j] = A.val[i * A.cols + start + j];
		}
		return push(std::move(n));
	}

	/// 1-D convolution, stride 1, zero same-padding, odd kernel.
	/// Input rows are batch items laid out channel-major: channel c occupies
	/// columns [c*len, (c+1)*len). Weights: [out_ch x in_ch*k], bias [1 x out_ch].
	NodeId conv1d(NodeId input, NodeId weights, NodeId bias, int in_ch, int out_ch, int len, int k) {
		const Node& X = nodes_[input];
		const Node& W = nodes_[weights];
		const Node& B = nodes_[bias];
		if (X.cols != static_cast<std::size_t>(in_ch * len) ||
		    W.rows != static_cast<std::size_t>(out_ch) ||
		    W.cols != static_cast<std::size_t>(in_ch * k) ||
		    B.val.size() != static_cast<std::size_t>(out_ch)) {
			throw Error("graph: conv1d shape mismatch");
		}
		const int pad = (k - 1) / 2;
		Node n;
		n.op = Op::Conv1d;
		n.a = input;
		n.b = weights;
		n.conv_in_ch = in_ch;
		n.conv_out_ch = out_ch;
		n.conv_len = len;
		n.conv_k = k;
		n.slice_start = static_cast<std::size_t>(bias); // third operand id
		n.rows = X.rows;
		n.cols = static_cast<std::size_t>(out_ch * len);
		n.val.assign(n.rows * n.cols, 0.0);
		for (std::size_t row = 0; row < X.rows; ++row) {
			const double* x = &X.val[row * X.cols];
			double* out = &n.val[row * n.cols];
			for (int oc = 0; oc < out_ch; ++oc) {
				const double* w = &W.val[static_cast<std::size_t>(oc) * W.cols];
				for (int pos = 0; pos < len; ++pos) {
					double acc = B.val[static_cast<std::size_t>(oc)];
					for (int ic = 0; ic < in_ch; ++ic) {
						for (int t = 0; t < k; ++t) {
							const int src = pos + t - pad;
							if (src < 0 || src >= len) continue;
							acc += w[ic * k + t] * x[ic * len + src];
						}
					}
					out[oc * len + pos] = acc;
				}
			}
		}
		return push(std::move(n));
	}

	/// SMAPE of de-normalized predictions against normalized targets, pooled
	/// over every term of the batch. 0/0 terms score 0 with a 0 subgradient.
	NodeId smape_loss(NodeId pred, const std::vector<double>& normalized_targets,
	                  const Normalization& norm) {
		const Node& P = nodes_[pred];
		if (normalized_targets.size() != P.val.size()) throw Error("graph: loss target size mismatch");
		Node n;
		n.op = Op::SmapeLoss;
		n.a = pred;
		n.rows = 1;
		n.cols = 1;
		n.aux = normalized_targets;
		n.norm = norm;
		double sum = 0.0;
		for (std::size_t i = 0; i < P.val.size(); ++i) {
			const double predicted = norm.denormalize(P.val[i]);
			const double actual = norm.denormalize(normalized_targets[i]);
			const double denom = std::abs(actual) + std::abs(predicted);
			if (denom == 0.0) continue;
			sum += std::abs(actual - predicted) / denom;
		}
		n.val = {100.0 * sum / static_cast<double>(P.val.size())};
		return push(std::move(n));
	}

	NodeId mse_loss(NodeId pred, const std::vector<double>& targets) {
		const Node& P = nodes_[pred];
		if (targets.size() != P.val.size()) throw Error("graph: loss target size mismatch");
		Node n;
		n.op = Op::MseLoss;
		n.a = pred;
		n.rows = 1;
		n.cols = 1;
		n.aux = targets;
		double ss = 0.0;
		for (std::size_t i = 0; i < P.val.size(); ++i) {
			const double r = P.val[i] - targets[i];
			ss += r * r;
		}
		n.val = {ss / static_cast<double>(P.val.size())};
		return push(std::move(n));
	}

	double value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].val[0]; }

	const std::vector<double>& values(NodeId id) const {
		return nodes_[static_cast<std::size_t>(id)].val;
	}

	std::size_t node_rows(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].rows; }
	std::size_t node_cols(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].cols; }

	/// Reverse-mode accumulation from a scalar node. Parameter gradients are
	/// added into the Tensor::grad buffers.
	void backward(NodeId loss) {
		for (auto& n : nodes_) n.grad.assign(n.val.size(), 0.0);
		nodes_[static_cast<std::size_t>(loss)].grad[0] = 1.0;

		for (std::size_t idx = nodes_.size(); idx-- > 0;) {
			Node& n = nodes_[idx];
			bool any = false;
			for (double g : n.grad) {
				if (g != 0.0) { any = true; break; }
			}
			if (!any) continue;
			switch (n.op) {
			case Op::Constant:
				break;
			case Op::Parameter:
				for (std::size_t i = 0; i < n.grad.size(); ++i) n.param->grad[i] += n.grad[i];
				break;
			case Op::Matmul: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				Node& B = nodes_[static_cast<std::size_t>(n.b)];
				// dA += dO * B^T
				for (std::size_t i = 0; i < A.rows; ++i) {
					const double* grow = &n.grad[i * n.cols];
					double* arow = &A.grad[i * A.cols];
					for (std::size_t k = 0; k < A.cols; ++k) {
						const double* brow = &B.val[k * B.cols];
						double acc = 0.0;
						for (std::size_t j = 0; j < n.cols; ++j) acc += grow[j] * brow[j];
						arow[k] += acc;
					}
				}
				// dB += A^T * dO
				for (std::size_t i = 0; i < A.rows; ++i) {
					const double* arow = &A.val[i * A.cols];
					const double* grow = &n.grad[i * n.cols];
					for (std::size_t k = 0; k < A.cols; ++k) {
						const double aik = arow[k];
						if (aik == 0.0) continue;
						double* brow = &B.grad[k * B.cols];
						for (std::size_t j = 0; j < n.cols; ++j) brow[j] += aik * grow[j];
					}
				}
				break;
			}
			case Op::Add: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				Node& B = nodes_[static_cast<std::size_t>(n.b)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) A.grad[i] += n.grad[i];
				if (B.rows == 1 && n.rows > 1) {
					for (std::size_t i = 0; i < n.rows; ++i) {
						for (std::size_t j = 0; j < n.cols; ++j) B.grad[j] += n.grad[i * n.cols + j];
					}
				} else {
					for (std::size_t i = 0; i < n.grad.size(); ++i) B.grad[i] += n.grad[i];
				}
				break;
			}
			case Op::Sub: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				Node& B = nodes_[static_cast<std::size_t>(n.b)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) {
					A.grad[i] += n.grad[i];
					B.grad[i] -= n.grad[i];
				}
				break;
			}
			case Op::Hadamard: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				Node& B = nodes_[static_cast<std::size_t>(n.b)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) {
					A.grad[i] += n.grad[i] * B.val[i];
					B.grad[i] += n.grad[i] * A.val[i];
				}
				break;
			}
			case Op::OneMinus: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) A.grad[i] -= n.grad[i];
				break;
			}
			case Op::Sigmoid: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) {
					A.grad[i] += n.grad[i] * n.val[i] * (1.0 - n.val[i]);
				}
				break;
			}
			case Op::Tanh: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) {
					A.grad[i] += n.grad[i] * (1.0 - n.val[i] * n.val[i]);
				}
				break;
			}
			case Op::Relu: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) {
					if (A.val[i] > 0.0) A.grad[i] += n.grad[i];
				}
				break;
			}
			case Op::Mask: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				for (std::size_t i = 0; i < n.grad.size(); ++i) A.grad[i] += n.grad[i] * n.aux[i];
				break;
			}
			case Op::SliceCols: {
				Node& A = nodes_[static_cast<std::size_t>(n.a)];
				for (std::size_t i = 0; i < n.rows; ++i) {
					for (std::size_t j = 0; j < n.cols; ++j) {
						A.grad[i * A.cols + n.slice_start + j] += n.grad[i * n.cols + j];
					}
				}
				break;
			}
			case Op::Conv1d: {
				Node& X = nodes_[static_cast<std::size_t>(n.a)];
				Node& W = nodes_[static_cast<std::size_t>(n.b)];
				Node& B = nodes_[n.slice_start];
				const int in_ch = n.conv_in_ch, out_ch = n.conv_out_ch;
				const int len = n.conv_len, k = n.conv_k, pad = (k - 1) / 2;
				for (std::size_t row = 0; row < X.rows; ++row) {
					const double* x = &X.val[row * X.cols];
					double* dx = &X.grad[row * X.cols];
					const double* dout = &n.grad[row * n.cols];
					for (int oc = 0; oc < out_ch; ++oc) {
						const double* w = &W.val[static_cast<std::size_t>(oc) * W.cols];
						double* dw = &W.grad[static_cast<std::size_t>(oc) * W.cols];
						for (int pos = 0; pos < len; ++pos) {
							const double g = dout[oc * len + pos];
							if (g == 0.0) continue;
							B.grad[static_cast<std::size_t>(oc)] += g;
							for (int ic = 0; ic < in_ch; ++ic) {
								for (int t = 0; t < k; ++t) {
									const int src = pos + t - pad;
									if (src < 0 || src >= len) continue;
									dw[ic * k + t] += g * x[ic * len + src];
									dx[ic * len + src] += g * w[ic * k + t];
								}
							}
						}
					}
				}
				break;
			}
			case Op::SmapeLoss: {
				Node& P = nodes_[static_cast<std::size_t>(n.a)];
				const double scale = n.grad[0] * 100.0 / static_cast<double>(P.val.size());
				for (std::size_t i = 0; i < P.val.size(); ++i) {
					const double predicted = n.norm.denormalize(P.val[i]);
					const double actual = n.norm.denormalize(n.aux[i]);
					P.grad[i] += scale * smape_term_subgradient(actual, predicted) * n.norm.std;
				}
				break;
			}
			case Op::MseLoss: {
				Node& P = nodes_[static_cast<std::size_t>(n.a)];
				const double scale = n.grad[0] * 2.0 / static_cast<double>(P.val.size());
				for (std::size_t i = 0; i < P.val.size(); ++i) {
					P.grad[i] += scale * (P.val[i] - n.aux[i]);
				}
				break;
			}
			}
		}
	}

private:
	NodeId push(Node&& n) {
		nodes_.push_back(std::move(n));
		return static_cast<NodeId>(nodes_.size() - 1);
	}

	Node unary_shell(Op op, NodeId a) {
		const Node& A = nodes_[static_cast<std::size_t>(a)];
		Node n;
		n.op = op;
		n.a = a;
		n.rows = A.rows;
		n.cols = A.cols;
		n.val.assign(A.val.size(), 0.0);
		return n;
	}

	NodeId binary(Op op, NodeId a, NodeId b) {
		const Node& A = nodes_[static_cast<std::size_t>(a)];
		const Node& B = nodes_[static_cast<std::size_t>(b)];
		const bool broadcast = (op == Op::Add && B.rows == 1 && A.rows > 1 && B.cols == A.cols);
		if (!broadcast && (A.rows != B.rows || A.cols != B.cols)) {
			throw Error("graph: elementwise shape mismatch");
		}
		Node n;
		n.op = op;
		n.a = a;
		n.b = b;
		n.rows = A.rows;
		n.cols = A.cols;
		n.val.assign(A.val.size(), 0.0);
		switch (op) {
		case Op::Add:
			if (broadcast) {
				for (std::size_t i = 0; i < A.rows; ++i) {
					for (std::size_t j = 0; j < A.cols; ++j) {
						n.val[i * A.cols + j] = A.val[i * A.cols + j] + B.val[j];
					}
				}
			} else {
				for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = A.val[i] + B.val[i];
			}
			break;
		case Op::Sub:
			for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = A.val[i] - B.val[i];
			break;
		case Op::Hadamard:
			for (std::size_t i = 0; i < A.val.size(); ++i) n.val[i] = A.val[i] * B.val[i];
			break;
		default:
			throw Error("graph: not a binary op");
		}
		return push(std::move(n));
	}

	std::vector<Node> nodes_;
};

} // namespace loadcast::nn
