#pragma once

#include <vector>

#include "dcb/frames.hpp"
#include "dcb/tensor.hpp"

namespace dcb {

/// Mean squared error over all T*H*W elements, as a differentiable scalar
/// (gradients flow into pred only; target is data).
Tensor sequence_mse(const std::vector<Tensor>& pred, const std::vector<Tensor>& target);

/// Plain-value MSE over matching frame lists.
double mse_value(const std::vector<Tensor>& pred, const std::vector<Tensor>& target);

/// MSE of a single frame pair.
double frame_mse(const Tensor& pred, const Tensor& target);

}  // namespace dcb
