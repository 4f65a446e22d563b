#include "dcb/loss.hpp"

#include <string>

#include "dcb/errors.hpp"
#include "dcb/ops.hpp"

namespace dcb {

namespace {

void check_pair(const std::vector<Tensor>& pred, const std::vector<Tensor>& target) {
    if (pred.size() != target.size()) {
        throw DimensionError("mse: " + std::to_string(pred.size()) + " predictions vs " +
                             std::to_string(target.size()) + " targets");
    }
    if (pred.empty()) throw DimensionError("mse: empty frame lists");
    for (size_t i = 0; i < pred.size(); ++i) {
        if (!pred[i].same_shape(target[i])) {
            throw DimensionError("mse: frame " + std::to_string(i) + " shapes differ");
        }
    }
}

}  // namespace

Tensor sequence_mse(const std::vector<Tensor>& pred, const std::vector<Tensor>& target) {
    check_pair(pred, target);
    Tensor total = mean_all(square(sub(pred[0], target[0])));
    for (size_t i = 1; i < pred.size(); ++i) {
        total = add(total, mean_all(square(sub(pred[i], target[i]))));
    }
    return affine(total, 1.0 / static_cast<double>(pred.size()), 0.0);
}

double frame_mse(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw DimensionError("frame_mse: shapes differ");
    double s = 0.0;
    for (long long i = 0; i < pred.numel(); ++i) {
        const double d = pred.at_flat(i) - target.at_flat(i);
        s += d * d;
    }
    return s / static_cast<double>(pred.numel());
}

double mse_value(const std::vector<Tensor>& pred, const std::vector<Tensor>& target) {
    check_pair(pred, target);
    double s = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) s += frame_mse(pred[i], target[i]);
    return s / static_cast<double>(pred.size());
}

}  // namespace dcb
