#include "dcb/tensor.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace dcb {

namespace {
std::atomic<bool> g_checked{true};

std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(s[i]);
    }
    return out + "]";
}
}  // namespace

bool checked_mode() { return g_checked.load(std::memory_order_relaxed); }
void set_checked_mode(bool on) { g_checked.store(on, std::memory_order_relaxed); }

long long numel_of(const Shape& shape) {
    long long n = 1;
    for (int e : shape) {
        if (e <= 0) throw DimensionError("non-positive extent in shape " + shape_str(shape));
        n *= e;
    }
    return n;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
    data_ = std::make_shared<const std::vector<double>>(
        static_cast<size_t>(numel_of(shape_)), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)) {
    if (numel_of(shape_) != static_cast<long long>(data.size())) {
        throw DimensionError("data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape_));
    }
    data_ = std::make_shared<const std::vector<double>>(std::move(data));
    validate();
}

void Tensor::validate() const {
    if (!checked_mode()) return;
    for (double v : *data_) {
        if (!std::isfinite(v)) {
            throw ContractError("non-finite value in tensor of shape " + shape_str(shape_));
        }
    }
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(Shape shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(Shape shape, double v) {
    std::vector<double> d(static_cast<size_t>(numel_of(shape)), v);
    return Tensor(std::move(shape), std::move(d));
}

Tensor Tensor::uniform(Shape shape, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> d(static_cast<size_t>(numel_of(shape)));
    for (double& v : d) v = dist(rng);
    return Tensor(std::move(shape), std::move(d));
}

int Tensor::extent(int axis) const {
    if (axis < 0 || axis >= rank()) {
        throw DimensionError("axis " + std::to_string(axis) + " out of range for rank " +
                             std::to_string(rank()));
    }
    return shape_[static_cast<size_t>(axis)];
}

double Tensor::value() const {
    if (numel() != 1) {
        throw ContractError("value() requires a one-element tensor, got shape " +
                            shape_str(shape_));
    }
    return (*data_)[0];
}

Tensor Tensor::with_node(int node) const {
    Tensor t = *this;
    t.node_ = node;
    return t;
}

Tensor Tensor::reshaped_view(Shape shape) const {
    if (numel_of(shape) != numel()) {
        throw DimensionError("reshape " + shape_str(shape_) + " -> " + shape_str(shape) +
                             " changes element count");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    t.node_ = -1;
    return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw DimensionError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (long long i = 0; i < a.numel(); ++i) {
        m = std::max(m, std::fabs(a.at_flat(i) - b.at_flat(i)));
    }
    return m;
}

}  // namespace dcb
