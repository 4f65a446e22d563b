#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <random>
#include <vector>

#include "dcb/errors.hpp"

namespace dcb {

using Shape = std::vector<int>;

long long numel_of(const Shape& shape);

/// Whether tensor construction rejects non-finite values. On by default;
/// tests rely on it, the CLI can switch it off for speed.
bool checked_mode();
void set_checked_mode(bool on);

/// Dense row-major double tensor. Immutable value type: copies share the
/// underlying buffer, every operation allocates a fresh output. A tensor
/// recorded on a gradient tape additionally carries the tape node id.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);  // zero-filled
    Tensor(Shape shape, std::vector<double> data);

    static Tensor scalar(double v);
    static Tensor zeros(Shape shape);
    static Tensor full(Shape shape, double v);
    /// Uniform values in [lo, hi), drawn in row-major order.
    static Tensor uniform(Shape shape, double lo, double hi, std::mt19937_64& rng);

    const Shape& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int extent(int axis) const;
    long long numel() const { return data_ ? static_cast<long long>(data_->size()) : 0; }
    bool empty() const { return !data_; }

    const double* data() const { return data_->data(); }
    const std::vector<double>& vec() const { return *data_; }

    double operator()(int i) const { return (*data_)[static_cast<size_t>(i)]; }
    double operator()(int i, int j) const {
        return (*data_)[static_cast<size_t>(i) * shape_[1] + j];
    }
    double at_flat(long long i) const { return (*data_)[static_cast<size_t>(i)]; }

    /// Value of a one-element tensor.
    double value() const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// Gradient-tape node id, or -1 when untracked.
    int node() const { return node_; }
    bool tracked() const { return node_ >= 0; }
    Tensor with_node(int node) const;

    /// Identical buffer reinterpreted with a new shape (no tape effect;
    /// prefer ops::reshape inside recorded computations).
    Tensor reshaped_view(Shape shape) const;

private:
    Shape shape_;
    std::shared_ptr<const std::vector<double>> data_;
    int node_ = -1;

    void validate() const;
};

/// Max |a - b| over all elements; shapes must match.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace dcb
