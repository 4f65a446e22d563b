#pragma once

#include <functional>
#include <vector>

#include "dcb/tensor.hpp"

namespace dcb {

/// Vector-Jacobian rule of one primitive: maps the upstream gradient of the
/// output to the gradients of the inputs (one tensor per input, in order).
using Vjp = std::function<std::vector<Tensor>(const Tensor& upstream)>;

class Gradients;

/// Append-only reverse-mode tape. Records are added in forward order, so the
/// list is topologically sorted by construction; backward() walks it once in
/// reverse. One tape per logical training task, never shared across threads.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Register a leaf (parameter or tracked input). Returns a copy of the
    /// value carrying the new node id.
    Tensor watch(const Tensor& value);

    /// Register a primitive application. Inputs must already live on this
    /// tape (id >= 0). Returns the output with its node id attached.
    /// Public so tests can record custom rules (e.g. deliberately wrong ones
    /// to exercise the finite-difference checker).
    Tensor record(const std::vector<int>& inputs, const Tensor& output, Vjp vjp);

    /// Reverse pass from a scalar loss. Visits every record at most once.
    Gradients backward(const Tensor& loss) const;

    size_t size() const { return nodes_.size(); }

    /// Tape receiving new records on this thread, or nullptr.
    static Tape* current();

private:
    friend class TapeScope;
    struct Node {
        std::vector<int> inputs;
        Vjp vjp;          // empty for leaves
        Shape shape;      // for zero-gradient synthesis
        bool leaf = false;
    };
    std::vector<Node> nodes_;
};

/// RAII scope that makes a tape the recording target for the current thread.
class TapeScope {
public:
    explicit TapeScope(Tape& tape);
    ~TapeScope();
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

private:
    Tape* prev_;
};

/// Result of a backward pass: gradient per node, queryable by tensor.
class Gradients {
public:
    /// Gradient of the loss w.r.t. a tracked tensor. A watched leaf the loss
    /// never touched yields zeros of the leaf's shape.
    Tensor of(const Tensor& t) const;
    bool has(const Tensor& t) const;

private:
    friend class Tape;
    std::vector<Tensor> by_node_;   // empty tensor = untouched
    std::vector<Shape> shapes_;
};

}  // namespace dcb
