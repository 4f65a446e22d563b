#include "dcb/tape.hpp"

#include <string>

namespace dcb {

namespace {
thread_local Tape* t_current = nullptr;

// Ops called from inside vjp rules must not append to the tape mid-backward.
struct RecordingPause {
    Tape* saved;
    RecordingPause() : saved(t_current) { t_current = nullptr; }
    ~RecordingPause() { t_current = saved; }
};

void accumulate(Tensor& slot, const Tensor& g) {
    if (slot.empty()) {
        slot = g;
        return;
    }
    if (!slot.same_shape(g)) throw DimensionError("gradient accumulation shape mismatch");
    std::vector<double> out(slot.vec());
    for (long long i = 0; i < g.numel(); ++i) out[static_cast<size_t>(i)] += g.at_flat(i);
    slot = Tensor(slot.shape(), std::move(out));
}
}  // namespace

Tape* Tape::current() { return t_current; }

TapeScope::TapeScope(Tape& tape) : prev_(t_current) { t_current = &tape; }
TapeScope::~TapeScope() { t_current = prev_; }

Tensor Tape::watch(const Tensor& value) {
    Node n;
    n.leaf = true;
    n.shape = value.shape();
    nodes_.push_back(std::move(n));
    return value.with_node(static_cast<int>(nodes_.size()) - 1);
}

Tensor Tape::record(const std::vector<int>& inputs, const Tensor& output, Vjp vjp) {
    for (int id : inputs) {
        if (id < 0 || id >= static_cast<int>(nodes_.size())) {
            throw ContractError("record: input node " + std::to_string(id) +
                                " is not on this tape");
        }
    }
    Node n;
    n.inputs = inputs;
    n.vjp = std::move(vjp);
    n.shape = output.shape();
    nodes_.push_back(std::move(n));
    return output.with_node(static_cast<int>(nodes_.size()) - 1);
}

Gradients Tape::backward(const Tensor& loss) const {
    if (loss.numel() != 1) throw ContractError("backward: loss must be scalar");
    if (!loss.tracked() || loss.node() >= static_cast<int>(nodes_.size())) {
        throw ContractError("backward: loss is not on this tape");
    }
    RecordingPause pause;

    Gradients g;
    g.by_node_.resize(nodes_.size());
    g.shapes_.reserve(nodes_.size());
    for (const Node& n : nodes_) g.shapes_.push_back(n.shape);

    g.by_node_[static_cast<size_t>(loss.node())] = Tensor::full(loss.shape(), 1.0);

    for (int id = loss.node(); id >= 0; --id) {
        const Node& node = nodes_[static_cast<size_t>(id)];
        const Tensor& upstream = g.by_node_[static_cast<size_t>(id)];
        if (upstream.empty() || node.leaf) continue;
        std::vector<Tensor> input_grads = node.vjp(upstream);
        if (input_grads.size() != node.inputs.size()) {
            throw ContractError("vjp returned wrong gradient count");
        }
        for (size_t k = 0; k < node.inputs.size(); ++k) {
            accumulate(g.by_node_[static_cast<size_t>(node.inputs[k])], input_grads[k]);
        }
    }
    return g;
}

Tensor Gradients::of(const Tensor& t) const {
    if (!t.tracked() || t.node() >= static_cast<int>(by_node_.size())) {
        throw ContractError("gradient query for a tensor not on the tape");
    }
    const Tensor& g = by_node_[static_cast<size_t>(t.node())];
    if (g.empty()) return Tensor::zeros(shapes_[static_cast<size_t>(t.node())]);
    return g;
}

bool Gradients::has(const Tensor& t) const {
    return t.tracked() && t.node() < static_cast<int>(by_node_.size()) &&
           !by_node_[static_cast<size_t>(t.node())].empty();
}

}  // namespace dcb
