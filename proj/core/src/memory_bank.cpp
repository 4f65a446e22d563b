#include "dcb/memory_bank.hpp"

#include "dcb/ops.hpp"

namespace dcb {

MemoryBank::MemoryBank(Tensor pos_table)
    : pos_table_(std::move(pos_table)), capacity_(pos_table_.extent(0)) {
    if (pos_table_.rank() != 2) throw DimensionError("pos_table must be capacity x D");
}

MemoryBank::MemoryBank(int capacity, int feature_dim)
    : MemoryBank(Tensor::zeros({capacity, feature_dim})) {}

void MemoryBank::set_pos_table(Tensor table) {
    if (table.rank() != 2 || table.extent(0) != capacity_ ||
        table.extent(1) != pos_table_.extent(1)) {
        throw DimensionError("pos_table replacement changes extents");
    }
    pos_table_ = std::move(table);
}

void MemoryBank::write(const Tensor& latent, int rollout_index) {
    if (static_cast<int>(entries_.size()) >= capacity_) {
        throw CapacityError("memory bank full (capacity " + std::to_string(capacity_) + ")");
    }
    if (rollout_index < 0) throw ContractError("rollout_index must be nonnegative");
    if (!entries_.empty() && rollout_index <= entries_.back().rollout_index) {
        throw ContractError("rollout_index " + std::to_string(rollout_index) +
                            " not greater than last stored index " +
                            std::to_string(entries_.back().rollout_index));
    }
    if (latent.rank() != 2 || latent.extent(1) != pos_table_.extent(1)) {
        throw DimensionError("latent extents do not match the bank feature dimension");
    }
    if (!entries_.empty() && !latent.same_shape(entries_.front().latent)) {
        throw DimensionError("latent shape differs from stored entries");
    }
    entries_.push_back({rollout_index, latent});
}

void MemoryBank::log_read(const char* op, bool all, int count) const {
    MemoryAccess a;
    a.step_tag = access_tag_;
    a.op = op;
    if (all) {
        for (const MemoryEntry& e : entries_) a.rollout_indices.push_back(e.rollout_index);
    } else if (count > 0 && !entries_.empty()) {
        a.rollout_indices.push_back(entries_.back().rollout_index);
    }
    log_.push_back(std::move(a));
}

LatentStack MemoryBank::positional_view() const {
    LatentStack out;
    out.reserve(entries_.size());
    const int tokens = entries_.front().latent.extent(0);
    for (size_t i = 0; i < entries_.size(); ++i) {
        Tensor pos = row(pos_table_, static_cast<int>(i));
        out.push_back(add(entries_[i].latent, broadcast_row(pos, tokens)));
    }
    return out;
}

LatentStack MemoryBank::view_with_pos() const {
    if (entries_.empty()) throw EmptyMemoryError("view_with_pos on empty memory bank");
    log_read("view_with_pos", true, 0);
    return positional_view();
}

LatentStack MemoryBank::drift_sequence() const {
    if (entries_.empty()) throw EmptyMemoryError("drift_sequence on empty memory bank");
    log_read("drift_sequence", true, 0);
    LatentStack view = positional_view();
    LatentStack out;
    out.reserve(view.size());
    out.push_back(Tensor::zeros(view.front().shape()));
    for (size_t i = 1; i < view.size(); ++i) {
        out.push_back(sub(view[i], view[i - 1]));
    }
    return out;
}

Tensor MemoryBank::reference(const Tensor& z_prior) const {
    if (entries_.empty()) {
        log_read("reference", false, 0);
        return z_prior;
    }
    log_read("reference", false, 1);
    return entries_.back().latent;
}

void MemoryBank::clear() { entries_.clear(); }

}  // namespace dcb
