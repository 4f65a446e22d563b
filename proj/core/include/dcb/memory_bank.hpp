#pragma once

#include <string>
#include <vector>

#include "dcb/tensor.hpp"

namespace dcb {

/// One corrected posterior latent state, keyed by the rollout step that
/// produced it.
struct MemoryEntry {
    int rollout_index = 0;
    Tensor latent;  // L x D
};

/// A stack of R latent states (one L x D tensor per stored rollout step).
using LatentStack = std::vector<Tensor>;

/// One logged read of the bank, for causality auditing.
struct MemoryAccess {
    int step_tag = 0;                  // rollout step set by the caller
    std::string op;                    // which accessor ran
    std::vector<int> rollout_indices;  // entries the accessor touched
};

/// Ordered store of posterior latents with a learnable positional table over
/// the rollout axis. Fixed capacity, no eviction: at desk scale the bank
/// never outlives one sequence, so overflowing it is a hard error.
///
/// Stored entries stay raw; positional embeddings are added only in the
/// retrieval-time view. All reads are appended to an access log so tests can
/// prove that step r touches nothing written at or after step r.
class MemoryBank {
public:
    /// Capacity and feature dimension come from the positional table
    /// (capacity x D). The table may be tape-tracked.
    explicit MemoryBank(Tensor pos_table);
    /// Zero positional table (retrieval sees raw latents).
    MemoryBank(int capacity, int feature_dim);

    /// Append a posterior latent. The index must exceed every stored one.
    void write(const Tensor& latent, int rollout_index);

    /// Entries with their positional rows broadcast over tokens, in storage
    /// order. Differentiable through both latents and the table.
    LatentStack view_with_pos() const;

    /// Consecutive differences of the positional view, front-padded with a
    /// zero row so the stack length matches the bank.
    LatentStack drift_sequence() const;

    /// Raw latent of the most recent entry; an empty bank falls back to the
    /// caller's prior.
    Tensor reference(const Tensor& z_prior) const;

    /// Drop all entries; the positional table persists across sequences.
    void clear();

    int size() const { return static_cast<int>(entries_.size()); }
    bool empty() const { return entries_.empty(); }
    int capacity() const { return capacity_; }
    const MemoryEntry& entry(int i) const { return entries_.at(static_cast<size_t>(i)); }

    const Tensor& pos_table() const { return pos_table_; }
    /// Swap in a (typically tape-tracked) positional table for this pass.
    void set_pos_table(Tensor table);

    /// Tag subsequent reads with the rollout step about to be produced.
    void set_access_tag(int step) { access_tag_ = step; }
    const std::vector<MemoryAccess>& access_log() const { return log_; }
    void clear_access_log() { log_.clear(); }

private:
    std::vector<MemoryEntry> entries_;
    Tensor pos_table_;
    int capacity_;
    int access_tag_ = 0;
    mutable std::vector<MemoryAccess> log_;

    LatentStack positional_view() const;  // no logging
    void log_read(const char* op, bool all, int count) const;
};

}  // namespace dcb
