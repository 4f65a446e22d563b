#pragma once

#include <cstdint>
#include <vector>

#include "dcb/dataset.hpp"
#include "dcb/optim.hpp"
#include "dcb/rollout.hpp"

namespace dcb {

struct TrainConfig {
    int epochs = 30;
    int batch_size = 8;
    int threads = 1;
    int context_frames = 5;
    int n_steps = 20;  // rollout steps per sequence
    AdamWConfig optim;
    double clip_norm = 1.0;
    uint64_t seed = 0;
    DcbankOptions correction;
    /// A batch loss above this (or non-finite) aborts with TrainingError.
    double divergence_limit = 1e8;
};

struct EpochLog {
    int epoch = 0;  // 1-based
    double train_mse = 0.0;
    double val_mse = 0.0;
    double wall_seconds = 0.0;
};

struct FitResult {
    std::vector<EpochLog> log;
    long long optimizer_steps = 0;
};

/// Loss and per-parameter gradients of one full-unroll forecast of one
/// sequence (frames [0, context) as input, the next n_steps * step frames
/// as targets). Gradients flow through every rollout step, including the
/// memory write-backs.
std::pair<double, GradMap> sequence_gradients(const ToyBackbone& backbone,
                                              const ModelParams& params,
                                              const FrameSequence& seq, const TrainConfig& cfg);

/// Forecast MSE of one sequence with the current parameters (no tape).
double sequence_loss(const ToyBackbone& backbone, const ModelParams& params,
                     const FrameSequence& seq, const TrainConfig& cfg);

/// Mini-batch training: deterministic per-epoch shuffle, data-parallel
/// gradient computation over cfg.threads workers, gradients averaged in
/// batch-index order (the thread count never changes results), global-norm
/// clipping, one AdamW step per batch. Logs per-epoch train/val MSE.
FitResult fit(ModelParams& params, const ToyBackbone& backbone,
              const std::vector<FrameSequence>& train, const std::vector<FrameSequence>& val,
              const TrainConfig& cfg);

}  // namespace dcb
