#pragma once

#include <vector>

#include "dcb/backbone.hpp"
#include "dcb/memory_bank.hpp"
#include "dcb/params.hpp"

namespace dcb {

struct RolloutOptions {
    int n_steps = 20;
    DcbankOptions correction;
    /// Slide the window over ground truth instead of own predictions
    /// (requires targets). Predictions are still produced and traced.
    bool teacher_forcing = false;
    /// Fill each step's Prop1Report against the encoded ground-truth window
    /// (requires targets).
    bool audit_prop1 = false;
};

/// One encode -> correct -> decode cycle, fully recorded.
struct RolloutStep {
    int index = 0;
    Tensor prior;      // L x D, encoder output
    Tensor posterior;  // L x D, after correction (== prior when bypassed)
    StepDiagnostics diag;
    std::vector<Tensor> frames;  // decoded, `step` frames of H x W
};

struct RolloutTrace {
    std::vector<RolloutStep> steps;
};

struct RolloutResult {
    std::vector<Tensor> frames;  // n_steps * step predicted frames, in order
    RolloutTrace trace;
};

/// Autoregressive forecast: each step encodes the last `window` frames of
/// (context ++ predictions so far), corrects the latent against the bank,
/// decodes, and writes the posterior back. The bank must be empty at entry
/// and receives params.pos_table; differentiable end to end when params are
/// tape-tracked, including through the write-backs.
RolloutResult run(const ToyBackbone& backbone, const ModelParams& params, MemoryBank& bank,
                  const std::vector<Tensor>& context, const RolloutOptions& opt);

/// Same, with ground truth available: enables teacher forcing and the
/// Proposition-1 audit. targets must cover the whole horizon.
RolloutResult run_with_targets(const ToyBackbone& backbone, const ModelParams& params,
                               MemoryBank& bank, const std::vector<Tensor>& context,
                               const std::vector<Tensor>& targets, const RolloutOptions& opt);

}  // namespace dcb
