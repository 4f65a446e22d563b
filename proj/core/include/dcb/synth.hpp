#pragma once

#include <cstdint>
#include <vector>

#include "dcb/frames.hpp"

namespace dcb {

/// How blob velocities evolve over a sequence.
enum class VelocityMode {
    kConstant,  // every blob moves with the same fixed (vx, vy)
    kRotating,  // per-blob speed/heading, heading rotating at a fixed rate
};

/// Advecting-Gaussian-blob task. Blobs live on a torus (periodic wrap, so
/// mass is conserved), drift along straight or slowly curving tracks, and
/// grow or decay in intensity. A memoryless one-step predictor accumulates
/// phase and amplitude error over a 20-step rollout — the drift the
/// correction mechanism is meant to remove.
struct AdvectionConfig {
    int height = 32;
    int width = 32;
    int length = 25;  // frames per sequence (context + horizon)
    int n_blobs = 3;

    VelocityMode velocity_mode = VelocityMode::kRotating;
    double velocity_x = 1.0;  // kConstant only, cells/frame
    double velocity_y = 0.0;  // kConstant only, cells/frame
    double speed_min = 0.6;   // kRotating: per-blob speed range, cells/frame
    double speed_max = 1.4;
    double rotation_min = 0.05;  // kRotating: heading change per frame, radians
    double rotation_max = 0.20;

    double sigma_min = 1.5;  // blob stddev range, cells
    double sigma_max = 2.5;
    double amplitude_min = 0.4;  // initial peak intensity range
    double amplitude_max = 0.8;
    double growth_min = -0.05;  // per-frame relative intensity rate range
    double growth_max = 0.05;

    double noise_std = 0.0;  // additive Gaussian noise, clamped to [0, 1]
    bool grid_aligned_centers = false;  // snap initial centers to cells

    uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

/// SplitMix64 step; used to derive independent per-sequence seeds.
uint64_t splitmix64(uint64_t x);

/// One sequence from an explicit seed. Deterministic: the same seed always
/// produces bit-identical frames.
FrameSequence generate_sequence(const AdvectionConfig& cfg, uint64_t seq_seed);

/// n sequences with per-sequence seeds derived from cfg.seed.
std::vector<FrameSequence> generate(const AdvectionConfig& cfg, int n_sequences);

}  // namespace dcb
