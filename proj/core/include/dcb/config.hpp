#pragma once

#include <cstdint>
#include <string>

#include "dcb/backbone.hpp"
#include "dcb/dcbank.hpp"
#include "dcb/params.hpp"
#include "dcb/synth.hpp"

namespace dcb {

/// One experiment's complete knob set, loaded from a flat JSON object.
/// Every key is optional and falls back to the defaults below; unknown keys
/// are hard errors so sweep typos fail loudly. The canonical serialized echo
/// (sorted keys, effective values) is embedded in every output file.
struct RunConfig {
    // Task extents.
    int height = 32;
    int width = 32;
    int context_frames = 5;  // T_i
    int horizon = 20;        // T_o
    int window = 2;          // T_w
    int step = 1;            // T_step

    // Model extents.
    int feature_dim = 16;  // D
    int patch = 4;         // P
    int capacity = 0;      // memory slots; 0 = one per rollout step

    // Correction.
    double lambda_drift = 0.3;
    CorrectionMode mode = CorrectionMode::kCorrected;
    bool fallback_on_empty = false;

    // Optimizer / training.
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
    double clip_norm = 1.0;
    int epochs = 30;
    int batch_size = 8;
    int threads = 1;
    uint64_t seed = 0;

    // Dataset generation.
    int sequences_train = 200;
    int sequences_val = 20;
    int sequences_test = 50;
    int n_blobs = 3;
    double sigma_min = 1.5;
    double sigma_max = 2.5;
    double speed_min = 0.6;
    double speed_max = 1.4;
    double rotation_min = 0.05;
    double rotation_max = 0.20;
    double amplitude_min = 0.4;
    double amplitude_max = 0.8;
    double growth_min = -0.05;
    double growth_max = 0.05;
    double noise_std = 0.0;
    VelocityMode velocity_mode = VelocityMode::kRotating;
    double velocity_x = 1.0;
    double velocity_y = 0.0;
    bool grid_aligned_centers = false;

    std::string run_id = "run";

    /// Cross-field checks (divisibility, window fit, ranges). ConfigError.
    void validate() const;

    int rollout_steps() const;      // horizon / step
    int derived_capacity() const;   // capacity, or rollout_steps() when 0

    static RunConfig load(const std::string& path);
    static RunConfig from_json_string(const std::string& text);
    /// Canonical echo: every effective value, keys sorted.
    std::string to_json_string() const;
};

BackboneConfig backbone_config(const RunConfig& cfg);
AdvectionConfig advection_config(const RunConfig& cfg);
ModelDims model_dims(const RunConfig& cfg);
DcbankOptions dcbank_options(const RunConfig& cfg);

/// Fresh parameters sized for cfg, seeded with cfg.seed, with cfg's
/// lambda_drift installed.
ModelParams init_model(const RunConfig& cfg);

}  // namespace dcb
