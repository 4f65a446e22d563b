#pragma once

#include <vector>

#include "dcb/tensor.hpp"

namespace dcb {

/// Geometry of the linear toy backbone: frames are split into P x P patches,
/// a window of `window` frames is encoded into one L x D latent, and a latent
/// decodes into `step` frames. L = (H/P) * (W/P).
struct BackboneConfig {
    int height = 32;
    int width = 32;
    int patch = 4;
    int window = 2;       // frames consumed per encode (T_w)
    int step = 1;         // frames emitted per decode (T_step)
    int feature_dim = 16; // D

    void validate() const;  // throws ConfigError
};

/// The two learnable projections of the toy backbone.
struct BackboneParams {
    Tensor e_proj;  // (P^2 * window) x D
    Tensor d_proj;  // D x (P^2 * step)
};

/// Per-patch linear encoder/decoder. Each token sees only its own patch
/// across the window, so motion that crosses patch boundaries is invisible
/// to a single step — exactly the drift source the correction mechanism is
/// meant to fight. Differentiable end to end (patchify is a gather).
class ToyBackbone {
public:
    explicit ToyBackbone(BackboneConfig cfg);

    const BackboneConfig& config() const { return cfg_; }
    int tokens() const { return tokens_; }           // L
    int encode_cols() const { return enc_cols_; }    // P^2 * window
    int decode_cols() const { return dec_cols_; }    // P^2 * step

    /// window.size() == cfg.window frames of H x W -> L x D latent.
    Tensor encode(const std::vector<Tensor>& window, const BackboneParams& p) const;

    /// L x D latent -> cfg.step frames of H x W.
    std::vector<Tensor> decode(const Tensor& latent, const BackboneParams& p) const;

private:
    BackboneConfig cfg_;
    int tokens_ = 0;
    int enc_cols_ = 0;
    int dec_cols_ = 0;
    // Row-major (token, column) -> flat index into the concatenated window.
    std::vector<long long> enc_idx_;
    // Per output frame: (y, x) -> flat index into the L x dec_cols_ matrix.
    std::vector<std::vector<long long>> dec_idx_;
};

}  // namespace dcb
