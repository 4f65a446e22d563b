#include "dcb/backbone.hpp"

#include <string>

#include "dcb/errors.hpp"
#include "dcb/ops.hpp"

namespace dcb {

void BackboneConfig::validate() const {
    if (height <= 0 || width <= 0) throw ConfigError("backbone: extents must be positive");
    if (patch <= 0) throw ConfigError("backbone: patch size must be positive");
    if (height % patch != 0 || width % patch != 0) {
        throw ConfigError("backbone: height and width must be divisible by the patch size (" +
                          std::to_string(height) + "x" + std::to_string(width) + ", P=" +
                          std::to_string(patch) + ")");
    }
    if (window <= 0 || step <= 0) throw ConfigError("backbone: window and step must be positive");
    if (feature_dim <= 0) throw ConfigError("backbone: feature_dim must be positive");
}

ToyBackbone::ToyBackbone(BackboneConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    const int ph = cfg_.height / cfg_.patch;
    const int pw = cfg_.width / cfg_.patch;
    const int p = cfg_.patch;
    tokens_ = ph * pw;
    enc_cols_ = p * p * cfg_.window;
    dec_cols_ = p * p * cfg_.step;

    enc_idx_.resize(static_cast<size_t>(tokens_) * enc_cols_);
    for (int py = 0; py < ph; ++py) {
        for (int px = 0; px < pw; ++px) {
            const int l = py * pw + px;
            for (int t = 0; t < cfg_.window; ++t) {
                for (int dy = 0; dy < p; ++dy) {
                    for (int dx = 0; dx < p; ++dx) {
                        const int c = t * p * p + dy * p + dx;
                        const long long src = static_cast<long long>(t) * cfg_.height * cfg_.width +
                                              static_cast<long long>(py * p + dy) * cfg_.width +
                                              (px * p + dx);
                        enc_idx_[static_cast<size_t>(l) * enc_cols_ + c] = src;
                    }
                }
            }
        }
    }

    dec_idx_.resize(static_cast<size_t>(cfg_.step));
    for (int t = 0; t < cfg_.step; ++t) {
        auto& map = dec_idx_[static_cast<size_t>(t)];
        map.resize(static_cast<size_t>(cfg_.height) * cfg_.width);
        for (int y = 0; y < cfg_.height; ++y) {
            for (int x = 0; x < cfg_.width; ++x) {
                const int l = (y / p) * pw + (x / p);
                const int c = t * p * p + (y % p) * p + (x % p);
                map[static_cast<size_t>(y) * cfg_.width + x] =
                    static_cast<long long>(l) * dec_cols_ + c;
            }
        }
    }
}

Tensor ToyBackbone::encode(const std::vector<Tensor>& window, const BackboneParams& p) const {
    if (static_cast<int>(window.size()) != cfg_.window) {
        throw DimensionError("encode: expected " + std::to_string(cfg_.window) + " frames, got " +
                             std::to_string(window.size()));
    }
    for (const Tensor& f : window) {
        if (f.rank() != 2 || f.extent(0) != cfg_.height || f.extent(1) != cfg_.width) {
            throw DimensionError("encode: frame extents do not match the configured grid");
        }
    }
    Tensor patches = reshape(gather(concat_flat(window), enc_idx_), {tokens_, enc_cols_});
    return matmul(patches, p.e_proj);
}

std::vector<Tensor> ToyBackbone::decode(const Tensor& latent, const BackboneParams& p) const {
    if (latent.rank() != 2 || latent.extent(0) != tokens_) {
        throw DimensionError("decode: latent must be L x D for this geometry");
    }
    Tensor rows = matmul(latent, p.d_proj);  // L x dec_cols
    std::vector<Tensor> frames;
    frames.reserve(static_cast<size_t>(cfg_.step));
    for (int t = 0; t < cfg_.step; ++t) {
        frames.push_back(reshape(gather(rows, dec_idx_[static_cast<size_t>(t)]),
                                 {cfg_.height, cfg_.width}));
    }
    return frames;
}

}  // namespace dcb
