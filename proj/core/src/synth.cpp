#include "dcb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dcb/errors.hpp"

namespace dcb {

void AdvectionConfig::validate() const {
    if (height <= 0 || width <= 0) throw ConfigError("synth: extents must be positive");
    if (length <= 0) throw ConfigError("synth: sequence length must be positive");
    if (n_blobs < 0) throw ConfigError("synth: n_blobs must be nonnegative");
    if (sigma_min <= 0.0 || sigma_max < sigma_min) throw ConfigError("synth: bad sigma range");
    if (speed_min < 0.0 || speed_max < speed_min) throw ConfigError("synth: bad speed range");
    if (rotation_max < rotation_min) throw ConfigError("synth: bad rotation range");
    if (amplitude_min < 0.0 || amplitude_max < amplitude_min) {
        throw ConfigError("synth: bad amplitude range");
    }
    if (growth_max < growth_min) throw ConfigError("synth: bad growth range");
    if (noise_std < 0.0) throw ConfigError("synth: noise_std must be nonnegative");
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

struct Blob {
    double x, y;          // current center, wrapped into [0, extent)
    double sigma;
    double amplitude;     // initial peak intensity
    double growth;        // per-frame relative rate
    double vx, vy;        // kConstant velocity
    double speed, heading, rotation;  // kRotating track
};

double wrap(double v, double extent) {
    v = std::fmod(v, extent);
    return v < 0.0 ? v + extent : v;
}

double wrapped_dist(double a, double b, double extent) {
    const double d = std::fabs(a - b);
    return std::min(d, extent - d);
}

double draw(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

FrameSequence generate_sequence(const AdvectionConfig& cfg, uint64_t seq_seed) {
    cfg.validate();
    std::mt19937_64 rng(seq_seed);

    std::vector<Blob> blobs(static_cast<size_t>(cfg.n_blobs));
    for (Blob& b : blobs) {
        b.x = draw(rng, 0.0, static_cast<double>(cfg.width));
        b.y = draw(rng, 0.0, static_cast<double>(cfg.height));
        if (cfg.grid_aligned_centers) {
            b.x = std::floor(b.x);
            b.y = std::floor(b.y);
        }
        b.sigma = draw(rng, cfg.sigma_min, cfg.sigma_max);
        b.amplitude = draw(rng, cfg.amplitude_min, cfg.amplitude_max);
        b.growth = draw(rng, cfg.growth_min, cfg.growth_max);
        if (cfg.velocity_mode == VelocityMode::kConstant) {
            b.vx = cfg.velocity_x;
            b.vy = cfg.velocity_y;
        } else {
            b.speed = draw(rng, cfg.speed_min, cfg.speed_max);
            b.heading = draw(rng, 0.0, 2.0 * std::numbers::pi);
            b.rotation = draw(rng, cfg.rotation_min, cfg.rotation_max);
            if (draw(rng, 0.0, 1.0) < 0.5) b.rotation = -b.rotation;
        }
    }

    std::normal_distribution<double> noise(0.0, cfg.noise_std);
    FrameSequence seq;
    seq.height = cfg.height;
    seq.width = cfg.width;
    seq.frames.reserve(static_cast<size_t>(cfg.length));

    for (int t = 0; t < cfg.length; ++t) {
        std::vector<double> frame(static_cast<size_t>(cfg.height) * cfg.width, 0.0);
        for (const Blob& b : blobs) {
            const double a = b.amplitude * std::exp(b.growth * t);
            const double inv = 1.0 / (2.0 * b.sigma * b.sigma);
            for (int y = 0; y < cfg.height; ++y) {
                const double dy = wrapped_dist(static_cast<double>(y), b.y,
                                               static_cast<double>(cfg.height));
                for (int x = 0; x < cfg.width; ++x) {
                    const double dx = wrapped_dist(static_cast<double>(x), b.x,
                                                   static_cast<double>(cfg.width));
                    frame[static_cast<size_t>(y) * cfg.width + x] +=
                        a * std::exp(-(dx * dx + dy * dy) * inv);
                }
            }
        }
        if (cfg.noise_std > 0.0) {
            for (double& v : frame) v += noise(rng);
        }
        for (double& v : frame) v = std::clamp(v, 0.0, 1.0);
        seq.frames.emplace_back(Shape{cfg.height, cfg.width}, std::move(frame));

        for (Blob& b : blobs) {
            if (cfg.velocity_mode == VelocityMode::kConstant) {
                b.x = wrap(b.x + b.vx, static_cast<double>(cfg.width));
                b.y = wrap(b.y + b.vy, static_cast<double>(cfg.height));
            } else {
                b.x = wrap(b.x + b.speed * std::cos(b.heading), static_cast<double>(cfg.width));
                b.y = wrap(b.y + b.speed * std::sin(b.heading), static_cast<double>(cfg.height));
                b.heading += b.rotation;
            }
        }
    }
    return seq;
}

std::vector<FrameSequence> generate(const AdvectionConfig& cfg, int n_sequences) {
    if (n_sequences < 0) throw ConfigError("synth: n_sequences must be nonnegative");
    std::vector<FrameSequence> out;
    out.reserve(static_cast<size_t>(n_sequences));
    for (int i = 0; i < n_sequences; ++i) {
        out.push_back(generate_sequence(
            cfg, splitmix64(cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(i + 1))));
    }
    return out;
}

}  // namespace dcb
