#pragma once

#include <map>
#include <string>
#include <vector>

#include "dcb/params.hpp"

namespace dcb {

/// Gradients keyed by parameter name (the names for_each_param emits).
using GradMap = std::map<std::string, Tensor>;

/// sqrt of the summed squared entries across every tensor in the map.
double global_norm(const GradMap& grads);

/// Scale all gradients by max_norm / norm when the global norm exceeds
/// max_norm. Returns the pre-clip norm. max_norm <= 0 disables clipping.
double clip_global_norm(GradMap& grads, double max_norm);

struct AdamWConfig {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;  // decoupled
};

/// Decoupled-weight-decay adaptive-moment optimizer. Moments are keyed by
/// parameter name and lazily zero-initialized; a parameter missing from the
/// gradient map is treated as having a zero gradient (weight decay still
/// applies).
class AdamW {
public:
    explicit AdamW(AdamWConfig cfg) : cfg_(cfg) {}

    /// One update in place. Throws DimensionError if a gradient's shape
    /// does not match its parameter.
    void step(ModelParams& params, const GradMap& grads);

    const AdamWConfig& config() const { return cfg_; }
    long long step_count() const { return t_; }

private:
    AdamWConfig cfg_;
    long long t_ = 0;
    std::map<std::string, std::vector<double>> m_, v_;
};

}  // namespace dcb
