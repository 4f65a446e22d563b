#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dcb/params.hpp"

namespace dcb {

/// Builds the (scalar) loss for the current parameters. Called once under a
/// recording tape with tracked parameters, then repeatedly without any tape
/// on perturbed copies; it must be deterministic.
using LossFn = std::function<Tensor(const ModelParams&)>;

struct GradCheckParam {
    std::string name;
    long long coords_checked = 0;
    double max_rel_err = 0.0;
    long long worst_index = -1;  // flat index of the worst coordinate
    double analytic = 0.0;       // at the worst coordinate
    double numeric = 0.0;
};

struct GradCheckReport {
    bool passed = false;
    double tolerance = 0.0;
    double max_rel_err = 0.0;
    std::vector<GradCheckParam> params;  // one row per learnable tensor
};

/// Central-difference audit of reverse-mode gradients: for a random
/// subsample of coordinates per tensor (all of them when the tensor is
/// small), compare the tape gradient against (f(x+eps) - f(x-eps)) / 2 eps
/// with relative error |a - n| / max(|a|, |n|, 1e-8).
///
/// The default step balances roundoff against truncation for losses of
/// order one: smaller steps push roundoff noise in the numeric derivative
/// above the 1e-8 denominator floor on near-zero gradient coordinates.
GradCheckReport fd_gradcheck(const LossFn& loss_fn, const ModelParams& params, double eps = 1e-4,
                             double tolerance = 1e-4, int coords_per_tensor = 32,
                             uint64_t seed = 0);

}  // namespace dcb
