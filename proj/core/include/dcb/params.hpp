#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "dcb/backbone.hpp"
#include "dcb/dcbank.hpp"
#include "dcb/tape.hpp"

namespace dcb {

/// Everything needed to size the full parameter set.
struct ModelDims {
    int feature_dim = 16;  // D
    int encode_cols = 32;  // P^2 * window
    int decode_cols = 16;  // P^2 * step
    int capacity = 20;     // memory bank / positional table rows
};

/// Every learnable tensor in the system: the toy backbone, the correction
/// mechanism, and the memory bank's positional table.
struct ModelParams {
    BackboneParams backbone;
    DcbankParams dcbank;
    Tensor pos_table;  // capacity x D

    ModelDims dims() const;
};

/// Fresh parameters. Projections draw uniform +-sqrt(1/fan_in) in a fixed
/// visitation order; w_out and pos_table start at zero (the extractor starts
/// silent, so the initial correction is pure memory retrieval); w_fuse
/// starts as [I; 0] (passive fusion initially passes the prior through).
ModelParams init_params(const ModelDims& dims, uint64_t seed);

/// Visit every learnable tensor with a stable dotted name, in a fixed order.
void for_each_param(ModelParams& p,
                    const std::function<void(const std::string&, Tensor&)>& fn);
void for_each_param(const ModelParams& p,
                    const std::function<void(const std::string&, const Tensor&)>& fn);

/// Copy with every tensor registered as a leaf on the tape.
ModelParams tracked(const ModelParams& p, Tape& tape);

/// Total scalar count.
long long param_count(const ModelParams& p);

}  // namespace dcb
