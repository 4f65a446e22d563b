#pragma once

#include "dcb/tensor.hpp"

namespace dcb {

/// Learnable projections of the corrective latent extractor. Projections act
/// on the feature axis (right multiplication), so a D x D matrix maps an
/// L x D latent to L x D and the gate input [z_prior | z_ref] needs 2D x D.
struct CleParams {
    Tensor w_pre;    // D x D
    Tensor w_ref;    // D x D
    Tensor w_delta;  // D x D
    Tensor w_init;   // 2D x D
    Tensor w_out;    // D x D, zero at init so the untrained correction is zero
};

/// Raw drift residual z_prior - z_ref.
Tensor raw_residual(const Tensor& z_prior, const Tensor& z_ref);

/// Context-aware discrepancy z_prior * W_pre - z_ref * W_ref. Not zero for
/// equal inputs unless the two projections coincide.
Tensor context_discrepancy(const Tensor& z_prior, const Tensor& z_ref, const CleParams& p);

/// Initial drift correction: a sigmoid gate over [z_prior | z_ref] blends the
/// projected raw residual with the context discrepancy, then the output
/// projection maps the blend to the correction term.
Tensor initial_correction(const Tensor& z_prior, const Tensor& z_ref, const CleParams& p);

}  // namespace dcb
