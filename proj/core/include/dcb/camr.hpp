#pragma once

#include "dcb/memory_bank.hpp"
#include "dcb/tensor.hpp"

namespace dcb {

/// Learnable projections of correction-aware memory retrieval plus the
/// drift-consistency weight (a hyperparameter, not trained).
struct CamrParams {
    Tensor w_q;    // D x D, query projection
    Tensor w_k;    // D x D, key projection
    Tensor w_c;    // D x D, current-drift projection
    Tensor w_h;    // D x D, historical-drift projection
    Tensor w_agg;  // D x D, aggregation projection
    double lambda_drift = 0.3;
};

/// Per-step retrieval scores, kept for inspection and dumps.
struct RetrievalDiagnostics {
    Tensor s_cont;   // [R] scaled dot-product content relevance
    Tensor s_drift;  // [R] negated mean squared drift distance, <= 0
    Tensor weights;  // [R] softmax of the combined score, sums to 1
};

/// Scaled dot-product relevance between the pooled preliminarily corrected
/// latent (z_prior + d_init) and each pooled memory view entry.
Tensor content_scores(const Tensor& z_corrected, const LatentStack& mem_view,
                      const CamrParams& p);

/// Negative mean squared distance between the projected pooled current
/// residual and each projected pooled historical drift row. Zero only when
/// the two descriptors coincide.
Tensor drift_scores(const Tensor& delta, const LatentStack& drift_seq, const CamrParams& p);

/// softmax(s_cont + lambda * s_drift).
Tensor retrieval_weights(const Tensor& s_cont, const Tensor& s_drift, double lambda_drift);

/// W_agg applied to the temporally weighted memory sum, plus the initial
/// correction.
Tensor refine_correction(const Tensor& weights, const LatentStack& mem_view,
                         const Tensor& d_init, const CamrParams& p);

}  // namespace dcb
