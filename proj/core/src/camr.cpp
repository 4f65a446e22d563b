#include "dcb/camr.hpp"

#include <cmath>

#include "dcb/ops.hpp"

namespace dcb {

Tensor content_scores(const Tensor& z_corrected, const LatentStack& mem_view,
                      const CamrParams& p) {
    if (mem_view.empty()) throw EmptyMemoryError("content_scores with no memory entries");
    const int d = z_corrected.extent(1);
    Tensor q = vecmat(mean_pool_tokens(z_corrected), p.w_q);
    std::vector<Tensor> key_rows;
    key_rows.reserve(mem_view.size());
    for (const Tensor& m : mem_view) {
        key_rows.push_back(vecmat(mean_pool_tokens(m), p.w_k));
    }
    Tensor keys = stack_rows(key_rows);
    Tensor scores = matmul(keys, reshape(q, {d, 1}));
    return affine(reshape(scores, {static_cast<int>(mem_view.size())}),
                  1.0 / std::sqrt(static_cast<double>(d)), 0.0);
}

Tensor drift_scores(const Tensor& delta, const LatentStack& drift_seq, const CamrParams& p) {
    if (drift_seq.empty()) throw EmptyMemoryError("drift_scores with no memory entries");
    const int r = static_cast<int>(drift_seq.size());
    Tensor c = vecmat(mean_pool_tokens(delta), p.w_c);
    std::vector<Tensor> hist_rows;
    hist_rows.reserve(drift_seq.size());
    for (const Tensor& dm : drift_seq) {
        hist_rows.push_back(vecmat(mean_pool_tokens(dm), p.w_h));
    }
    Tensor hist = stack_rows(hist_rows);
    Tensor sq = square(sub(hist, broadcast_row(c, r)));
    return affine(mean_pool_features(sq), -1.0, 0.0);
}

Tensor retrieval_weights(const Tensor& s_cont, const Tensor& s_drift, double lambda_drift) {
    if (!s_cont.same_shape(s_drift)) {
        throw DimensionError("retrieval_weights: score length mismatch");
    }
    return softmax(add(s_cont, affine(s_drift, lambda_drift, 0.0)));
}

Tensor refine_correction(const Tensor& weights, const LatentStack& mem_view,
                         const Tensor& d_init, const CamrParams& p) {
    Tensor aggregated = matmul(weighted_sum(weights, mem_view), p.w_agg);
    return add(aggregated, d_init);
}

}  // namespace dcb
