#include "dcb/cle.hpp"

#include "dcb/ops.hpp"

namespace dcb {

Tensor raw_residual(const Tensor& z_prior, const Tensor& z_ref) {
    return sub(z_prior, z_ref);
}

Tensor context_discrepancy(const Tensor& z_prior, const Tensor& z_ref, const CleParams& p) {
    return sub(matmul(z_prior, p.w_pre), matmul(z_ref, p.w_ref));
}

Tensor initial_correction(const Tensor& z_prior, const Tensor& z_ref, const CleParams& p) {
    Tensor delta = raw_residual(z_prior, z_ref);
    Tensor discrepancy = context_discrepancy(z_prior, z_ref, p);
    Tensor gate = sigmoid(matmul(concat_features(z_prior, z_ref), p.w_init));
    Tensor blend = add(mul(gate, matmul(delta, p.w_delta)),
                       mul(affine(gate, -1.0, 1.0), discrepancy));
    return matmul(blend, p.w_out);
}

}  // namespace dcb
